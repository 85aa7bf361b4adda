// Copyright 2026 The otbary Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "network_simplex.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

namespace otbary::internal {
namespace {

// Total mass added by the anti-degeneracy perturbation.
constexpr double kPerturbation = 1e-12;
// Flows of the unperturbed basis above -kFlowSlack are clamped to zero.
constexpr double kFlowSlack = 1e-12;
// Pricing budget of the dual repair of a warm basis, in multiples of m * k.
constexpr size_t kDualWork = 30;

}  // namespace

TransportSimplex::TransportSimplex(std::span<const double> supply,
                                   std::span<const double> demand,
                                   std::span<const double> cost)
    : m_(supply.size()),
      k_(demand.size()),
      supply_(supply),
      demand_(demand),
      cost_(cost) {
  const double delta = kPerturbation / static_cast<double>(m_);
  psupply_.assign(supply.begin(), supply.end());
  pdemand_.assign(demand.begin(), demand.end());
  for (double& a : psupply_) a += delta;
  pdemand_.back() += kPerturbation;

  double max_cost = 1.0;
  for (double c : cost_) max_cost = std::max(max_cost, std::abs(c));
  rc_tol_ = 1e-11 * max_cost;

  const size_t nodes = m_ + k_;
  parent_.resize(nodes);
  pred_.resize(nodes);
  thread_.resize(nodes);
  rev_thread_.resize(nodes);
  succ_num_.resize(nodes);
  last_succ_.resize(nodes);
  pi_.resize(nodes);
  block_size_ = std::max<size_t>(
      10, static_cast<size_t>(std::sqrt(static_cast<double>(m_ * k_))));
}

void TransportSimplex::AddEdge(uint32_t row, uint32_t col) {
  edge_row_.push_back(row);
  edge_col_.push_back(col);
}

void TransportSimplex::InitNorthwestCorner() {
  edge_row_.clear();
  edge_col_.clear();
  size_t i = 0;
  size_t j = 0;
  double ra = psupply_[0];
  double rb = pdemand_[0];
  const size_t edges = m_ + k_ - 1;
  for (size_t e = 0; e < edges; ++e) {
    const double f = std::max(0.0, std::min(ra, rb));
    AddEdge(static_cast<uint32_t>(i), static_cast<uint32_t>(j));
    ra -= f;
    rb -= f;
    if (e + 1 == edges) break;
    const bool advance_row = (j + 1 == k_) || (i + 1 < m_ && ra <= rb);
    if (advance_row) {
      ra = psupply_[++i];
    } else {
      rb = pdemand_[++j];
    }
  }
}

void TransportSimplex::InitLeastCost(std::span<const double> shift) {
  edge_row_.clear();
  edge_col_.clear();
  // (key, cell) pairs; the cell index breaks ties.
  std::vector<std::pair<double, uint64_t>> cells(m_ * k_);
  for (size_t c = 0; c < cells.size(); ++c) {
    cells[c] = {shift.empty() ? cost_[c] : cost_[c] - shift[c % k_], c};
  }
  std::sort(cells.begin(), cells.end());
  std::vector<double> ra = psupply_;
  std::vector<double> rb = pdemand_;
  std::vector<char> row_done(m_, 0);
  std::vector<char> col_done(k_, 0);
  size_t rows_left = m_;
  size_t cols_left = k_;
  const size_t edges = m_ + k_ - 1;
  for (const auto& [key, c] : cells) {
    if (edge_row_.size() == edges) break;
    const auto i = static_cast<uint32_t>(c / k_);
    const auto j = static_cast<uint32_t>(c % k_);
    if (row_done[i] || col_done[j]) continue;
    const double f = std::max(0.0, std::min(ra[i], rb[j]));
    AddEdge(i, j);
    ra[i] -= f;
    rb[j] -= f;
    // Retire exactly one line, the row on ties unless it is the last one.
    const bool retire_row =
        (ra[i] <= rb[j] && rows_left > 1) || cols_left == 1;
    if (retire_row) {
      row_done[i] = 1;
      --rows_left;
    } else {
      col_done[j] = 1;
      --cols_left;
    }
  }
}

std::vector<double> TransportSimplex::CoarseSinkPotentials() const {
  constexpr size_t kStride = 4;
  constexpr size_t kMinRows = 2000;
  if (m_ < kMinRows || m_ < kStride * k_) return {};
  const size_t rows = (m_ + kStride - 1) / kStride;
  std::vector<double> supply(rows);
  std::vector<double> cost(rows * k_);
  double total = 0.0;
  for (size_t r = 0; r < rows; ++r) {
    const size_t i = r * kStride;
    supply[r] = supply_[i];
    total += supply_[i];
    std::copy_n(cost_.begin() + i * k_, k_, cost.begin() + r * k_);
  }
  if (!(total > 0.0)) return {};
  for (double& a : supply) a /= total;
  TransportSimplex coarse(supply, demand_, cost);
  if (!coarse.Solve(100 * (rows + k_) + 100000, nullptr,
                    InitialBasis::kLeastCost)) {
    return {};
  }
  std::vector<double> v(k_);
  for (size_t j = 0; j < k_; ++j) v[j] = coarse.sink_potential(j);
  return v;
}

bool TransportSimplex::BuildTree() {
  const size_t nodes = m_ + k_;
  const size_t edges = edge_row_.size();
  if (edges + 1 != nodes) return false;

  // Compressed adjacency.
  std::vector<uint32_t> start(nodes + 1, 0);
  for (size_t e = 0; e < edges; ++e) {
    ++start[edge_row_[e] + 1];
    ++start[m_ + edge_col_[e] + 1];
  }
  for (size_t x = 0; x < nodes; ++x) start[x + 1] += start[x];
  std::vector<uint32_t> adj(2 * edges);
  {
    std::vector<uint32_t> fill(start.begin(), start.end() - 1);
    for (size_t e = 0; e < edges; ++e) {
      adj[fill[edge_row_[e]]++] = static_cast<uint32_t>(e);
      adj[fill[m_ + edge_col_[e]]++] = static_cast<uint32_t>(e);
    }
  }

  // Iterative preorder DFS from node 0.
  std::fill(parent_.begin(), parent_.end(), int32_t{-2});
  std::vector<int32_t> order;
  order.reserve(nodes);
  std::vector<int32_t> stack;
  parent_[0] = -1;
  pi_[0] = 0.0;
  stack.push_back(0);
  while (!stack.empty()) {
    const int32_t x = stack.back();
    stack.pop_back();
    order.push_back(x);
    for (uint32_t p = start[x]; p < start[x + 1]; ++p) {
      const uint32_t e = adj[p];
      if (parent_[x] >= 0 && pred_[x] == e) continue;
      const uint32_t row = edge_row_[e];
      const uint32_t col = edge_col_[e];
      const auto y = is_source(x) ? static_cast<int32_t>(m_ + col)
                                  : static_cast<int32_t>(row);
      if (parent_[y] != -2) return false;
      parent_[y] = x;
      pred_[y] = e;
      pi_[y] = is_source(x) ? pi_[x] - Cost(row, col) : Cost(row, col) + pi_[x];
      stack.push_back(y);
    }
  }
  if (order.size() != nodes) return false;

  for (size_t pos = 0; pos < nodes; ++pos) {
    const int32_t x = order[pos];
    const int32_t next = order[(pos + 1) % nodes];
    thread_[x] = next;
    rev_thread_[next] = x;
    succ_num_[x] = 1;
    last_succ_[x] = x;
  }
  for (size_t pos = nodes; pos-- > 1;) {
    const int32_t x = order[pos];
    const int32_t p = parent_[x];
    succ_num_[p] += succ_num_[x];
    if (last_succ_[p] == p) last_succ_[p] = last_succ_[x];
  }
  return true;
}

double TransportSimplex::ComputeTreeFlows(std::span<const double> supply,
                                          std::span<const double> demand,
                                          std::vector<double>& flows) const {
  // excess > 0: mass the node still has to push through its parent edge.
  std::vector<double> excess(m_ + k_);
  for (size_t i = 0; i < m_; ++i) excess[i] = supply[i];
  for (size_t j = 0; j < k_; ++j) excess[m_ + j] = -demand[j];
  flows.assign(edge_row_.size(), 0.0);
  double min_flow = std::numeric_limits<double>::infinity();
  // Reverse preorder visits children before parents.
  for (int32_t x = rev_thread_[0]; x != 0; x = rev_thread_[x]) {
    const int32_t p = parent_[x];
    // Edges always carry flow from the source end to the sink end.
    const double f = is_source(x) ? excess[x] : -excess[x];
    flows[pred_[x]] = f;
    if (is_source(x)) {
      excess[p] += f;
    } else {
      excess[p] -= f;
    }
    min_flow = std::min(min_flow, f);
  }
  return min_flow;
}

bool TransportSimplex::FindEnteringBlock(uint32_t& row, uint32_t& col) {
  const size_t arcs = m_ * k_;
  double best = -rc_tol_;
  bool found = false;
  size_t count = 0;
  size_t a = next_arc_;
  size_t i = a / k_;
  size_t j = a % k_;
  for (size_t scanned = 0; scanned < arcs; ++scanned) {
    const double rc = ReducedCost(static_cast<uint32_t>(i),
                                  static_cast<uint32_t>(j));
    if (rc < best) {
      best = rc;
      row = static_cast<uint32_t>(i);
      col = static_cast<uint32_t>(j);
      found = true;
    }
    if (++j == k_) {
      j = 0;
      if (++i == m_) i = 0;
    }
    if (++count == block_size_) {
      if (found) {
        next_arc_ = i * k_ + j;
        return true;
      }
      count = 0;
    }
  }
  if (found) next_arc_ = i * k_ + j;
  return found;
}

bool TransportSimplex::FindEnteringBland(uint32_t& row, uint32_t& col) const {
  for (size_t i = 0; i < m_; ++i) {
    for (size_t j = 0; j < k_; ++j) {
      if (ReducedCost(static_cast<uint32_t>(i), static_cast<uint32_t>(j)) <
          -rc_tol_) {
        row = static_cast<uint32_t>(i);
        col = static_cast<uint32_t>(j);
        return true;
      }
    }
  }
  return false;
}

int32_t TransportSimplex::Join(int32_t a, int32_t b) const {
  // An ancestor always has a larger subtree than its descendants.
  while (a != b) {
    if (succ_num_[a] < succ_num_[b]) {
      a = parent_[a];
    } else {
      b = parent_[b];
    }
  }
  return a;
}

double TransportSimplex::Pivot(uint32_t row, uint32_t col, bool bland) {
  const auto s = static_cast<int32_t>(row);
  const auto t = static_cast<int32_t>(m_ + col);
  const int32_t join = Join(s, t);

  // The cycle runs s -> t along the entering cell and back through the tree.
  // Climbing from t, an edge loses flow when its lower end is a sink; on the
  // s side the cycle descends, so the edge loses flow when the lower end is a
  // source.
  double theta = std::numeric_limits<double>::infinity();
  int32_t u_out = -1;
  bool out_on_s_side = false;
  size_t leaving_arc = std::numeric_limits<size_t>::max();
  auto consider = [&](int32_t x, bool s_side, bool allow_tie) {
    const uint32_t e = pred_[x];
    const double f = flow_[e];
    const size_t arc = static_cast<size_t>(edge_row_[e]) * k_ + edge_col_[e];
    bool better = f < theta;
    if (f == theta) better = bland ? arc < leaving_arc : allow_tie;
    if (better) {
      theta = f;
      u_out = x;
      out_on_s_side = s_side;
      leaving_arc = arc;
    }
  };
  for (int32_t x = s; x != join; x = parent_[x]) {
    if (is_source(x)) consider(x, true, false);
  }
  for (int32_t x = t; x != join; x = parent_[x]) {
    if (!is_source(x)) consider(x, false, true);
  }
  theta = std::max(theta, 0.0);
  Exchange(row, col, theta, u_out, out_on_s_side, join);
  return theta;
}

void TransportSimplex::Exchange(uint32_t row, uint32_t col, double theta,
                                int32_t u_out, bool out_on_s_side,
                                int32_t join) {
  const auto s = static_cast<int32_t>(row);
  const auto t = static_cast<int32_t>(m_ + col);
  for (int32_t x = s; x != join; x = parent_[x]) {
    flow_[pred_[x]] += is_source(x) ? -theta : theta;
  }
  for (int32_t x = t; x != join; x = parent_[x]) {
    flow_[pred_[x]] += is_source(x) ? theta : -theta;
  }

  // The entering cell reuses the leaving edge's slot.
  const uint32_t slot = pred_[u_out];
  edge_row_[slot] = row;
  edge_col_[slot] = col;
  flow_[slot] = theta;

  const int32_t u_in = out_on_s_side ? s : t;
  const int32_t v_in = out_on_s_side ? t : s;
  UpdateTree(u_in, v_in, u_out, join, slot);

  // Shift the moved subtree so the entering cell has zero reduced cost.
  const double c = Cost(row, col);
  const double sigma = out_on_s_side ? c + pi_[t] - pi_[s] : pi_[s] - c - pi_[t];
  const int32_t end = thread_[last_succ_[u_in]];
  for (int32_t x = u_in; x != end; x = thread_[x]) pi_[x] += sigma;
}

bool TransportSimplex::DualFeasible() const {
  for (size_t i = 0; i < m_; ++i) {
    for (size_t j = 0; j < k_; ++j) {
      if (ReducedCost(static_cast<uint32_t>(i), static_cast<uint32_t>(j)) <
          -rc_tol_) {
        return false;
      }
    }
  }
  return true;
}

bool TransportSimplex::DualSimplex(size_t max_work) {
  mark_.assign(m_ + k_, 0);
  uint32_t stamp = 0;
  size_t work = 0;
  while (work < max_work) {
    // Leaving edge: most negative flow.
    double worst = 0.0;
    int32_t x = -1;
    for (size_t node = 1; node < m_ + k_; ++node) {
      const double f = flow_[pred_[node]];
      if (f < worst) {
        worst = f;
        x = static_cast<int32_t>(node);
      }
    }
    if (x < 0) return true;

    // Dropping the edge above x splits off S = subtree(x). A source x has to
    // import into S, a sink x has to export; the entering cell crosses the
    // cut in that direction with the smallest reduced cost.
    if (++stamp == 0) {
      std::fill(mark_.begin(), mark_.end(), 0);
      stamp = 1;
    }
    const int32_t end = thread_[last_succ_[x]];
    for (int32_t y = x; y != end; y = thread_[y]) mark_[y] = stamp;
    const bool exports = !is_source(x);
    double best = std::numeric_limits<double>::infinity();
    uint32_t row = 0;
    uint32_t col = 0;
    for (int32_t y = x; y != end; y = thread_[y]) {
      ++work;
      if (exports && is_source(y)) {
        work += k_;
        const auto i = static_cast<uint32_t>(y);
        for (uint32_t j = 0; j < k_; ++j) {
          if (mark_[m_ + j] == stamp) continue;
          const double rc = ReducedCost(i, j);
          if (rc < best) {
            best = rc;
            row = i;
            col = j;
          }
        }
      } else if (!exports && !is_source(y)) {
        const auto j = static_cast<uint32_t>(y - static_cast<int32_t>(m_));
        work += m_;
        for (uint32_t i = 0; i < m_; ++i) {
          if (mark_[i] == stamp) continue;
          const double rc = ReducedCost(i, j);
          if (rc < best) {
            best = rc;
            row = i;
            col = j;
          }
        }
      }
    }
    if (!std::isfinite(best)) return false;  // infeasible marginals

    const auto s = static_cast<int32_t>(row);
    const auto t = static_cast<int32_t>(m_ + col);
    Exchange(row, col, -worst, x, mark_[s] == stamp, Join(s, t));
    ++pivots_;
  }
  return false;
}

// Moves the subtree rooted at u_out below v_in, re-rooted at u_in, keeping
// the preorder thread, subtree sizes and last successors consistent.
void TransportSimplex::UpdateTree(int32_t u_in, int32_t v_in, int32_t u_out,
                                  int32_t join, uint32_t in_edge) {
  const int32_t old_rev_thread = rev_thread_[u_out];
  const int32_t old_succ_num = succ_num_[u_out];
  const int32_t old_last_succ = last_succ_[u_out];
  const int32_t v_out = parent_[u_out];

  if (u_in == u_out) {
    parent_[u_in] = v_in;
    pred_[u_in] = in_edge;
    if (thread_[v_in] != u_out) {
      int32_t after = thread_[old_last_succ];
      thread_[old_rev_thread] = after;
      rev_thread_[after] = old_rev_thread;
      after = thread_[v_in];
      thread_[v_in] = u_out;
      rev_thread_[u_out] = v_in;
      thread_[old_last_succ] = after;
      rev_thread_[after] = old_last_succ;
    }
  } else {
    const int32_t thread_continue =
        old_rev_thread == v_in ? thread_[old_last_succ] : thread_[v_in];

    // Walk the stem from u_in up to u_out, reversing parent links and
    // splicing each stem node's remaining subtree after the previous block.
    int32_t stem = u_in;
    int32_t par_stem = v_in;
    int32_t last = last_succ_[u_in];
    int32_t after = thread_[last];
    thread_[v_in] = u_in;
    dirty_.clear();
    dirty_.push_back(v_in);
    while (stem != u_out) {
      const int32_t next_stem = parent_[stem];
      thread_[last] = next_stem;
      dirty_.push_back(last);

      const int32_t before = rev_thread_[stem];
      thread_[before] = after;
      rev_thread_[after] = before;

      parent_[stem] = par_stem;
      par_stem = stem;
      stem = next_stem;

      last = last_succ_[stem] == last_succ_[par_stem] ? rev_thread_[par_stem]
                                                      : last_succ_[stem];
      after = thread_[last];
    }
    parent_[u_out] = par_stem;
    thread_[last] = thread_continue;
    rev_thread_[thread_continue] = last;
    last_succ_[u_out] = last;

    if (old_rev_thread != v_in) {
      thread_[old_rev_thread] = after;
      rev_thread_[after] = old_rev_thread;
    }
    for (int32_t x : dirty_) rev_thread_[thread_[x]] = x;

    int32_t tmp_sc = 0;
    const int32_t tmp_ls = last_succ_[u_out];
    for (int32_t x = u_out, p = parent_[x]; x != u_in; x = p, p = parent_[x]) {
      pred_[x] = pred_[p];
      tmp_sc += succ_num_[x] - succ_num_[p];
      succ_num_[x] = tmp_sc;
      last_succ_[p] = tmp_ls;
    }
    pred_[u_in] = in_edge;
    succ_num_[u_in] = old_succ_num;
  }

  const int32_t up_limit_out = last_succ_[join] == v_in ? join : -1;
  const int32_t last_succ_out = last_succ_[u_out];
  for (int32_t x = v_in; x != -1 && last_succ_[x] == v_in; x = parent_[x]) {
    last_succ_[x] = last_succ_out;
  }
  if (join != old_rev_thread && v_in != old_rev_thread) {
    for (int32_t x = v_out; x != up_limit_out && last_succ_[x] == old_last_succ;
         x = parent_[x]) {
      last_succ_[x] = old_rev_thread;
    }
  } else if (last_succ_out != old_last_succ) {
    for (int32_t x = v_out; x != up_limit_out && last_succ_[x] == old_last_succ;
         x = parent_[x]) {
      last_succ_[x] = last_succ_out;
    }
  }

  for (int32_t x = v_in; x != join; x = parent_[x]) succ_num_[x] += old_succ_num;
  for (int32_t x = v_out; x != join; x = parent_[x]) succ_num_[x] -= old_succ_num;
}

bool TransportSimplex::Solve(size_t max_pivots,
                             const TransportBasis* warm_start,
                             InitialBasis initial) {
  warm_started_ = false;
  pivots_ = 0;
  bool ready = false;
  std::vector<double> shift;
  if (warm_start != nullptr && warm_start->size() == m_ + k_ - 1) {
    edge_row_.clear();
    edge_col_.clear();
    bool valid = true;
    for (const auto& [r, c] : *warm_start) {
      if (r >= m_ || c >= k_) {
        valid = false;
        break;
      }
      AddEdge(r, c);
    }
    if (valid && BuildTree()) {
      if (ComputeTreeFlows(psupply_, pdemand_, flow_) >= 0.0) {
        ready = true;
      } else if (DualFeasible() && DualSimplex(kDualWork * m_ * k_)) {
        // Same costs, new marginals: the old basis was still dual feasible.
        ready = true;
      } else {
        // Primal infeasible for these marginals, but its duals still order
        // the greedy start well.
        shift.resize(k_);
        for (size_t j = 0; j < k_; ++j) shift[j] = sink_potential(j);
      }
      warm_started_ = ready;
    }
  }
  if (!ready) {
    if (initial == InitialBasis::kNorthwestCorner) {
      InitNorthwestCorner();
    } else {
      if (shift.empty()) shift = CoarseSinkPotentials();
      InitLeastCost(shift);
    }
    BuildTree();
    ComputeTreeFlows(psupply_, pdemand_, flow_);
    for (double& f : flow_) f = std::max(f, 0.0);
  }

  next_arc_ = 0;
  size_t degenerate_run = 0;
  const size_t bland_after = m_ + k_;
  bool optimal = false;
  while (pivots_ < max_pivots) {
    const bool bland = degenerate_run > bland_after;
    uint32_t row = 0;
    uint32_t col = 0;
    const bool found =
        bland ? FindEnteringBland(row, col) : FindEnteringBlock(row, col);
    if (!found) {
      optimal = true;
      break;
    }
    const double theta = Pivot(row, col, bland);
    ++pivots_;
    degenerate_run = theta > 0.0 ? 0 : degenerate_run + 1;
  }
  if (!optimal) return false;

  // Fresh potentials, then flows of the same basis for the exact marginals.
  BuildTree();
  std::vector<double> exact;
  const double min_flow = ComputeTreeFlows(supply_, demand_, exact);
  if (min_flow >= -kFlowSlack) {
    for (double& f : exact) f = std::max(f, 0.0);
    flow_ = std::move(exact);
  } else {
    for (double& f : flow_) f = std::max(f, 0.0);
  }
  return true;
}

}  // namespace otbary::internal
