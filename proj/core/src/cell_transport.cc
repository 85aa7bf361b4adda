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

#include "cell_transport.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <utility>

#include "otbary/errors.h"

namespace otbary::internal {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kDust = 64 * kEps;

class CellSolver {
 public:
  CellSolver(std::span<const double> supply, std::span<const double> demand,
             std::span<const double> cost, std::span<const double> warm_w)
      : m_(supply.size()),
        k_(demand.size()),
        supply_(supply),
        cost_(cost),
        w_(k_, 0.0),
        excess_(k_, 0.0),
        head_(m_, -1),
        heap_(k_ * k_) {
    if (warm_w.size() == k_) w_.assign(warm_w.begin(), warm_w.end());
    double total_a = 0.0;
    double total_b = 0.0;
    for (double a : supply) total_a += a;
    for (double b : demand) total_b += b;
    // Matching totals keep the surplus and deficit sums in balance.
    const double scale = total_b > 0.0 ? total_a / total_b : 1.0;
    for (size_t j = 0; j < k_; ++j) excess_[j] = -demand[j] * scale;
  }

  CellTransportResult Run() {
    AssignToCells();
    const size_t cap = 100 * (m_ + k_) + 10000;
    // Cell masses are running sums over up to m sources.
    const double surplus_tol = 1e-13 + 4.0 * kEps * static_cast<double>(m_);
    const double deficit_tol = surplus_tol / (2.0 * static_cast<double>(k_));
    std::vector<double> dist(k_);
    std::vector<int32_t> prev(k_);
    std::vector<uint32_t> via(k_);
    std::vector<char> done(k_);
    std::vector<Step> path;
    CellTransportResult r;
    while (true) {
      bool any = false;
      for (size_t j = 0; j < k_; ++j) {
        const bool surplus = excess_[j] > surplus_tol;
        dist[j] = surplus ? 0.0 : std::numeric_limits<double>::infinity();
        prev[j] = -1;
        done[j] = 0;
        any = any || surplus;
      }
      if (!any) break;
      if (r.augmentations++ == cap) {
        throw SolverError("cell transport exceeded " + std::to_string(cap) +
                          " augmentations");
      }

      // Dijkstra from every surplus cell to the nearest deficit cell.
      int32_t t = -1;
      for (size_t step = 0; step < k_; ++step) {
        int32_t j = -1;
        for (size_t c = 0; c < k_; ++c) {
          if (!done[c] && (j < 0 || dist[c] < dist[j])) j = static_cast<int32_t>(c);
        }
        if (j < 0 || !std::isfinite(dist[j])) break;
        done[j] = 1;
        if (excess_[j] < -deficit_tol) {
          t = j;
          break;
        }
        for (size_t jp = 0; jp < k_; ++jp) {
          if (done[jp]) continue;
          double key = 0.0;
          uint32_t i = 0;
          if (!Top(static_cast<size_t>(j), jp, key, i)) continue;
          const double reduced = std::max(0.0, key + w_[j] - w_[jp]);
          const double d = dist[j] + reduced;
          if (d < dist[jp]) {
            dist[jp] = d;
            prev[jp] = j;
            via[jp] = i;
          }
        }
      }
      if (t < 0) throw SolverError("cell transport found no deficit cell");

      const double dt = dist[t];
      for (size_t j = 0; j < k_; ++j) w_[j] += std::min(dist[j], dt);

      // Path edges from t back to the surplus cell; consecutive moves of the
      // same source are merged into one.
      path.clear();
      for (int32_t j = t; prev[j] >= 0; j = prev[j]) {
        const Step e{via[j], static_cast<uint32_t>(prev[j]),
                     static_cast<uint32_t>(j)};
        if (!path.empty() && path.back().source == e.source) {
          path.back().from = e.from;
        } else {
          path.push_back(e);
        }
      }
      double delta = std::min(-excess_[t], excess_[path.back().from]);
      for (const Step& e : path) delta = std::min(delta, Mass(e.source, e.from));
      for (const Step& e : path) Move(e.source, e.from, e.to, delta);
    }

    for (size_t i = 0; i < m_; ++i) {
      const size_t first = r.entries.size();
      for (int32_t n = head_[i]; n >= 0; n = nodes_[n].next) {
        const Alloc& a = nodes_[n];
        if (a.mass > 0.0) {
          r.entries.push_back({static_cast<uint32_t>(i), a.cell, a.mass});
        }
      }
      std::sort(r.entries.begin() + static_cast<std::ptrdiff_t>(first),
                r.entries.end(), [](const PlanEntry& a, const PlanEntry& b) {
                  return a.col < b.col;
                });
    }
    for (const PlanEntry& e : r.entries) r.value += e.mass * C(e.row, e.col);
    r.u.resize(m_);
    for (size_t i = 0; i < m_; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (size_t j = 0; j < k_; ++j) best = std::min(best, C(i, j) - w_[j]);
      r.u[i] = best;
    }
    r.w = std::move(w_);
    return r;
  }

 private:
  struct Alloc {
    uint32_t cell;
    double mass;
    int32_t next;
  };
  struct Step {
    uint32_t source;
    uint32_t from;
    uint32_t to;
  };
  using Entry = std::pair<double, uint32_t>;

  double C(size_t i, size_t j) const { return cost_[i * k_ + j]; }
  std::vector<Entry>& Heap(size_t j, size_t jp) { return heap_[j * k_ + jp]; }

  void AssignToCells() {
    for (size_t i = 0; i < m_; ++i) {
      if (!(supply_[i] > 0.0)) continue;
      size_t best = 0;
      double best_rc = C(i, 0) - w_[0];
      for (size_t j = 1; j < k_; ++j) {
        const double rc = C(i, j) - w_[j];
        if (rc < best_rc) {
          best_rc = rc;
          best = j;
        }
      }
      Link(static_cast<uint32_t>(i), static_cast<uint32_t>(best), supply_[i]);
      for (size_t jp = 0; jp < k_; ++jp) {
        if (jp != best) {
          Heap(best, jp).emplace_back(C(i, jp) - C(i, best),
                                      static_cast<uint32_t>(i));
        }
      }
    }
    for (auto& h : heap_) std::make_heap(h.begin(), h.end(), std::greater<>());
  }

  void Link(uint32_t i, uint32_t j, double mass) {
    nodes_.push_back({j, mass, head_[i]});
    head_[i] = static_cast<int32_t>(nodes_.size() - 1);
    excess_[j] += mass;
  }

  double Mass(uint32_t i, uint32_t j) const {
    for (int32_t n = head_[i]; n >= 0; n = nodes_[n].next) {
      if (nodes_[n].cell == j) return nodes_[n].mass;
    }
    return 0.0;
  }

  // Cheapest source currently in cell j for a move to jp; drops stale
  // entries of sources that have left j.
  bool Top(size_t j, size_t jp, double& key, uint32_t& i) {
    std::vector<Entry>& h = Heap(j, jp);
    while (!h.empty()) {
      if (Mass(h.front().second, static_cast<uint32_t>(j)) > 0.0) {
        key = h.front().first;
        i = h.front().second;
        return true;
      }
      std::pop_heap(h.begin(), h.end(), std::greater<>());
      h.pop_back();
    }
    return false;
  }

  void Move(uint32_t i, uint32_t from, uint32_t to, double delta) {
    int32_t* link = &head_[i];
    while (*link >= 0 && nodes_[*link].cell != from) link = &nodes_[*link].next;
    Alloc& src = nodes_[*link];
    // Rounding dust left behind would be shuttled back and forth forever.
    if (src.mass - delta <= kDust * supply_[i]) {
      delta = src.mass;
      *link = src.next;
    } else {
      src.mass -= delta;
    }
    excess_[from] -= delta;
    for (int32_t n = head_[i]; n >= 0; n = nodes_[n].next) {
      if (nodes_[n].cell == to) {
        nodes_[n].mass += delta;
        excess_[to] += delta;
        return;
      }
    }
    Link(i, to, delta);
    for (size_t jp = 0; jp < k_; ++jp) {
      if (jp == to) continue;
      std::vector<Entry>& h = Heap(to, jp);
      h.emplace_back(C(i, jp) - C(i, to), i);
      std::push_heap(h.begin(), h.end(), std::greater<>());
    }
  }

  size_t m_;
  size_t k_;
  std::span<const double> supply_;
  std::span<const double> cost_;
  std::vector<double> w_;
  // Cell mass minus (rescaled) demand.
  std::vector<double> excess_;
  // Per-source linked list of (cell, mass) allocations.
  std::vector<int32_t> head_;
  std::vector<Alloc> nodes_;
  std::vector<std::vector<Entry>> heap_;
};

}  // namespace

CellTransportResult SolveCellTransport(std::span<const double> supply,
                                       std::span<const double> demand,
                                       std::span<const double> cost,
                                       std::span<const double> warm_w) {
  return CellSolver(supply, demand, cost, warm_w).Run();
}

}  // namespace otbary::internal
