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

#ifndef OTBARY_SRC_NETWORK_SIMPLEX_H_
#define OTBARY_SRC_NETWORK_SIMPLEX_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "otbary/ot_exact.h"

namespace otbary::internal {

// Primal network simplex on the complete bipartite transportation graph.
//
// Nodes are the m sources followed by the k sinks; cell (i, j) is the arc
// i -> m + j. The basis is a spanning tree with m + k - 1 arcs stored with
// parent links and a circular preorder thread, so that a pivot touches the
// cycle, the reversed stem and the potentials of the moved subtree only.
// Potentials use the difference form: the reduced cost of (i, j) is
// c_ij - pi_i + pi_{m+j}.
//
// A warm basis whose flows are infeasible for new marginals but whose duals
// are still feasible (same costs) is repaired by dual simplex pivots.
//
// Degeneracy is removed by an Orden perturbation of the marginals (every
// source gains delta, the last sink gains m * delta); once optimal, the flows
// of the final basis are recomputed for the unperturbed marginals. Pricing is
// block search; a run of degenerate pivots switches to Bland's rule until a
// pivot makes progress.
class TransportSimplex {
 public:
  TransportSimplex(std::span<const double> supply,
                   std::span<const double> demand,
                   std::span<const double> cost);

  // Returns false if the pivot cap was reached before optimality.
  bool Solve(size_t max_pivots, const TransportBasis* warm_start,
             InitialBasis initial);

  size_t pivots() const { return pivots_; }
  bool warm_started() const { return warm_started_; }

  // Valid after Solve.
  size_t num_edges() const { return edge_row_.size(); }
  uint32_t edge_row(size_t e) const { return edge_row_[e]; }
  uint32_t edge_col(size_t e) const { return edge_col_[e]; }
  double edge_flow(size_t e) const { return flow_[e]; }
  // u_i and v_j with u_i + v_j = c_ij on the basis.
  double source_potential(size_t i) const { return pi_[i]; }
  double sink_potential(size_t j) const { return -pi_[m_ + j]; }

 private:
  bool is_source(int32_t node) const { return static_cast<size_t>(node) < m_; }
  double Cost(uint32_t row, uint32_t col) const {
    return cost_[static_cast<size_t>(row) * k_ + col];
  }
  double ReducedCost(uint32_t row, uint32_t col) const {
    return Cost(row, col) - pi_[row] + pi_[m_ + col];
  }

  void AddEdge(uint32_t row, uint32_t col);
  void InitNorthwestCorner();
  // Greedy allocation in increasing order of c_ij - shift_j; every
  // allocation retires one row or one column, so the m + k - 1 allocations
  // form a tree. An empty shift means zero.
  void InitLeastCost(std::span<const double> shift);
  // Sink potentials of a strided row subsample, used as the greedy shift
  // when there are many more sources than sinks. Empty if not worthwhile.
  std::vector<double> CoarseSinkPotentials() const;
  // Rebuilds parents, thread and potentials from the edge set. Returns false
  // if the edges do not form a spanning tree.
  bool BuildTree();
  // Flows on the current tree meeting the given marginals; returns the
  // smallest flow.
  double ComputeTreeFlows(std::span<const double> supply,
                          std::span<const double> demand,
                          std::vector<double>& flows) const;
  // Entering cell with negative reduced cost; false when optimal.
  bool FindEnteringBlock(uint32_t& row, uint32_t& col);
  bool FindEnteringBland(uint32_t& row, uint32_t& col) const;
  // Returns the step length theta.
  double Pivot(uint32_t row, uint32_t col, bool bland);
  // Pushes theta around the cycle of (row, col), swaps the edge above u_out
  // for it and updates the tree and potentials.
  void Exchange(uint32_t row, uint32_t col, double theta, int32_t u_out,
                bool out_on_s_side, int32_t join);
  int32_t Join(int32_t a, int32_t b) const;
  bool DualFeasible() const;
  // Dual simplex from a dual feasible basis until the flows are nonnegative.
  // Returns false once about `max_work` reduced costs have been priced.
  bool DualSimplex(size_t max_work);
  void UpdateTree(int32_t u_in, int32_t v_in, int32_t u_out, int32_t join,
                  uint32_t in_edge);

  size_t m_;
  size_t k_;
  std::span<const double> supply_;
  std::span<const double> demand_;
  std::span<const double> cost_;
  std::vector<double> psupply_;
  std::vector<double> pdemand_;
  double rc_tol_ = 0.0;

  // Basis arcs, one slot per tree edge.
  std::vector<uint32_t> edge_row_;
  std::vector<uint32_t> edge_col_;
  std::vector<double> flow_;

  // Rooted tree over the nodes; root is node 0 with parent -1.
  std::vector<int32_t> parent_;
  std::vector<uint32_t> pred_;  // slot of the edge to the parent
  std::vector<int32_t> thread_;
  std::vector<int32_t> rev_thread_;
  std::vector<int32_t> succ_num_;
  std::vector<int32_t> last_succ_;
  std::vector<double> pi_;
  std::vector<int32_t> dirty_;
  std::vector<uint32_t> mark_;

  size_t block_size_ = 0;
  size_t next_arc_ = 0;
  size_t pivots_ = 0;
  bool warm_started_ = false;
};

}  // namespace otbary::internal

#endif  // OTBARY_SRC_NETWORK_SIMPLEX_H_
