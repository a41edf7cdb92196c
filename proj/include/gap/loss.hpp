#pragma once

#include <memory>
#include <vector>

#include "gap/graph.hpp"
#include "gap/tape.hpp"

namespace gap {

// Partition id per node, ids in 0..g-1.
using HardAssignment = std::vector<int>;

// Weight of edges with exactly one endpoint in partition k.
double exact_cut(const Graph& g, const HardAssignment& a, int k);

// Total cut: each crossing edge counted once.
double exact_total_cut(const Graph& g, const HardAssignment& a);

// Sum over partitions of cut/vol. A partition with vol = 0 (and therefore
// cut = 0) contributes 0.
double exact_ncut(const Graph& g, const HardAssignment& a);

Matrix one_hot_assignment(const HardAssignment& a, int g_parts);

// Argmax per row; ties resolve to the lowest partition id.
HardAssignment argmax_assignment(const Matrix& y);

// Rows must sum to 1 within 1e-9 with entries in [0,1].
void validate_partition_probabilities(const Matrix& y);

enum class LossPath {
  dense,   // materializes the n x n outer product; reference path
  sparse,  // sums over directed edge occurrences; fast path
};

struct LossOptions {
  LossPath path = LossPath::sparse;
  double balance_weight = 1.0;      // Eq. 9 as printed is unweighted
  bool normalized_balance = false;  // divide the balance term by (n/g)^2
};

// Volume floor applied before the elementwise division; keeps the loss
// finite when training empties a partition.
inline constexpr double kVolumeEpsilon = 1e-10;

// Expected cut of partition k under independent per-node distributions Y.
// Counts each undirected edge in both directions ("directed-pair" cut): with
// one-hot Y this is exactly 2x exact_cut.
ValueId expected_cut_node(Tape& tape, std::shared_ptr<const SparseMatrix> adj, ValueId y, int k,
                          LossPath path = LossPath::sparse);

// Sum of expected_cut over all partitions, computed in one pass.
ValueId total_expected_cut_node(Tape& tape, std::shared_ptr<const SparseMatrix> adj, ValueId y,
                                LossPath path = LossPath::sparse);

// Expected volumes Gamma = Y^T D as a 1 x g row.
ValueId volumes_node(Tape& tape, ValueId y, const std::vector<double>& degrees);

ValueId expected_ncut_node(Tape& tape, std::shared_ptr<const SparseMatrix> adj, ValueId y,
                           const std::vector<double>& degrees, LossPath path = LossPath::sparse);

ValueId balance_error_node(Tape& tape, ValueId y, int g_parts, bool normalized = false);

// expected_ncut + balance_weight * balance_error.
ValueId gap_loss_node(Tape& tape, std::shared_ptr<const SparseMatrix> adj, ValueId y,
                      const std::vector<double>& degrees, int g_parts,
                      const LossOptions& opts = {});

// Minibatch approximation: only edges with both endpoints in `batch` count,
// volumes come from batch rows, and the balance target is |batch|/g.
ValueId gap_loss_minibatch_node(Tape& tape, const Graph& g, ValueId y,
                                const std::vector<int>& batch, int g_parts,
                                const LossOptions& opts = {});

}  // namespace gap
