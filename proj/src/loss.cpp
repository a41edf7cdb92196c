#include "gap/loss.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gap/errors.hpp"

namespace gap {

namespace {

void check_assignment(const Graph& g, const HardAssignment& a) {
  if (static_cast<int>(a.size()) != g.num_nodes())
    throw validation_error("assignment size " + std::to_string(a.size()) +
                           " does not match node count " + std::to_string(g.num_nodes()));
  for (int p : a)
    if (p < 0) throw validation_error("assignment contains a negative partition id");
}

}  // namespace

double exact_cut(const Graph& g, const HardAssignment& a, int k) {
  check_assignment(g, a);
  double cut = 0.0;
  for (const Edge& e : g.edges())
    if ((a[e.u] == k) != (a[e.v] == k)) cut += e.w;
  return cut;
}

double exact_total_cut(const Graph& g, const HardAssignment& a) {
  check_assignment(g, a);
  double cut = 0.0;
  for (const Edge& e : g.edges())
    if (a[e.u] != a[e.v]) cut += e.w;
  return cut;
}

double exact_ncut(const Graph& g, const HardAssignment& a) {
  check_assignment(g, a);
  const int parts = a.empty() ? 0 : *std::max_element(a.begin(), a.end()) + 1;
  std::vector<double> cut(parts, 0.0), vol(parts, 0.0);
  const std::vector<double> deg = degree_vector(g);
  for (int i = 0; i < g.num_nodes(); ++i) vol[a[i]] += deg[i];
  for (const Edge& e : g.edges()) {
    if (a[e.u] != a[e.v]) {
      cut[a[e.u]] += e.w;
      cut[a[e.v]] += e.w;
    }
  }
  double ncut = 0.0;
  for (int k = 0; k < parts; ++k) {
    if (vol[k] > 0.0) ncut += cut[k] / vol[k];
    // vol = 0 forces cut = 0: an empty-volume partition has no incident edges.
  }
  return ncut;
}

Matrix one_hot_assignment(const HardAssignment& a, int g_parts) {
  Matrix y(static_cast<int>(a.size()), g_parts);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] < 0 || a[i] >= g_parts)
      throw validation_error("assignment id " + std::to_string(a[i]) + " out of range for g=" +
                             std::to_string(g_parts));
    y(static_cast<int>(i), a[i]) = 1.0;
  }
  return y;
}

HardAssignment argmax_assignment(const Matrix& y) {
  HardAssignment a(y.rows());
  for (int i = 0; i < y.rows(); ++i) {
    int best = 0;
    for (int j = 1; j < y.cols(); ++j)
      if (y(i, j) > y(i, best)) best = j;
    a[i] = best;
  }
  return a;
}

void validate_partition_probabilities(const Matrix& y) {
  for (int i = 0; i < y.rows(); ++i) {
    double sum = 0.0;
    for (int j = 0; j < y.cols(); ++j) {
      const double v = y(i, j);
      if (!(v >= 0.0 && v <= 1.0))
        throw validation_error("partition probabilities: entry (" + std::to_string(i) + "," +
                               std::to_string(j) + ") = " + std::to_string(v) +
                               " outside [0,1]");
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw validation_error("partition probabilities: row " + std::to_string(i) + " sums to " +
                             std::to_string(sum));
  }
}

namespace {

// Column k of y as an n x 1 matrix: y * e_k.
ValueId column_of(Tape& tape, ValueId y, int k) {
  const int g = tape.value(y).cols();
  Matrix sel(g, 1);
  sel(k, 0) = 1.0;
  return tape.matmul(y, tape.input(std::move(sel)));
}

ValueId ones_complement(Tape& tape, ValueId x) {
  Matrix ones(tape.value(x).rows(), tape.value(x).cols(), 1.0);
  return tape.sub(tape.input(std::move(ones)), x);
}

// reduce_sum((q r^T) .* adj) on the requested path.
ValueId masked_product_sum(Tape& tape, std::shared_ptr<const SparseMatrix> adj, ValueId q,
                           ValueId r, LossPath path) {
  if (path == LossPath::sparse) return tape.edge_masked_dot_sum(std::move(adj), q, r);
  ValueId outer = tape.matmul_bt(q, r);
  ValueId masked = tape.elementwise_mul(outer, tape.input(adj->to_dense()));
  return tape.reduce_sum(masked);
}

}  // namespace

ValueId expected_cut_node(Tape& tape, std::shared_ptr<const SparseMatrix> adj, ValueId y, int k,
                          LossPath path) {
  const int g = tape.value(y).cols();
  if (k < 0 || k >= g)
    throw validation_error("expected_cut: partition " + std::to_string(k) + " out of range");
  ValueId yk = column_of(tape, y, k);
  return masked_product_sum(tape, std::move(adj), yk, ones_complement(tape, yk), path);
}

ValueId total_expected_cut_node(Tape& tape, std::shared_ptr<const SparseMatrix> adj, ValueId y,
                                LossPath path) {
  return masked_product_sum(tape, std::move(adj), y, ones_complement(tape, y), path);
}

ValueId volumes_node(Tape& tape, ValueId y, const std::vector<double>& degrees) {
  const int n = tape.value(y).rows();
  if (static_cast<int>(degrees.size()) != n)
    throw validation_error("volumes: degree vector length mismatch");
  Matrix d(1, n);
  for (int i = 0; i < n; ++i) d(0, i) = degrees[i];
  return tape.matmul(tape.input(std::move(d)), y);
}

ValueId expected_ncut_node(Tape& tape, std::shared_ptr<const SparseMatrix> adj, ValueId y,
                           const std::vector<double>& degrees, LossPath path) {
  ValueId gamma = volumes_node(tape, y, degrees);
  ValueId gamma_safe = tape.clamp_min(gamma, kVolumeEpsilon);
  ValueId q = tape.elementwise_div(y, gamma_safe);
  return masked_product_sum(tape, std::move(adj), q, ones_complement(tape, y), path);
}

ValueId balance_error_node(Tape& tape, ValueId y, int g_parts, bool normalized) {
  const int n = tape.value(y).rows();
  const int g = tape.value(y).cols();
  if (g != g_parts)
    throw validation_error("balance_error: y has " + std::to_string(g) + " columns for g=" +
                           std::to_string(g_parts));
  ValueId colsum = tape.matmul(tape.input(Matrix(1, n, 1.0)), y);
  const double target = static_cast<double>(n) / g_parts;
  ValueId diff = tape.sub(colsum, tape.input(Matrix(1, g, target)));
  ValueId err = tape.reduce_sum(tape.square(diff));
  if (normalized) err = tape.scale(err, 1.0 / (target * target));
  return err;
}

ValueId gap_loss_node(Tape& tape, std::shared_ptr<const SparseMatrix> adj, ValueId y,
                      const std::vector<double>& degrees, int g_parts, const LossOptions& opts) {
  if (opts.balance_weight < 0.0)
    throw validation_error("gap_loss: balance weight must be nonnegative");
  ValueId ncut = expected_ncut_node(tape, std::move(adj), y, degrees, opts.path);
  ValueId balance = balance_error_node(tape, y, g_parts, opts.normalized_balance);
  return tape.add(ncut, tape.scale(balance, opts.balance_weight));
}

ValueId gap_loss_minibatch_node(Tape& tape, const Graph& g, ValueId y,
                                const std::vector<int>& batch, int g_parts,
                                const LossOptions& opts) {
  if (opts.balance_weight < 0.0)
    throw validation_error("gap_loss: balance weight must be nonnegative");
  if (batch.empty()) throw validation_error("gap_loss minibatch: empty batch");
  const int n = g.num_nodes();
  std::vector<char> in_batch(n, 0);
  for (int v : batch) {
    if (v < 0 || v >= n) throw validation_error("gap_loss minibatch: node out of range");
    in_batch[v] = 1;
  }
  // Adjacency restricted to edges inside the batch.
  std::vector<Triplet> trips;
  for (const Edge& e : g.edges()) {
    if (in_batch[e.u] && in_batch[e.v]) {
      trips.push_back({e.u, e.v, e.w});
      trips.push_back({e.v, e.u, e.w});
    }
  }
  auto adj = std::make_shared<SparseMatrix>(n, n, std::move(trips));
  // Volumes and column sums over batch rows only.
  const std::vector<double> deg = degree_vector(g);
  Matrix d(1, n), ones(1, n);
  for (int i = 0; i < n; ++i) {
    d(0, i) = in_batch[i] ? deg[i] : 0.0;
    ones(0, i) = in_batch[i] ? 1.0 : 0.0;
  }
  ValueId gamma = tape.matmul(tape.input(std::move(d)), y);
  ValueId q = tape.elementwise_div(y, tape.clamp_min(gamma, kVolumeEpsilon));
  ValueId ncut = tape.edge_masked_dot_sum(adj, q, tape.sub(tape.input(Matrix(tape.value(y).rows(), g_parts, 1.0)), y));

  ValueId colsum = tape.matmul(tape.input(std::move(ones)), y);
  const double target = static_cast<double>(batch.size()) / g_parts;
  ValueId diff = tape.sub(colsum, tape.input(Matrix(1, g_parts, target)));
  ValueId balance = tape.reduce_sum(tape.square(diff));
  if (opts.normalized_balance) balance = tape.scale(balance, 1.0 / (target * target));
  return tape.add(ncut, tape.scale(balance, opts.balance_weight));
}

}  // namespace gap
