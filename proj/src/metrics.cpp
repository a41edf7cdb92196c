#include "gap/metrics.hpp"

#include <memory>
#include <string>

#include "gap/errors.hpp"
#include "gap/tape.hpp"

namespace gap {

double edge_cut_ratio(const Graph& g, const HardAssignment& a) {
  const double total = g.total_edge_weight();
  if (total == 0.0) return 0.0;
  return exact_total_cut(g, a) / total;
}

double balancedness(const HardAssignment& a, int g_parts) {
  if (g_parts < 1) throw validation_error("balancedness: g must be positive");
  const double n = static_cast<double>(a.size());
  if (n == 0.0) return 1.0;
  std::vector<double> frac(g_parts, 0.0);
  for (int p : a) {
    if (p < 0 || p >= g_parts)
      throw validation_error("balancedness: partition id " + std::to_string(p) + " out of range");
    frac[p] += 1.0 / n;
  }
  double mse = 0.0;
  for (int k = 0; k < g_parts; ++k) {
    const double d = frac[k] - 1.0 / g_parts;
    mse += d * d;
  }
  return 1.0 - mse / g_parts;
}

double best_achievable_balancedness(int n, int g_parts) {
  // Best integer split: n mod g partitions hold ceil(n/g), the rest floor.
  HardAssignment a(n);
  int next = 0;
  const int base = n / g_parts, extra = n % g_parts;
  for (int k = 0; k < g_parts; ++k) {
    const int sz = base + (k < extra ? 1 : 0);
    for (int i = 0; i < sz; ++i) a[next++] = k;
  }
  return balancedness(a, g_parts);
}

MetricsReport compute_metrics(const Graph& g, const HardAssignment& a, int g_parts) {
  MetricsReport r;
  r.edge_cut_ratio = edge_cut_ratio(g, a);
  r.balancedness = balancedness(a, g_parts);
  r.best_achievable_balancedness = best_achievable_balancedness(g.num_nodes(), g_parts);
  r.exact_ncut = exact_ncut(g, a);
  r.partition_sizes.assign(g_parts, 0);
  for (int p : a) ++r.partition_sizes[p];
  const double target = static_cast<double>(g.num_nodes()) / g_parts;
  for (int k = 0; k < g_parts; ++k) {
    const double d = r.partition_sizes[k] - target;
    r.balance_error += d * d;
  }
  // Expected normalized cut of the one-hot assignment, through the loss path.
  Tape tape;
  ValueId y = tape.input(one_hot_assignment(a, g_parts));
  auto adj = std::make_shared<SparseMatrix>(adjacency_matrix(g));
  ValueId ncut = expected_ncut_node(tape, adj, y, degree_vector(g));
  r.expected_ncut = tape.value(ncut)(0, 0);
  return r;
}

}  // namespace gap
