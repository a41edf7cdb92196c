#pragma once

#include <vector>

#include "gap/graph.hpp"
#include "gap/loss.hpp"

namespace gap {

struct MetricsReport {
  double edge_cut_ratio = 0.0;   // exact total cut / total edge weight
  double balancedness = 0.0;     // 1 - (1/g) sum (|S_k|/n - 1/g)^2
  double exact_ncut = 0.0;
  double expected_ncut = 0.0;    // on the one-hot of the assignment
  double balance_error = 0.0;    // raw count quadratic, Eq.-8 style
  std::vector<int> partition_sizes;
  double wall_clock_ms = 0.0;
  // Exact balance is unreachable when g does not divide n; this is the
  // balancedness of the best integer split, reported alongside.
  double best_achievable_balancedness = 1.0;
};

double edge_cut_ratio(const Graph& g, const HardAssignment& a);

// Partition sizes as fractions; 1 iff perfectly balanced.
double balancedness(const HardAssignment& a, int g_parts);
double best_achievable_balancedness(int n, int g_parts);

MetricsReport compute_metrics(const Graph& g, const HardAssignment& a, int g_parts);

}  // namespace gap
