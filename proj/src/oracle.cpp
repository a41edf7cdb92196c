#include "gap/oracle.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "gap/errors.hpp"

namespace gap {

namespace {

void check_instance_size(int n, int g) {
  bool ok;
  if (g == 2)
    ok = n <= 16;
  else if (g == 3)
    ok = n <= 10;
  else
    ok = n * std::log2(static_cast<double>(g)) <= 20.0;
  if (!ok)
    throw validation_error("oracle: instance too large for exhaustive search (n=" +
                           std::to_string(n) + ", g=" + std::to_string(g) + ")");
}

}  // namespace

OracleResult brute_force_min_ncut(const Graph& g, int g_parts, bool require_balanced) {
  const int n = g.num_nodes();
  if (g_parts < 2) throw validation_error("oracle: g must be at least 2");
  if (g_parts > n) throw validation_error("oracle: g exceeds node count");
  check_instance_size(n, g_parts);

  const int cap = (n + g_parts - 1) / g_parts;  // ceil(n/g) when balanced
  HardAssignment current(n, 0);
  std::vector<int> sizes(g_parts, 0);
  OracleResult best;
  best.ncut = std::numeric_limits<double>::infinity();

  // Depth-first over canonical labelings; max_used tracks the highest label
  // assigned so far, so label permutations are never revisited.
  auto recurse = [&](auto&& self, int node, int max_used) -> void {
    if (node == n) {
      if (max_used + 1 != g_parts) return;  // every partition must be used
      if (require_balanced) {
        int lo = n, hi = 0;
        for (int s : sizes) {
          lo = std::min(lo, s);
          hi = std::max(hi, s);
        }
        if (hi - lo > 1) return;
      }
      ++best.enumerated;
      const double val = exact_ncut(g, current);
      if (val < best.ncut) {
        best.ncut = val;
        best.assignment = current;
      }
      return;
    }
    const int label_limit = std::min(max_used + 1, g_parts - 1);
    for (int label = 0; label <= label_limit; ++label) {
      if (require_balanced && sizes[label] >= cap) continue;
      // Remaining nodes must still be able to reach every unused label.
      const int new_max = std::max(max_used, label);
      if (g_parts - 1 - new_max > n - 1 - node) continue;
      current[node] = label;
      ++sizes[label];
      self(self, node + 1, new_max);
      --sizes[label];
    }
  };
  current[0] = 0;
  sizes[0] = 1;
  recurse(recurse, 1, 0);
  if (!std::isfinite(best.ncut))
    throw validation_error("oracle: no feasible assignment (check n >= g)");
  return best;
}

}  // namespace gap
