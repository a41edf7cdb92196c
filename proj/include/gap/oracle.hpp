#pragma once

#include <cstdint>

#include "gap/graph.hpp"
#include "gap/loss.hpp"

namespace gap {

struct OracleResult {
  HardAssignment assignment;
  double ncut = 0.0;
  uint64_t enumerated = 0;  // canonical assignments evaluated
};

// Exhaustive minimum-Ncut search over assignments, canonicalized by
// first-occurrence relabeling (node 0 is always partition 0, partition j+1
// first appears only after j). With require_balanced only assignments whose
// sizes differ by at most 1 are considered. Size guard: n <= 16 for g = 2,
// n <= 10 for g = 3, and g^n <= 2^20 beyond that.
OracleResult brute_force_min_ncut(const Graph& g, int g_parts, bool require_balanced = false);

}  // namespace gap
