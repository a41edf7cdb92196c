#pragma once

#include <cstdint>

#include "gap/graph.hpp"

namespace gap {

// Each of the n(n-1)/2 pairs is included independently with probability p.
Graph generate_erdos_renyi(int n, double p, uint64_t seed);

// Preferential attachment: start from a clique on attach_m+1 nodes; each new
// node attaches attach_m edges to distinct existing nodes chosen with
// probability proportional to current degree. Requires n > attach_m >= 1.
Graph generate_scale_free(int n, uint64_t seed, int attach_m = 2);

}  // namespace gap
