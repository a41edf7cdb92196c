#pragma once

#include <cstdint>

#include "gap/graph.hpp"
#include "gap/matrix.hpp"

namespace gap {

// Principal-component features of the adjacency rows: rows are mean-centered
// and projected onto the top min(dim, n) principal directions; when dim > n
// the output is zero-padded on the right, so a model trained at width dim
// accepts graphs of any size. The covariance is applied as a sparse operator,
// never materialized.
Matrix pca_features(const Graph& g, int dim, uint64_t seed = 0x9caf00d5u);

}  // namespace gap
