#include "gap/generators.hpp"

#include <string>

#include "gap/errors.hpp"
#include "gap/rng.hpp"

namespace gap {

Graph generate_erdos_renyi(int n, double p, uint64_t seed) {
  if (n < 0) throw validation_error("erdos_renyi: n must be nonnegative");
  if (!(p >= 0.0 && p <= 1.0))
    throw validation_error("erdos_renyi: p must lie in [0,1], got " + std::to_string(p));
  Rng rng(seed);
  std::vector<Edge> edges;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v)
      if (rng.uniform() < p) edges.push_back({u, v, 1.0});
  return Graph(n, std::move(edges));
}

Graph generate_scale_free(int n, uint64_t seed, int attach_m) {
  if (attach_m < 1) throw validation_error("scale_free: attach_m must be >= 1");
  if (n <= attach_m)
    throw validation_error("scale_free: need n > attach_m, got n=" + std::to_string(n) +
                           " attach_m=" + std::to_string(attach_m));
  Rng rng(seed);
  std::vector<Edge> edges;
  // Repeated-endpoints list: sampling an index uniformly is sampling a node
  // with probability proportional to its degree.
  std::vector<int> endpoint_pool;
  const int seed_clique = attach_m + 1;
  for (int u = 0; u < seed_clique; ++u) {
    for (int v = u + 1; v < seed_clique; ++v) {
      edges.push_back({u, v, 1.0});
      endpoint_pool.push_back(u);
      endpoint_pool.push_back(v);
    }
  }
  std::vector<char> picked(n, 0);
  for (int v = seed_clique; v < n; ++v) {
    std::vector<int> targets;
    targets.reserve(attach_m);
    while (static_cast<int>(targets.size()) < attach_m) {
      const int t = endpoint_pool[rng.uniform_int(endpoint_pool.size())];
      if (picked[t]) continue;
      picked[t] = 1;
      targets.push_back(t);
    }
    for (int t : targets) {
      picked[t] = 0;
      edges.push_back({t, v, 1.0});
      endpoint_pool.push_back(t);
      endpoint_pool.push_back(v);
    }
  }
  return Graph(n, std::move(edges));
}

}  // namespace gap
