#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "gap/graph.hpp"
#include "gap/loss.hpp"

namespace gap {

// Spectral baseline: embed nodes with the g smallest eigenvectors of the
// unnormalized Laplacian L = diag(D) - A, then k-means (k-means++ seeding,
// 20 restarts, deterministic per seed) on the embedding rows. Disconnected
// graphs are handled by the Laplacian null space: rows are constant per
// component, so clustering separates components first.
HardAssignment spectral_partition(const Graph& g, int g_parts, uint64_t seed);

// I.i.d. uniform labels; the lower baseline.
HardAssignment random_partition(int n, int g_parts, uint64_t seed);

// K-means on the rows of `points` (k-means++ init, Lloyd iterations, best of
// `restarts` by inertia). Exposed for the spectral baseline's tests.
HardAssignment kmeans_rows(const Matrix& points, int k, uint64_t seed, int restarts = 20);

// Adapter for an external partitioner binary. The command template gets
// {graph} (METIS file path) and {g} substituted and must print one partition
// id per line on stdout.
struct ExternalPartitioner {
  std::string command_template;
};

HardAssignment run_external_partitioner(const ExternalPartitioner& ext, const Graph& g,
                                        int g_parts, const std::filesystem::path& workdir);

}  // namespace gap
