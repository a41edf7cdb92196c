#include "gap/baselines.hpp"

#include <cstdio>
#include <cstdlib>
#include <limits>
#include <string>

#include "gap/eigs.hpp"
#include "gap/errors.hpp"
#include "gap/fsutil.hpp"
#include "gap/graph_io.hpp"
#include "gap/rng.hpp"

namespace gap {

namespace {

double sq_dist(const double* a, const double* b, int d) {
  double s = 0.0;
  for (int i = 0; i < d; ++i) {
    const double diff = a[i] - b[i];
    s += diff * diff;
  }
  return s;
}

struct KmeansRun {
  HardAssignment labels;
  double inertia = std::numeric_limits<double>::infinity();
};

KmeansRun kmeans_once(const Matrix& pts, int k, uint64_t seed) {
  const int n = pts.rows(), d = pts.cols();
  Rng rng(seed);
  // k-means++ seeding.
  Matrix centers(k, d);
  std::vector<double> dist2(n, std::numeric_limits<double>::infinity());
  int first = static_cast<int>(rng.uniform_int(n));
  for (int j = 0; j < d; ++j) centers(0, j) = pts(first, j);
  for (int c = 1; c < k; ++c) {
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      dist2[i] = std::min(dist2[i], sq_dist(pts.row(i), centers.row(c - 1), d));
      total += dist2[i];
    }
    int chosen = n - 1;
    if (total > 0.0) {
      const double target = rng.uniform() * total;
      double acc = 0.0;
      for (int i = 0; i < n; ++i) {
        acc += dist2[i];
        if (acc >= target) {
          chosen = i;
          break;
        }
      }
    } else {
      chosen = static_cast<int>(rng.uniform_int(n));
    }
    for (int j = 0; j < d; ++j) centers(c, j) = pts(chosen, j);
  }
  // Lloyd iterations.
  KmeansRun run;
  run.labels.assign(n, 0);
  for (int iter = 0; iter < 100; ++iter) {
    bool moved = false;
    for (int i = 0; i < n; ++i) {
      int best = 0;
      double bd = sq_dist(pts.row(i), centers.row(0), d);
      for (int c = 1; c < k; ++c) {
        const double dd = sq_dist(pts.row(i), centers.row(c), d);
        if (dd < bd) {
          bd = dd;
          best = c;
        }
      }
      if (run.labels[i] != best) {
        run.labels[i] = best;
        moved = true;
      }
    }
    centers.fill(0.0);
    std::vector<int> counts(k, 0);
    for (int i = 0; i < n; ++i) {
      ++counts[run.labels[i]];
      for (int j = 0; j < d; ++j) centers(run.labels[i], j) += pts(i, j);
    }
    for (int c = 0; c < k; ++c) {
      if (counts[c] == 0) {
        // Reseat an empty cluster at the point farthest from its center.
        int far = 0;
        double fd = -1.0;
        for (int i = 0; i < n; ++i) {
          const double dd = sq_dist(pts.row(i), centers.row(run.labels[i]), d);
          if (dd > fd) {
            fd = dd;
            far = i;
          }
        }
        for (int j = 0; j < d; ++j) centers(c, j) = pts(far, j);
        moved = true;
      } else {
        for (int j = 0; j < d; ++j) centers(c, j) /= counts[c];
      }
    }
    if (!moved && iter > 0) break;
  }
  run.inertia = 0.0;
  for (int i = 0; i < n; ++i)
    run.inertia += sq_dist(pts.row(i), centers.row(run.labels[i]), d);
  return run;
}

}  // namespace

HardAssignment kmeans_rows(const Matrix& points, int k, uint64_t seed, int restarts) {
  if (k < 1 || k > points.rows())
    throw validation_error("kmeans: k must lie in 1..n");
  KmeansRun best;
  for (int r = 0; r < restarts; ++r) {
    KmeansRun run = kmeans_once(points, k, seed_combine(seed, static_cast<uint64_t>(r)));
    if (run.inertia < best.inertia) best = std::move(run);
  }
  return best.labels;
}

HardAssignment spectral_partition(const Graph& g, int g_parts, uint64_t seed) {
  PartitionConfig{g_parts}.validate(g.num_nodes());
  const SparseMatrix lap = laplacian_matrix(g);
  EigOptions opt;
  opt.seed = seed;
  const auto pairs = symmetric_eigs(lap, g_parts, EigWhich::smallest, opt);
  Matrix embedding(g.num_nodes(), g_parts);
  for (int c = 0; c < g_parts; ++c)
    for (int i = 0; i < g.num_nodes(); ++i) embedding(i, c) = pairs[c].vector[i];
  return kmeans_rows(embedding, g_parts, seed_combine(seed, 0x6b6d), 20);
}

HardAssignment random_partition(int n, int g_parts, uint64_t seed) {
  if (g_parts < 1) throw validation_error("random_partition: g must be positive");
  Rng rng(seed);
  HardAssignment a(n);
  for (int i = 0; i < n; ++i) a[i] = static_cast<int>(rng.uniform_int(g_parts));
  return a;
}

HardAssignment run_external_partitioner(const ExternalPartitioner& ext, const Graph& g,
                                        int g_parts, const std::filesystem::path& workdir) {
  namespace fs = std::filesystem;
  fs::create_directories(workdir);
  const fs::path graph_path = workdir / "graph.metis";
  const fs::path out_path = workdir / "partition.out";
  write_metis(g, graph_path);
  std::string cmd = ext.command_template;
  auto replace_all = [&cmd](const std::string& from, const std::string& to) {
    for (std::size_t pos = cmd.find(from); pos != std::string::npos; pos = cmd.find(from, pos)) {
      cmd.replace(pos, from.size(), to);
      pos += to.size();
    }
  };
  replace_all("{graph}", graph_path.string());
  replace_all("{g}", std::to_string(g_parts));
  cmd += " > " + out_path.string();
  const int rc = std::system(cmd.c_str());
  if (rc != 0)
    throw io_error("external partitioner failed with status " + std::to_string(rc) + ": " + cmd);
  return load_assignment(out_path, g.num_nodes(), g_parts);
}

}  // namespace gap
