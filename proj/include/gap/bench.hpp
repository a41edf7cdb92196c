#pragma once

#include <functional>
#include <string>
#include <vector>

#include "gap/graph.hpp"
#include "gap/loss.hpp"

namespace gap {

struct BenchPartitioner {
  std::string name;
  std::function<HardAssignment(const Graph&, int g_parts, uint64_t seed)> run;
  // Filled for GAP entries so reports separate inference time from the
  // one-off training cost.
  double train_time_ms = 0.0;
};

struct BenchStat {
  double mean = 0.0;
  double sd = 0.0;
};

struct BenchCell {
  std::string partitioner;
  std::string graph;
  int ok_repeats = 0;
  BenchStat edge_cut_ratio;
  BenchStat balancedness;
  BenchStat wall_clock_ms;
  double train_time_ms = 0.0;
  std::vector<std::string> errors;  // per-repeat failures; the run continues
};

struct BenchReport {
  int g_parts = 0;
  int repeats = 0;
  std::vector<BenchCell> cells;

  std::string to_tsv() const;
};

// One cell per (partitioner, graph); each repeat r calls run(graph, g, r)
// under a monotonic clock. Failures are recorded in the cell and the sweep
// continues.
BenchReport run_benchmark(const std::vector<BenchPartitioner>& partitioners,
                          const std::vector<std::pair<std::string, const Graph*>>& graphs,
                          int g_parts, int repeats);

}  // namespace gap
