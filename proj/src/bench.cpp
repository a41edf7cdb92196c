#include "gap/bench.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "gap/errors.hpp"
#include "gap/metrics.hpp"

namespace gap {

namespace {

BenchStat stat_of(const std::vector<double>& xs) {
  BenchStat s;
  if (xs.empty()) return s;
  for (double x : xs) s.mean += x;
  s.mean /= xs.size();
  if (xs.size() > 1) {
    double acc = 0.0;
    for (double x : xs) acc += (x - s.mean) * (x - s.mean);
    s.sd = std::sqrt(acc / (xs.size() - 1));
  }
  return s;
}

}  // namespace

BenchReport run_benchmark(const std::vector<BenchPartitioner>& partitioners,
                          const std::vector<std::pair<std::string, const Graph*>>& graphs,
                          int g_parts, int repeats) {
  if (repeats < 1) throw validation_error("benchmark: repeats must be >= 1");
  BenchReport report;
  report.g_parts = g_parts;
  report.repeats = repeats;
  for (const auto& p : partitioners) {
    for (const auto& [gname, graph] : graphs) {
      BenchCell cell;
      cell.partitioner = p.name;
      cell.graph = gname;
      cell.train_time_ms = p.train_time_ms;
      std::vector<double> cuts, bals, times;
      for (int r = 0; r < repeats; ++r) {
        try {
          const auto t0 = std::chrono::steady_clock::now();
          const HardAssignment a = p.run(*graph, g_parts, static_cast<uint64_t>(r));
          const double ms = std::chrono::duration<double, std::milli>(
                                std::chrono::steady_clock::now() - t0)
                                .count();
          cuts.push_back(edge_cut_ratio(*graph, a));
          bals.push_back(balancedness(a, g_parts));
          times.push_back(ms);
        } catch (const std::exception& e) {
          cell.errors.push_back("repeat " + std::to_string(r) + ": " + e.what());
        }
      }
      cell.ok_repeats = static_cast<int>(cuts.size());
      cell.edge_cut_ratio = stat_of(cuts);
      cell.balancedness = stat_of(bals);
      cell.wall_clock_ms = stat_of(times);
      report.cells.push_back(std::move(cell));
    }
  }
  return report;
}

std::string BenchReport::to_tsv() const {
  std::ostringstream os;
  os << "partitioner\tgraph\tok_repeats\tedge_cut_mean\tedge_cut_sd\tbalancedness_mean"
        "\tbalancedness_sd\twall_ms_mean\twall_ms_sd\ttrain_ms\terrors\n";
  for (const auto& c : cells) {
    os << c.partitioner << "\t" << c.graph << "\t" << c.ok_repeats << "\t"
       << c.edge_cut_ratio.mean << "\t" << c.edge_cut_ratio.sd << "\t" << c.balancedness.mean
       << "\t" << c.balancedness.sd << "\t" << c.wall_clock_ms.mean << "\t" << c.wall_clock_ms.sd
       << "\t" << c.train_time_ms << "\t" << c.errors.size() << "\n";
  }
  return os.str();
}

}  // namespace gap
