#pragma once

#include <filesystem>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "gap/graph.hpp"
#include "gap/model.hpp"

namespace gap::cli {

// Declarative run configuration: JSON sections merged with command-line
// overrides (flags win). Unknown keys are rejected so typos fail loudly, and
// every command writes its resolved copy next to its outputs.
struct DatasetSection {
  std::vector<std::string> train;
  std::vector<std::string> val;
  std::string format = "auto";  // auto | edgelist | metis | featured
  bool weighted = false;
  std::string vocab;  // fixed vocabulary path for featured graphs
};

struct OutputSection {
  std::string dir = ".";
};

struct BenchPartitionerSpec {
  std::string kind;  // random | spectral | gap | external
  std::string name;
  std::string checkpoint;  // gap
  std::string command;     // external
};

struct BenchSection {
  std::vector<std::string> graphs;
  int partitions = 3;
  int repeats = 3;
  std::vector<BenchPartitionerSpec> partitioners;
};

struct RunConfig {
  DatasetSection dataset;
  ModelConfig model;
  std::string preset;  // resolved before explicit model keys apply
  TrainConfig train;
  BenchSection bench;
  OutputSection output;
};

RunConfig parse_run_config(const nlohmann::json& j);
RunConfig load_run_config(const std::filesystem::path& path);
nlohmann::json run_config_to_json(const RunConfig& cfg);

// Graph loading with format dispatch ("auto" keys off the extension:
// .metis/.graph, .fg/.featured, otherwise edge list).
Graph load_graph_file(const std::filesystem::path& path, const std::string& format,
                      bool weighted, const std::vector<std::string>& vocab);

}  // namespace gap::cli
