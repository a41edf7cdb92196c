#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "gap/graph.hpp"

namespace gap {

// Edge-list format: `u v [w]` per line, `#` comments, optional header line
// `p nodes <n>`. Node count defaults to max id + 1. Exact duplicate edges
// collapse; duplicates with conflicting weights are an error.
Graph load_edge_list(const std::filesystem::path& path, bool weighted);
void write_edge_list(const Graph& g, const std::filesystem::path& path);

// Standard METIS format: header `n m [fmt]`, then line i lists the 1-based
// neighbors of node i (with per-edge weights when fmt has the edge-weight
// bit). The writer emits the fmt field only for weighted graphs.
Graph load_metis(const std::filesystem::path& path);
void write_metis(const Graph& g, const std::filesystem::path& path);

enum class UnknownOpPolicy {
  strict,   // unknown op_type under a fixed vocabulary is an error
  map_unk,  // unknown op_types map to the reserved "<unk>" column
};

// Featured-graph format: a `nodes` section of `id op_type` lines followed by
// an `edges` section of `u v` lines; `#` comments allowed. Features are
// one-hot over the sorted vocabulary of op_types present, or over `vocab`
// when given (column order = vocabulary order, shared across graphs).
Graph load_featured_graph(const std::filesystem::path& path,
                          const std::vector<std::string>& vocab = {},
                          UnknownOpPolicy policy = UnknownOpPolicy::strict);
void write_featured_graph(const Graph& g, const std::vector<std::string>& op_types,
                          const std::filesystem::path& path);

// Vocabulary file: one feature name per line; line index = column index.
std::vector<std::string> load_vocabulary(const std::filesystem::path& path);
void write_vocabulary(const std::vector<std::string>& vocab, const std::filesystem::path& path);

// Assignment file: one partition id per line.
std::vector<int> load_assignment(const std::filesystem::path& path, int num_nodes,
                                 int num_partitions);
void write_assignment(const std::vector<int>& assignment, const std::filesystem::path& path);

}  // namespace gap
