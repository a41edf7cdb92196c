#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gap/matrix.hpp"
#include "gap/sparse.hpp"

namespace gap {

struct Edge {
  int u;
  int v;
  double w = 1.0;
};

// Undirected weighted graph, immutable after construction and safe to share
// across threads. Each edge is stored once with u < v; self-loops are
// rejected here and appear only inside the normalized adjacency, which adds
// them explicitly.
class Graph {
public:
  Graph() = default;
  Graph(int num_nodes, std::vector<Edge> edges);
  Graph(int num_nodes, std::vector<Edge> edges, Matrix node_features,
        std::vector<std::string> feature_names);

  int num_nodes() const { return num_nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }
  std::size_t num_edges() const { return edges_.size(); }
  double total_edge_weight() const { return total_weight_; }
  bool undirected() const { return true; }

  bool has_features() const { return node_features_.has_value(); }
  const Matrix& node_features() const;
  const std::vector<std::string>& feature_names() const { return feature_names_; }
  Graph with_features(Matrix features, std::vector<std::string> names) const;

  // Neighbors of v in ascending id order.
  std::span<const int> neighbors(int v) const {
    return {adj_nodes_.data() + adj_ptr_[v], adj_nodes_.data() + adj_ptr_[v + 1]};
  }
  std::span<const double> neighbor_weights(int v) const {
    return {adj_weights_.data() + adj_ptr_[v], adj_weights_.data() + adj_ptr_[v + 1]};
  }
  int degree(int v) const { return adj_ptr_[v + 1] - adj_ptr_[v]; }

private:
  void build_adjacency();

  int num_nodes_ = 0;
  std::vector<Edge> edges_;  // canonical: u < v, sorted, unique
  double total_weight_ = 0.0;
  std::optional<Matrix> node_features_;
  std::vector<std::string> feature_names_;
  std::vector<int> adj_ptr_;
  std::vector<int> adj_nodes_;
  std::vector<double> adj_weights_;
};

struct PartitionConfig {
  int num_partitions = 2;  // g
  void validate(int num_nodes) const;
};

// Weighted degree per node; sums to 2 * total edge weight.
std::vector<double> degree_vector(const Graph& g);

// A with no self-loops, symmetric, both (u,v) and (v,u) stored.
SparseMatrix adjacency_matrix(const Graph& g);

// Ahat = Dtilde^{-1/2} (A + I) Dtilde^{-1/2}; isolated nodes get entry 1.
SparseMatrix normalized_adjacency(const Graph& g);

// L = diag(D) - A.
SparseMatrix laplacian_matrix(const Graph& g);

}  // namespace gap
