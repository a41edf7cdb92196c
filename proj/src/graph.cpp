#include "gap/graph.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "gap/errors.hpp"

namespace gap {

Graph::Graph(int num_nodes, std::vector<Edge> edges) : num_nodes_(num_nodes) {
  if (num_nodes < 0) throw validation_error("graph: node count must be nonnegative");
  edges_.reserve(edges.size());
  for (Edge e : edges) {
    if (e.u == e.v)
      throw validation_error("graph: self-loop at node " + std::to_string(e.u) + " rejected");
    if (e.u < 0 || e.v < 0 || e.u >= num_nodes || e.v >= num_nodes)
      throw validation_error("graph: edge (" + std::to_string(e.u) + "," + std::to_string(e.v) +
                             ") endpoint out of range for n=" + std::to_string(num_nodes));
    if (!(e.w > 0.0) || !std::isfinite(e.w))
      throw validation_error("graph: edge (" + std::to_string(e.u) + "," + std::to_string(e.v) +
                             ") weight must be positive and finite");
    if (e.u > e.v) std::swap(e.u, e.v);
    edges_.push_back(e);
  }
  std::sort(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) {
    return a.u != b.u ? a.u < b.u : a.v < b.v;
  });
  for (std::size_t i = 1; i < edges_.size(); ++i)
    if (edges_[i].u == edges_[i - 1].u && edges_[i].v == edges_[i - 1].v)
      throw validation_error("graph: duplicate edge (" + std::to_string(edges_[i].u) + "," +
                             std::to_string(edges_[i].v) + ")");
  for (const Edge& e : edges_) total_weight_ += e.w;
  build_adjacency();
}

Graph::Graph(int num_nodes, std::vector<Edge> edges, Matrix node_features,
             std::vector<std::string> feature_names)
    : Graph(num_nodes, std::move(edges)) {
  if (node_features.rows() != num_nodes)
    throw validation_error("graph: feature matrix has " + std::to_string(node_features.rows()) +
                           " rows for " + std::to_string(num_nodes) + " nodes");
  if (!feature_names.empty() &&
      static_cast<int>(feature_names.size()) != node_features.cols())
    throw validation_error("graph: feature name count does not match feature width");
  node_features_ = std::move(node_features);
  feature_names_ = std::move(feature_names);
}

const Matrix& Graph::node_features() const {
  if (!node_features_) throw validation_error("graph: no node features present");
  return *node_features_;
}

Graph Graph::with_features(Matrix features, std::vector<std::string> names) const {
  return Graph(num_nodes_, edges_, std::move(features), std::move(names));
}

void Graph::build_adjacency() {
  adj_ptr_.assign(num_nodes_ + 1, 0);
  for (const Edge& e : edges_) {
    ++adj_ptr_[e.u + 1];
    ++adj_ptr_[e.v + 1];
  }
  for (int i = 0; i < num_nodes_; ++i) adj_ptr_[i + 1] += adj_ptr_[i];
  adj_nodes_.resize(edges_.size() * 2);
  adj_weights_.resize(edges_.size() * 2);
  std::vector<int> cursor(adj_ptr_.begin(), adj_ptr_.end() - 1);
  for (const Edge& e : edges_) {
    adj_nodes_[cursor[e.u]] = e.v;
    adj_weights_[cursor[e.u]++] = e.w;
    adj_nodes_[cursor[e.v]] = e.u;
    adj_weights_[cursor[e.v]++] = e.w;
  }
  // Edges are sorted by (u,v), so each u-side list is already ascending; the
  // v-side entries interleave and need a per-row sort.
  for (int v = 0; v < num_nodes_; ++v) {
    const int lo = adj_ptr_[v], hi = adj_ptr_[v + 1];
    std::vector<std::pair<int, double>> row;
    row.reserve(hi - lo);
    for (int p = lo; p < hi; ++p) row.emplace_back(adj_nodes_[p], adj_weights_[p]);
    std::sort(row.begin(), row.end());
    for (int p = lo; p < hi; ++p) {
      adj_nodes_[p] = row[p - lo].first;
      adj_weights_[p] = row[p - lo].second;
    }
  }
}

void PartitionConfig::validate(int num_nodes) const {
  if (num_partitions < 2)
    throw validation_error("partition count must be at least 2, got " +
                           std::to_string(num_partitions));
  if (num_partitions > num_nodes)
    throw validation_error("partition count " + std::to_string(num_partitions) +
                           " exceeds node count " + std::to_string(num_nodes));
}

std::vector<double> degree_vector(const Graph& g) {
  std::vector<double> deg(g.num_nodes(), 0.0);
  for (const Edge& e : g.edges()) {
    deg[e.u] += e.w;
    deg[e.v] += e.w;
  }
  return deg;
}

SparseMatrix adjacency_matrix(const Graph& g) {
  std::vector<Triplet> trips;
  trips.reserve(g.num_edges() * 2);
  for (const Edge& e : g.edges()) {
    trips.push_back({e.u, e.v, e.w});
    trips.push_back({e.v, e.u, e.w});
  }
  return SparseMatrix(g.num_nodes(), g.num_nodes(), std::move(trips));
}

SparseMatrix normalized_adjacency(const Graph& g) {
  const int n = g.num_nodes();
  std::vector<double> dtilde(n, 1.0);  // self-connection contributes 1
  for (const Edge& e : g.edges()) {
    dtilde[e.u] += e.w;
    dtilde[e.v] += e.w;
  }
  std::vector<double> inv_sqrt(n);
  for (int i = 0; i < n; ++i) inv_sqrt[i] = 1.0 / std::sqrt(dtilde[i]);
  std::vector<Triplet> trips;
  trips.reserve(g.num_edges() * 2 + n);
  for (int i = 0; i < n; ++i) trips.push_back({i, i, inv_sqrt[i] * inv_sqrt[i]});
  for (const Edge& e : g.edges()) {
    const double v = e.w * inv_sqrt[e.u] * inv_sqrt[e.v];
    trips.push_back({e.u, e.v, v});
    trips.push_back({e.v, e.u, v});
  }
  return SparseMatrix(n, n, std::move(trips));
}

SparseMatrix laplacian_matrix(const Graph& g) {
  const int n = g.num_nodes();
  const std::vector<double> deg = degree_vector(g);
  std::vector<Triplet> trips;
  trips.reserve(g.num_edges() * 2 + n);
  for (int i = 0; i < n; ++i)
    if (deg[i] != 0.0) trips.push_back({i, i, deg[i]});
  for (const Edge& e : g.edges()) {
    trips.push_back({e.u, e.v, -e.w});
    trips.push_back({e.v, e.u, -e.w});
  }
  return SparseMatrix(n, n, std::move(trips));
}

}  // namespace gap
