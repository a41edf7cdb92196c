#include "gap/graph_io.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <unordered_map>

#include "gap/errors.hpp"
#include "gap/fsutil.hpp"

namespace gap {

namespace {

std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream is(line);
  std::vector<std::string> out;
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

std::string strip_comment(const std::string& line, char marker) {
  const auto pos = line.find(marker);
  return pos == std::string::npos ? line : line.substr(0, pos);
}

long parse_long(const std::string& tok, const std::string& what, int line_no) {
  std::size_t used = 0;
  long v = 0;
  try {
    v = std::stol(tok, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != tok.size())
    throw validation_error("line " + std::to_string(line_no) + ": expected " + what + ", got '" +
                           tok + "'");
  return v;
}

double parse_double(const std::string& tok, const std::string& what, int line_no) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(tok, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != tok.size())
    throw validation_error("line " + std::to_string(line_no) + ": expected " + what + ", got '" +
                           tok + "'");
  return v;
}

// Collapses exact duplicates; conflicting duplicate weights are an error.
std::vector<Edge> dedup_edges(std::vector<Edge> edges) {
  for (Edge& e : edges)
    if (e.u > e.v) std::swap(e.u, e.v);
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    return a.u != b.u ? a.u < b.u : a.v < b.v;
  });
  std::vector<Edge> out;
  for (const Edge& e : edges) {
    if (!out.empty() && out.back().u == e.u && out.back().v == e.v) {
      if (out.back().w != e.w)
        throw validation_error("duplicate edge (" + std::to_string(e.u) + "," +
                               std::to_string(e.v) + ") with conflicting weights");
      continue;
    }
    out.push_back(e);
  }
  return out;
}

}  // namespace

Graph load_edge_list(const std::filesystem::path& path, bool weighted) {
  std::istringstream in(read_text_file(path));
  std::string line;
  std::vector<Edge> edges;
  int line_no = 0;
  long header_n = -1;
  int max_id = -1;
  while (std::getline(in, line)) {
    ++line_no;
    const auto toks = split_ws(strip_comment(line, '#'));
    if (toks.empty()) continue;
    if (toks[0] == "p") {
      if (toks.size() != 3 || toks[1] != "nodes")
        throw validation_error("line " + std::to_string(line_no) + ": bad header, want 'p nodes <n>'");
      header_n = parse_long(toks[2], "node count", line_no);
      if (header_n < 0) throw validation_error("line " + std::to_string(line_no) + ": negative node count");
      continue;
    }
    const bool ok_count = weighted ? (toks.size() == 2 || toks.size() == 3) : toks.size() == 2;
    if (!ok_count)
      throw validation_error("line " + std::to_string(line_no) + ": expected 'u v" +
                             std::string(weighted ? " [w]" : "") + "', got " +
                             std::to_string(toks.size()) + " fields");
    const long u = parse_long(toks[0], "node id", line_no);
    const long v = parse_long(toks[1], "node id", line_no);
    if (u < 0 || v < 0)
      throw validation_error("line " + std::to_string(line_no) + ": negative node id");
    if (u == v)
      throw validation_error("line " + std::to_string(line_no) + ": self-loop rejected");
    double w = 1.0;
    if (weighted && toks.size() == 3) {
      w = parse_double(toks[2], "edge weight", line_no);
      if (!(w > 0.0))
        throw validation_error("line " + std::to_string(line_no) + ": edge weight must be > 0");
    }
    max_id = std::max({max_id, static_cast<int>(u), static_cast<int>(v)});
    edges.push_back({static_cast<int>(u), static_cast<int>(v), w});
  }
  const int n = header_n >= 0 ? static_cast<int>(header_n) : max_id + 1;
  if (max_id >= n)
    throw validation_error("edge endpoint " + std::to_string(max_id) +
                           " out of range for declared node count " + std::to_string(n));
  return Graph(n, dedup_edges(std::move(edges)));
}

void write_edge_list(const Graph& g, const std::filesystem::path& path) {
  std::ostringstream out;
  out << "p nodes " << g.num_nodes() << "\n";
  const bool weighted =
      std::any_of(g.edges().begin(), g.edges().end(), [](const Edge& e) { return e.w != 1.0; });
  for (const Edge& e : g.edges()) {
    out << e.u << " " << e.v;
    if (weighted) out << " " << e.w;
    out << "\n";
  }
  atomic_write_text(path, out.str());
}

Graph load_metis(const std::filesystem::path& path) {
  std::istringstream in(read_text_file(path));
  std::string line;
  int line_no = 0;
  // header
  long n = 0, m = 0, fmt = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto toks = split_ws(strip_comment(line, '%'));
    if (toks.empty()) continue;
    if (toks.size() < 2 || toks.size() > 4)
      throw validation_error("metis line " + std::to_string(line_no) + ": bad header");
    n = parse_long(toks[0], "node count", line_no);
    m = parse_long(toks[1], "edge count", line_no);
    if (toks.size() >= 3) fmt = parse_long(toks[2], "fmt", line_no);
    break;
  }
  if (n < 0 || m < 0) throw validation_error("metis: negative header counts");
  if (fmt >= 10)
    throw validation_error("metis: vertex weights/sizes (fmt=" + std::to_string(fmt) +
                           ") not supported");
  const bool edge_weights = fmt % 10 == 1;
  // adjacency lines, 1-based ids
  std::vector<std::map<int, double>> adj(n);
  int node = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto toks = split_ws(strip_comment(line, '%'));
    if (node >= n) {
      if (!toks.empty())
        throw validation_error("metis line " + std::to_string(line_no) +
                               ": more adjacency lines than the declared " + std::to_string(n));
      continue;
    }
    const std::size_t stride = edge_weights ? 2 : 1;
    if (toks.size() % stride != 0)
      throw validation_error("metis line " + std::to_string(line_no) +
                             ": expected neighbor/weight pairs");
    for (std::size_t i = 0; i < toks.size(); i += stride) {
      const long nbr1 = parse_long(toks[i], "neighbor id", line_no);
      if (nbr1 < 1 || nbr1 > n)
        throw validation_error("metis line " + std::to_string(line_no) + ": neighbor " +
                               std::to_string(nbr1) + " out of range 1.." + std::to_string(n));
      const int nbr = static_cast<int>(nbr1 - 1);
      if (nbr == node)
        throw validation_error("metis line " + std::to_string(line_no) + ": self-loop rejected");
      double w = 1.0;
      if (edge_weights) {
        w = parse_double(toks[i + 1], "edge weight", line_no);
        if (!(w > 0.0))
          throw validation_error("metis line " + std::to_string(line_no) +
                                 ": edge weight must be > 0");
      }
      if (adj[node].count(nbr))
        throw validation_error("metis line " + std::to_string(line_no) + ": duplicate neighbor " +
                               std::to_string(nbr1));
      adj[node][nbr] = w;
    }
    ++node;
  }
  if (node < n)
    throw validation_error("metis: only " + std::to_string(node) + " adjacency lines for n=" +
                           std::to_string(n) + " (empty lines count for isolated nodes)");
  // symmetry check + edge extraction
  std::vector<Edge> edges;
  long endpoint_count = 0;
  for (int u = 0; u < n; ++u) {
    endpoint_count += static_cast<long>(adj[u].size());
    for (const auto& [v, w] : adj[u]) {
      const auto it = adj[v].find(u);
      if (it == adj[v].end())
        throw validation_error("metis: asymmetric adjacency, edge " + std::to_string(u + 1) +
                               "->" + std::to_string(v + 1) + " has no mirror");
      if (it->second != w)
        throw validation_error("metis: edge " + std::to_string(u + 1) + "-" +
                               std::to_string(v + 1) + " weight differs between directions");
      if (u < v) edges.push_back({u, v, w});
    }
  }
  if (endpoint_count != 2 * m)
    throw validation_error("metis: header declares m=" + std::to_string(m) + " but " +
                           std::to_string(endpoint_count / 2.0) + " edges are listed");
  return Graph(static_cast<int>(n), std::move(edges));
}

void write_metis(const Graph& g, const std::filesystem::path& path) {
  const bool weighted =
      std::any_of(g.edges().begin(), g.edges().end(), [](const Edge& e) { return e.w != 1.0; });
  std::ostringstream out;
  out << g.num_nodes() << " " << g.num_edges();
  if (weighted) out << " 001";
  out << "\n";
  for (int v = 0; v < g.num_nodes(); ++v) {
    const auto nbrs = g.neighbors(v);
    const auto ws = g.neighbor_weights(v);
    for (std::size_t i = 0; i < nbrs.size(); ++i) {
      if (i) out << " ";
      out << nbrs[i] + 1;
      if (weighted) out << " " << ws[i];
    }
    out << "\n";
  }
  atomic_write_text(path, out.str());
}

Graph load_featured_graph(const std::filesystem::path& path, const std::vector<std::string>& vocab,
                          UnknownOpPolicy policy) {
  std::istringstream in(read_text_file(path));
  std::string line;
  int line_no = 0;
  enum class Section { none, nodes, edges } section = Section::none;
  std::unordered_map<int, std::string> op_of_node;
  std::vector<Edge> edges;
  int max_id = -1;
  while (std::getline(in, line)) {
    ++line_no;
    const auto toks = split_ws(strip_comment(line, '#'));
    if (toks.empty()) continue;
    if (toks.size() == 1 && toks[0] == "nodes") {
      section = Section::nodes;
      continue;
    }
    if (toks.size() == 1 && toks[0] == "edges") {
      if (section != Section::nodes)
        throw validation_error("featured graph line " + std::to_string(line_no) +
                               ": 'edges' section before 'nodes'");
      section = Section::edges;
      continue;
    }
    if (section == Section::nodes) {
      if (toks.size() != 2)
        throw validation_error("featured graph line " + std::to_string(line_no) +
                               ": expected '<id> <op_type>'");
      const long id = parse_long(toks[0], "node id", line_no);
      if (id < 0) throw validation_error("featured graph line " + std::to_string(line_no) +
                                         ": negative node id");
      if (op_of_node.count(static_cast<int>(id)))
        throw validation_error("featured graph line " + std::to_string(line_no) +
                               ": duplicate node id " + std::to_string(id));
      op_of_node[static_cast<int>(id)] = toks[1];
      max_id = std::max(max_id, static_cast<int>(id));
    } else if (section == Section::edges) {
      if (toks.size() != 2)
        throw validation_error("featured graph line " + std::to_string(line_no) +
                               ": expected '<u> <v>'");
      const long u = parse_long(toks[0], "node id", line_no);
      const long v = parse_long(toks[1], "node id", line_no);
      if (!op_of_node.count(static_cast<int>(u)) || !op_of_node.count(static_cast<int>(v)))
        throw validation_error("featured graph line " + std::to_string(line_no) + ": edge (" +
                               std::to_string(u) + "," + std::to_string(v) +
                               ") references a node missing from the node list");
      edges.push_back({static_cast<int>(u), static_cast<int>(v), 1.0});
    } else {
      throw validation_error("featured graph line " + std::to_string(line_no) +
                             ": content before 'nodes' section");
    }
  }
  const int n = max_id + 1;
  if (static_cast<int>(op_of_node.size()) != n)
    throw validation_error("featured graph: node ids are not contiguous 0.." +
                           std::to_string(n - 1));

  std::vector<std::string> columns = vocab;
  if (columns.empty()) {
    for (const auto& [id, op] : op_of_node) columns.push_back(op);
    std::sort(columns.begin(), columns.end());
    columns.erase(std::unique(columns.begin(), columns.end()), columns.end());
  }
  std::unordered_map<std::string, int> col_of;
  for (std::size_t c = 0; c < columns.size(); ++c) col_of[columns[c]] = static_cast<int>(c);

  Matrix x(n, static_cast<int>(columns.size()));
  for (const auto& [id, op] : op_of_node) {
    auto it = col_of.find(op);
    if (it == col_of.end()) {
      if (policy == UnknownOpPolicy::strict)
        throw validation_error("featured graph: op_type '" + op +
                               "' not in the fixed vocabulary (strict mode)");
      it = col_of.find("<unk>");
      if (it == col_of.end())
        throw validation_error("featured graph: op_type '" + op +
                               "' unknown and the vocabulary has no '<unk>' column");
    }
    x(id, it->second) = 1.0;
  }
  return Graph(n, dedup_edges(std::move(edges)), std::move(x), std::move(columns));
}

void write_featured_graph(const Graph& g, const std::vector<std::string>& op_types,
                          const std::filesystem::path& path) {
  if (static_cast<int>(op_types.size()) != g.num_nodes())
    throw validation_error("write_featured_graph: one op_type per node required");
  std::ostringstream out;
  out << "nodes\n";
  for (int i = 0; i < g.num_nodes(); ++i) out << i << " " << op_types[i] << "\n";
  out << "edges\n";
  for (const Edge& e : g.edges()) out << e.u << " " << e.v << "\n";
  atomic_write_text(path, out.str());
}

std::vector<std::string> load_vocabulary(const std::filesystem::path& path) {
  std::istringstream in(read_text_file(path));
  std::vector<std::string> vocab;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    vocab.push_back(line);
  }
  while (!vocab.empty() && vocab.back().empty()) vocab.pop_back();
  for (std::size_t i = 0; i < vocab.size(); ++i)
    if (vocab[i].empty())
      throw validation_error("vocabulary: empty name at line " + std::to_string(i + 1));
  return vocab;
}

void write_vocabulary(const std::vector<std::string>& vocab, const std::filesystem::path& path) {
  std::ostringstream out;
  for (const auto& name : vocab) out << name << "\n";
  atomic_write_text(path, out.str());
}

std::vector<int> load_assignment(const std::filesystem::path& path, int num_nodes,
                                 int num_partitions) {
  std::istringstream in(read_text_file(path));
  std::vector<int> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto toks = split_ws(strip_comment(line, '#'));
    if (toks.empty()) continue;
    if (toks.size() != 1)
      throw validation_error("assignment line " + std::to_string(line_no) +
                             ": expected one partition id");
    const long p = parse_long(toks[0], "partition id", line_no);
    if (p < 0 || p >= num_partitions)
      throw validation_error("assignment line " + std::to_string(line_no) + ": partition id " +
                             std::to_string(p) + " out of range 0.." +
                             std::to_string(num_partitions - 1));
    out.push_back(static_cast<int>(p));
  }
  if (static_cast<int>(out.size()) != num_nodes)
    throw validation_error("assignment has " + std::to_string(out.size()) + " lines for " +
                           std::to_string(num_nodes) + " nodes");
  return out;
}

void write_assignment(const std::vector<int>& assignment, const std::filesystem::path& path) {
  std::ostringstream out;
  for (int p : assignment) out << p << "\n";
  atomic_write_text(path, out.str());
}

}  // namespace gap
