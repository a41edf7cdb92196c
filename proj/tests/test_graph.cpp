#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "gap/errors.hpp"
#include "gap/fsutil.hpp"
#include "gap/generators.hpp"
#include "gap/graph.hpp"
#include "gap/graph_io.hpp"
#include "gap/pca.hpp"
#include "support.hpp"

using namespace gap;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) {
  return fs::temp_directory_path() / ("gap_graph_test_" + name);
}

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p);
  out << content;
}

}  // namespace

TEST_CASE("graph invariants") {
  CHECK_THROWS_AS(Graph(3, {{0, 0}}), validation_error);          // self-loop
  CHECK_THROWS_AS(Graph(2, {{0, 5}}), validation_error);          // out of range
  CHECK_THROWS_AS(Graph(3, {{0, 1, -1.0}}), validation_error);    // bad weight
  CHECK_THROWS_AS(Graph(3, {{0, 1}, {1, 0}}), validation_error);  // duplicate

  Graph g(3, {{2, 0}, {1, 2}});
  CHECK(g.edges()[0].u == 0);  // canonical u < v, sorted
  CHECK(g.edges()[0].v == 2);
  CHECK(g.num_edges() == 2);
  auto nb = g.neighbors(2);
  REQUIRE(nb.size() == 2);
  CHECK(nb[0] == 0);
  CHECK(nb[1] == 1);
}

TEST_CASE("degree vector hand counts") {
  CHECK(degree_vector(test::cycle4()) == std::vector<double>{2, 2, 2, 2});
  CHECK(degree_vector(test::path4()) == std::vector<double>{1, 2, 2, 1});
  Graph weighted(2, {{0, 1, 2.5}});
  CHECK(degree_vector(weighted) == std::vector<double>{2.5, 2.5});
}

TEST_CASE("degree sum equals twice total weight") {
  for (uint64_t seed = 0; seed < 5; ++seed) {
    Graph g = generate_erdos_renyi(60, 0.15, seed);
    double sum = 0.0;
    for (double d : degree_vector(g)) sum += d;
    CHECK(sum == doctest::Approx(2.0 * g.total_edge_weight()).epsilon(1e-12));
  }
}

TEST_CASE("normalized adjacency examples") {
  SUBCASE("single node") {
    const auto ahat = normalized_adjacency(Graph(1, {}));
    CHECK(ahat.to_dense()(0, 0) == doctest::Approx(1.0));
  }
  SUBCASE("K2") {
    const auto d = normalized_adjacency(test::k2()).to_dense();
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) CHECK(d(i, j) == doctest::Approx(0.5));
  }
  SUBCASE("C4: every nonzero entry 1/3") {
    const auto ahat = normalized_adjacency(test::cycle4());
    for (int r = 0; r < 4; ++r)
      for (double v : ahat.row_values(r)) CHECK(v == doctest::Approx(1.0 / 3.0));
  }
}

TEST_CASE("normalized adjacency structure on random graphs") {
  for (uint64_t seed = 1; seed <= 3; ++seed) {
    Graph g = generate_erdos_renyi(40, 0.12, seed);
    const auto deg = degree_vector(g);
    const auto ahat = normalized_adjacency(g);
    CHECK(ahat.is_symmetric());
    const auto dense = ahat.to_dense();
    for (const Edge& e : g.edges())
      CHECK(dense(e.u, e.v) ==
            doctest::Approx(1.0 / std::sqrt((deg[e.u] + 1) * (deg[e.v] + 1))).epsilon(1e-12));
    for (int i = 0; i < g.num_nodes(); ++i)
      CHECK(dense(i, i) == doctest::Approx(1.0 / (deg[i] + 1)).epsilon(1e-12));
    // row i nonzeros are exactly N(i) plus the diagonal
    for (int i = 0; i < g.num_nodes(); ++i)
      CHECK(ahat.row_cols(i).size() == g.neighbors(i).size() + 1);
  }
}

TEST_CASE("edge list ingestion") {
  const auto p = temp_file("basic.el");
  write_file(p, "# comment\n0 1\n1 2\n");
  Graph g = load_edge_list(p, false);
  CHECK(g.num_nodes() == 3);
  CHECK(g.num_edges() == 2);

  write_file(p, "0 1 2.5\n");
  CHECK(load_edge_list(p, true).edges()[0].w == doctest::Approx(2.5));

  write_file(p, "0 0\n");
  CHECK_THROWS_WITH_AS(load_edge_list(p, false), doctest::Contains("self-loop"),
                       validation_error);

  write_file(p, "0 1\nbogus line here and more\n");
  CHECK_THROWS_WITH_AS(load_edge_list(p, false), doctest::Contains("line 2"), validation_error);

  write_file(p, "p nodes 5\n0 1\n");
  CHECK(load_edge_list(p, false).num_nodes() == 5);

  write_file(p, "p nodes 2\n0 3\n");
  CHECK_THROWS_AS(load_edge_list(p, false), validation_error);

  write_file(p, "0 1 -2\n");
  CHECK_THROWS_AS(load_edge_list(p, true), validation_error);

  // exact duplicates collapse, conflicting weights are an error
  write_file(p, "0 1 2\n1 0 2\n");
  CHECK(load_edge_list(p, true).num_edges() == 1);
  write_file(p, "0 1 2\n1 0 3\n");
  CHECK_THROWS_AS(load_edge_list(p, true), validation_error);
  fs::remove(p);
}

TEST_CASE("metis ingestion") {
  const auto p = temp_file("basic.metis");
  SUBCASE("path graph") {
    write_file(p, "4 3\n2\n1 3\n2 4\n3\n");
    Graph g = load_metis(p);
    CHECK(g.num_nodes() == 4);
    REQUIRE(g.num_edges() == 3);
    CHECK(g.edges()[0].u == 0);
    CHECK(g.edges()[0].v == 1);
  }
  SUBCASE("edge count mismatch") {
    write_file(p, "4 5\n2\n1 3\n2 4\n3\n");
    CHECK_THROWS_WITH_AS(load_metis(p), doctest::Contains("m=5"), validation_error);
  }
  SUBCASE("isolated node accepted") {
    write_file(p, "3 1\n2\n1\n\n");
    Graph g = load_metis(p);
    CHECK(g.num_nodes() == 3);
    CHECK(g.degree(2) == 0);
  }
  SUBCASE("asymmetric adjacency") {
    write_file(p, "3 2\n2 3\n1\n\n");
    CHECK_THROWS_WITH_AS(load_metis(p), doctest::Contains("asymmetric"), validation_error);
  }
  fs::remove(p);
}

TEST_CASE("metis round trip reproduces the canonical edge set") {
  for (uint64_t seed : {7u, 8u}) {
    Graph g = generate_erdos_renyi(50, 0.1, seed);
    const auto p = temp_file("roundtrip.metis");
    write_metis(g, p);
    Graph back = load_metis(p);
    REQUIRE(back.num_nodes() == g.num_nodes());
    REQUIRE(back.num_edges() == g.num_edges());
    for (std::size_t i = 0; i < g.num_edges(); ++i) {
      CHECK(back.edges()[i].u == g.edges()[i].u);
      CHECK(back.edges()[i].v == g.edges()[i].v);
    }
    fs::remove(p);
  }
}

TEST_CASE("weighted metis round trip keeps fmt and weights") {
  Graph g(3, {{0, 1, 2.5}, {1, 2, 1.5}});
  const auto p = temp_file("weighted.metis");
  write_metis(g, p);
  CHECK(read_text_file(p).substr(0, 7) == "3 2 001");
  Graph back = load_metis(p);
  CHECK(back.edges()[0].w == doctest::Approx(2.5));
  CHECK(back.edges()[1].w == doctest::Approx(1.5));
  fs::remove(p);
}

TEST_CASE("edge list round trip preserves isolated trailing nodes") {
  Graph g(6, {{0, 1}, {2, 3}});
  const auto p = temp_file("header.el");
  write_edge_list(g, p);
  CHECK(load_edge_list(p, false).num_nodes() == 6);
  fs::remove(p);
}

TEST_CASE("featured graph one-hot encoding") {
  const auto p = temp_file("featured.fg");
  write_file(p, "nodes\n0 MatMul\n1 Add\nedges\n0 1\n");

  SUBCASE("fixed vocabulary controls column order") {
    Graph g = load_featured_graph(p, {"Add", "Conv2d", "MatMul"});
    REQUIRE(g.node_features().cols() == 3);
    CHECK(g.node_features()(0, 2) == 1.0);
    CHECK(g.node_features()(1, 0) == 1.0);
    CHECK(g.node_features()(0, 0) == 0.0);
    CHECK(g.feature_names() == std::vector<std::string>{"Add", "Conv2d", "MatMul"});
  }
  SUBCASE("derived vocabulary is sorted") {
    Graph g = load_featured_graph(p);
    CHECK(g.feature_names() == std::vector<std::string>{"Add", "MatMul"});
  }
  SUBCASE("shared vocabulary gives identical columns across files") {
    const auto p2 = temp_file("featured2.fg");
    write_file(p2, "nodes\n0 Add\n1 Add\n2 MatMul\nedges\n0 1\n1 2\n");
    const std::vector<std::string> vocab{"Add", "Conv2d", "MatMul"};
    Graph g1 = load_featured_graph(p, vocab);
    Graph g2 = load_featured_graph(p2, vocab);
    CHECK(g1.feature_names() == g2.feature_names());
    CHECK(g2.node_features()(2, 2) == 1.0);
    fs::remove(p2);
  }
  SUBCASE("unknown op in strict mode") {
    CHECK_THROWS_WITH_AS(load_featured_graph(p, {"Add", "Conv2d"}),
                         doctest::Contains("MatMul"), validation_error);
  }
  SUBCASE("unknown op maps to <unk> when allowed") {
    Graph g = load_featured_graph(p, {"Add", "<unk>"}, UnknownOpPolicy::map_unk);
    CHECK(g.node_features()(0, 1) == 1.0);  // MatMul -> <unk>
  }
  SUBCASE("edge referencing a missing node") {
    const auto p3 = temp_file("featured3.fg");
    write_file(p3, "nodes\n0 Add\nedges\n0 4\n");
    CHECK_THROWS_WITH_AS(load_featured_graph(p3), doctest::Contains("missing"),
                         validation_error);
    fs::remove(p3);
  }
  fs::remove(p);
}

TEST_CASE("vocabulary file round trip") {
  const auto p = temp_file("vocab.txt");
  const std::vector<std::string> vocab{"Add", "Conv2d", "MatMul"};
  write_vocabulary(vocab, p);
  CHECK(load_vocabulary(p) == vocab);
  fs::remove(p);
}

TEST_CASE("erdos-renyi generator") {
  SUBCASE("p=0 gives an empty edge set") {
    CHECK(generate_erdos_renyi(30, 0.0, 1).num_edges() == 0);
  }
  SUBCASE("determinism") {
    Graph a = generate_erdos_renyi(50, 0.2, 42);
    Graph b = generate_erdos_renyi(50, 0.2, 42);
    REQUIRE(a.num_edges() == b.num_edges());
    for (std::size_t i = 0; i < a.num_edges(); ++i) {
      CHECK(a.edges()[i].u == b.edges()[i].u);
      CHECK(a.edges()[i].v == b.edges()[i].v);
    }
    CHECK(generate_erdos_renyi(50, 0.2, 43).num_edges() != a.num_edges());
  }
  SUBCASE("n=1000 edge count within 3 sd of the binomial mean") {
    const double mean = 999.0 * 1000.0 / 2.0 * 0.1;
    const double sd = std::sqrt(mean * 0.9);
    const double count = static_cast<double>(generate_erdos_renyi(1000, 0.1, 9).num_edges());
    CHECK(std::abs(count - mean) < 3.0 * sd);
  }
  SUBCASE("mean edge count over 20 seeds within 2% at n=200") {
    double total = 0.0;
    for (uint64_t seed = 0; seed < 20; ++seed)
      total += static_cast<double>(generate_erdos_renyi(200, 0.1, seed).num_edges());
    const double mean = total / 20.0;
    const double expected = 199.0 * 200.0 / 2.0 * 0.1;
    CHECK(std::abs(mean - expected) / expected < 0.02);
  }
  SUBCASE("parameter validation") {
    CHECK_THROWS_AS(generate_erdos_renyi(10, 1.5, 0), validation_error);
  }
}

TEST_CASE("scale-free generator") {
  SUBCASE("n=4, attach_m=3 is the complete graph K4") {
    Graph g = generate_scale_free(4, 5, 3);
    CHECK(g.num_edges() == 6);
  }
  SUBCASE("determinism") {
    Graph a = generate_scale_free(200, 11, 2);
    Graph b = generate_scale_free(200, 11, 2);
    REQUIRE(a.num_edges() == b.num_edges());
    for (std::size_t i = 0; i < a.num_edges(); ++i) {
      CHECK(a.edges()[i].u == b.edges()[i].u);
      CHECK(a.edges()[i].v == b.edges()[i].v);
    }
  }
  SUBCASE("heavy tail: max degree at least 5x mean degree over 5 seeds") {
    for (uint64_t seed = 0; seed < 5; ++seed) {
      Graph g = generate_scale_free(1000, seed, 2);
      const auto deg = degree_vector(g);
      double mean = 0.0, mx = 0.0;
      for (double d : deg) {
        mean += d;
        mx = std::max(mx, d);
      }
      mean /= deg.size();
      CHECK(mx >= 5.0 * mean);
    }
  }
  SUBCASE("parameter validation") {
    CHECK_THROWS_AS(generate_scale_free(3, 0, 3), validation_error);
  }
}

TEST_CASE("pca features") {
  SUBCASE("output has exactly dim columns") {
    Graph g = generate_erdos_renyi(20, 0.3, 3);
    CHECK(pca_features(g, 7).cols() == 7);
    CHECK(pca_features(g, 7).rows() == 20);
  }
  SUBCASE("dim > n zero-pads on the right") {
    Graph g = test::cycle4();
    Matrix f = pca_features(g, 6);
    REQUIRE(f.cols() == 6);
    for (int i = 0; i < 4; ++i)
      for (int c = 4; c < 6; ++c) CHECK(f(i, c) == 0.0);
  }
  SUBCASE("edgeless graph gives all-zero features") {
    Matrix f = pca_features(Graph(5, {}), 3);
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 3; ++j) CHECK(f(i, j) == doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("dim = 0 rejected") {
    CHECK_THROWS_AS(pca_features(test::cycle4(), 0), validation_error);
  }
  SUBCASE("C4 reconstruction error: 2 components <= 1 component, matches dense oracle") {
    // Oracle route: Jacobi eigendecomposition of the centered covariance.
    Graph g = test::cycle4();
    const Matrix a = adjacency_matrix(g).to_dense();
    Matrix x(4, 4);
    for (int j = 0; j < 4; ++j) {
      double mu = 0.0;
      for (int i = 0; i < 4; ++i) mu += a(i, j);
      mu /= 4.0;
      for (int i = 0; i < 4; ++i) x(i, j) = a(i, j) - mu;
    }
    const Matrix cov = matmul_at(x, x);
    std::vector<double> evals;
    Matrix evecs;
    test::jacobi_eig(cov, evals, evecs);
    const double total = frobenius_norm(x) * frobenius_norm(x);
    // Reconstruction error^2 with k components = ||X||^2 - sum of top-k eigenvalues.
    const double oracle_err1 = total - evals[3];
    const double oracle_err2 = total - evals[3] - evals[2];
    CHECK(oracle_err2 <= oracle_err1 + 1e-9);

    // Implementation route: ||X||^2 - ||F_k||^2 for orthonormal directions.
    const Matrix f2 = pca_features(g, 2);
    const Matrix f1 = pca_features(g, 1);
    const double impl_err1 = total - frobenius_norm(f1) * frobenius_norm(f1);
    const double impl_err2 = total - frobenius_norm(f2) * frobenius_norm(f2);
    CHECK(impl_err2 <= impl_err1 + 1e-9);
    CHECK(impl_err1 == doctest::Approx(oracle_err1).epsilon(1e-6));
    CHECK(impl_err2 == doctest::Approx(oracle_err2).epsilon(1e-6));
  }
}

TEST_CASE("partition config validation") {
  CHECK_THROWS_AS(PartitionConfig{1}.validate(5), validation_error);
  CHECK_THROWS_AS(PartitionConfig{6}.validate(5), validation_error);
  CHECK_NOTHROW(PartitionConfig{2}.validate(5));
}
