#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <memory>

#include "gap/embedding.hpp"
#include "gap/generators.hpp"
#include "gap/loss.hpp"
#include "gap/rng.hpp"
#include "support.hpp"

using namespace gap;

namespace {

std::shared_ptr<const SparseMatrix> ahat_of(const Graph& g) {
  return std::make_shared<SparseMatrix>(normalized_adjacency(g));
}

Matrix random_features(int n, int d, uint64_t seed) {
  Rng rng(seed);
  Matrix x(n, d);
  for (std::size_t i = 0; i < x.size(); ++i) x.data()[i] = rng.normal();
  return x;
}

}  // namespace

TEST_CASE("gcn: all-zero first-layer weights give zero embeddings") {
  Graph g = test::cycle4();
  GcnParams p = make_gcn_params(3, 5, 1, true);
  p.w0.fill(0.0);
  Tape tape;
  GcnTapeIds ids = register_gcn(tape, p, true);
  ValueId z = gcn_forward(tape, ahat_of(g), tape.input(random_features(4, 3, 2)), ids);
  for (std::size_t i = 0; i < tape.value(z).size(); ++i) CHECK(tape.value(z).data()[i] == 0.0);
}

TEST_CASE("gcn: single node with unit weights is the triple tanh of 1") {
  // Ahat = [1], X = [1], all W = [1]: Z = tanh(tanh(tanh(1))) = 0.56627...
  Graph g(1, {});
  GcnParams p;
  p.w0 = Matrix(1, 1, 1.0);
  p.w1 = Matrix(1, 1, 1.0);
  p.w2 = Matrix(1, 1, 1.0);
  Tape tape;
  GcnTapeIds ids = register_gcn(tape, p, false);
  ValueId z = gcn_forward(tape, ahat_of(g), tape.input(Matrix(1, 1, 1.0)), ids);
  CHECK(tape.value(z)(0, 0) == doctest::Approx(0.5662699759614798).epsilon(1e-12));
}

TEST_CASE("gcn embeddings always lie in (-1, 1)") {
  Graph g = generate_erdos_renyi(12, 0.3, 6);
  GcnParams p = make_gcn_params(4, 6, 3, true);
  Tape tape;
  GcnTapeIds ids = register_gcn(tape, p, true);
  ValueId z = gcn_forward(tape, ahat_of(g), tape.input(random_features(12, 4, 7)), ids);
  for (std::size_t i = 0; i < tape.value(z).size(); ++i) {
    CHECK(tape.value(z).data()[i] > -1.0);
    CHECK(tape.value(z).data()[i] < 1.0);
  }
}

TEST_CASE("gcn forward passes the finite-difference gradient check") {
  for (uint64_t seed = 0; seed < 3; ++seed) {
    Graph g = generate_erdos_renyi(8, 0.35, 80 + seed);
    GcnParams p = make_gcn_params(3, 4, seed, true);
    Tape tape;
    GcnTapeIds ids = register_gcn(tape, p, true);
    ValueId z = gcn_forward(tape, ahat_of(g), tape.input(random_features(8, 3, seed)), ids);
    ValueId y = tape.row_softmax(z);
    ValueId loss = gap_loss_node(tape, std::make_shared<SparseMatrix>(adjacency_matrix(g)), y,
                                 degree_vector(g), 4);
    CHECK(finite_difference_check(tape, loss, ids.w0, 1e-6) < 1e-4);
    CHECK(finite_difference_check(tape, loss, ids.w2, 1e-6) < 1e-4);
  }
}

TEST_CASE("sample_neighbors") {
  Graph c4 = test::cycle4();
  SUBCASE("size 0 returns the full neighborhood") {
    CHECK(sample_neighbors(c4, 0, 0, 1) == std::vector<int>{1, 3});
  }
  SUBCASE("size 1 returns exactly one neighbor") {
    const auto s = sample_neighbors(c4, 0, 1, 5);
    REQUIRE(s.size() == 1);
    CHECK((s[0] == 1 || s[0] == 3));
  }
  SUBCASE("isolated node yields an empty set") {
    Graph g(3, {{0, 1}});
    CHECK(sample_neighbors(g, 2, 0, 1).empty());
    CHECK(sample_neighbors(g, 2, 4, 1).empty());
  }
  SUBCASE("deterministic per seed") {
    Graph g = generate_erdos_renyi(30, 0.4, 3);
    for (int v = 0; v < 30; ++v)
      CHECK(sample_neighbors(g, v, 3, 11) == sample_neighbors(g, v, 3, 11));
  }
}

TEST_CASE("sage: K = 0 passes features through unchanged") {
  Graph g = test::cycle4();
  SageParams p = make_sage_params(3, 4, 0, false, SageParams::ProjectionBias::agg, 0, 1, true);
  Matrix x = random_features(4, 3, 9);
  Tape tape;
  SageTapeIds ids = register_sage(tape, p, 3, true);
  ValueId z = sage_forward(tape, g, tape.input(x), p, ids, 0);
  CHECK(tape.value(z) == x);
}

TEST_CASE("sage: nonzero output rows have unit L2 norm") {
  Graph g = generate_erdos_renyi(10, 0.3, 4);
  SageParams p = make_sage_params(3, 5, 2, false, SageParams::ProjectionBias::agg, 0, 2, true);
  Tape tape;
  SageTapeIds ids = register_sage(tape, p, 3, true);
  ValueId z = sage_forward(tape, g, tape.input(random_features(10, 3, 5)), p, ids, 0);
  const Matrix& zv = tape.value(z);
  for (int i = 0; i < zv.rows(); ++i) {
    double norm = 0.0;
    for (int j = 0; j < zv.cols(); ++j) norm += zv(i, j) * zv(i, j);
    norm = std::sqrt(norm);
    if (norm > 1e-9) CHECK(norm == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("sage: structurally symmetric C4 nodes with identical features match") {
  Graph g = test::cycle4();
  SageParams p = make_sage_params(2, 4, 2, false, SageParams::ProjectionBias::agg, 0, 3, true);
  Matrix x(4, 2);
  // Nodes 0 and 2 share features, and so do 1 and 3: the square's
  // automorphism 0<->2 fixes the feature assignment.
  x(0, 0) = 1.0;
  x(2, 0) = 1.0;
  x(1, 1) = 1.0;
  x(3, 1) = 1.0;
  Tape tape;
  SageTapeIds ids = register_sage(tape, p, 2, true);
  ValueId z = sage_forward(tape, g, tape.input(x), p, ids, 0);
  const Matrix& zv = tape.value(z);
  for (int j = 0; j < zv.cols(); ++j) {
    CHECK(zv(0, j) == zv(2, j));
    CHECK(zv(1, j) == zv(3, j));
  }
}

TEST_CASE("sage forward passes the finite-difference gradient check") {
  for (uint64_t seed = 0; seed < 3; ++seed) {
    Graph g = generate_erdos_renyi(8, 0.4, 90 + seed);
    SageParams p =
        make_sage_params(3, 4, 2, false, SageParams::ProjectionBias::agg, 0, seed, true);
    Tape tape;
    SageTapeIds ids = register_sage(tape, p, 3, true);
    ValueId z = sage_forward(tape, g, tape.input(random_features(8, 3, 50 + seed)), p, ids, 0);
    ValueId y = tape.row_softmax(z);
    ValueId loss = gap_loss_node(tape, std::make_shared<SparseMatrix>(adjacency_matrix(g)), y,
                                 degree_vector(g), 4);
    CHECK(finite_difference_check(tape, loss, ids.w_proj[0], 1e-6) < 1e-4);
    CHECK(finite_difference_check(tape, loss, ids.w_agg[1], 1e-6) < 1e-4);
    CHECK(finite_difference_check(tape, loss, ids.b_agg[0], 1e-6) < 1e-4);
  }
}

TEST_CASE("permutation equivariance of both embeddings (sampling = all)") {
  Graph g = generate_erdos_renyi(9, 0.4, 14);
  const int perm[9] = {3, 7, 0, 5, 8, 1, 4, 2, 6};
  std::vector<Edge> pedges;
  for (const Edge& e : g.edges()) pedges.push_back({perm[e.u], perm[e.v], e.w});
  Graph pg(9, pedges);
  Matrix x = random_features(9, 3, 15);
  Matrix px(9, 3);
  for (int i = 0; i < 9; ++i)
    for (int j = 0; j < 3; ++j) px(perm[i], j) = x(i, j);

  SUBCASE("gcn") {
    GcnParams p = make_gcn_params(3, 4, 21, true);
    Tape t1, t2;
    GcnTapeIds i1 = register_gcn(t1, p, false);
    GcnTapeIds i2 = register_gcn(t2, p, false);
    const Matrix& z = t1.value(gcn_forward(t1, ahat_of(g), t1.input(x), i1));
    const Matrix& pz = t2.value(gcn_forward(t2, ahat_of(pg), t2.input(px), i2));
    for (int i = 0; i < 9; ++i)
      for (int j = 0; j < 4; ++j)
        CHECK(pz(perm[i], j) == doctest::Approx(z(i, j)).epsilon(1e-12));
  }
  SUBCASE("sage") {
    SageParams p =
        make_sage_params(3, 4, 2, false, SageParams::ProjectionBias::agg, 0, 22, true);
    Tape t1, t2;
    SageTapeIds i1 = register_sage(t1, p, 3, false);
    SageTapeIds i2 = register_sage(t2, p, 3, false);
    const Matrix& z = t1.value(sage_forward(t1, g, t1.input(x), p, i1, 0));
    const Matrix& pz = t2.value(sage_forward(t2, pg, t2.input(px), p, i2, 0));
    for (int i = 0; i < 9; ++i)
      for (int j = 0; j < 4; ++j)
        CHECK(pz(perm[i], j) == doctest::Approx(z(i, j)).epsilon(1e-12));
  }
}

TEST_CASE("sage sampling: deterministic per seed, varies across seeds") {
  Graph g = generate_erdos_renyi(20, 0.5, 33);
  SageParams p = make_sage_params(3, 4, 2, false, SageParams::ProjectionBias::agg, 2, 5, true);
  Matrix x = random_features(20, 3, 44);
  auto run = [&](uint64_t seed) {
    Tape tape;
    SageTapeIds ids = register_sage(tape, p, 3, false);
    return tape.value(sage_forward(tape, g, tape.input(x), p, ids, seed));
  };
  CHECK(run(7) == run(7));
  CHECK(!(run(7) == run(8)));
}

TEST_CASE("shared pooling uses one aggregation pair for the uniform-width steps") {
  SageParams p = make_sage_params(10, 4, 3, true, SageParams::ProjectionBias::agg, 0, 6, true);
  // Step 0 runs at width 10 (its own pair); steps 1 and 2 share one 4x4 pair.
  CHECK(p.w_agg.size() == 2);
  CHECK(p.agg_of_step == std::vector<int>{0, 1, 1});
  SageParams q = make_sage_params(4, 4, 3, true, SageParams::ProjectionBias::agg, 0, 6, true);
  CHECK(q.w_agg.size() == 1);  // widths all match: fully shared
  CHECK(q.agg_of_step == std::vector<int>{0, 0, 0});
}

TEST_CASE("projection bias mode: printed formula reuses the aggregation bias") {
  // At uniform width the agg mode must tie the projection line to b_agg:
  // perturbing b_agg changes the output even with b_proj zeroed.
  Graph g = test::cycle4();
  Matrix x = random_features(4, 4, 3);
  SageParams p = make_sage_params(4, 4, 1, false, SageParams::ProjectionBias::agg, 0, 8, true);
  auto run = [&](const SageParams& params) {
    Tape tape;
    SageTapeIds ids = register_sage(tape, params, 4, false);
    return tape.value(sage_forward(tape, g, tape.input(x), params, ids, 0));
  };
  const Matrix base = run(p);
  SageParams shifted = p;
  shifted.b_agg[0].fill(0.8);
  CHECK(!(run(shifted) == base));

  // proj mode: shifting b_agg still changes messages, but shifting b_proj
  // matters only in proj mode.
  SageParams proj_mode = p;
  proj_mode.projection_bias = SageParams::ProjectionBias::proj;
  const Matrix proj_base = run(proj_mode);
  SageParams proj_shifted = proj_mode;
  proj_shifted.b_proj[0].fill(0.8);
  CHECK(!(run(proj_shifted) == proj_base));
  SageParams agg_bproj_shifted = p;
  agg_bproj_shifted.b_proj[0].fill(0.8);
  CHECK(run(agg_bproj_shifted) == base);  // unused in agg mode at uniform width
}
