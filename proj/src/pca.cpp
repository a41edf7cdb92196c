#include "gap/pca.hpp"

#include <vector>

#include "gap/eigs.hpp"
#include "gap/errors.hpp"

namespace gap {

Matrix pca_features(const Graph& g, int dim, uint64_t seed) {
  if (dim < 1) throw validation_error("pca_features: dim must be >= 1");
  const int n = g.num_nodes();
  const int k = std::min(dim, n);
  const SparseMatrix a = adjacency_matrix(g);

  // Column means of A: mu_j = degree_j / n.
  std::vector<double> mu(n, 0.0);
  for (const Edge& e : g.edges()) {
    mu[e.u] += e.w;
    mu[e.v] += e.w;
  }
  for (double& x : mu) x /= n;

  // Covariance of centered rows X = A - 1 mu^T, applied as an operator:
  // C v = A (A v) - n * mu * (mu . v)   (A is symmetric).
  std::vector<double> tmp(n);
  LinearOperator cov = [&](std::span<const double> x, std::span<double> y) {
    a.multiply(x, tmp);
    a.multiply(tmp, y);
    double mu_dot = 0.0;
    for (int i = 0; i < n; ++i) mu_dot += mu[i] * x[i];
    for (int i = 0; i < n; ++i) y[i] -= n * mu[i] * mu_dot;
  };
  double mu_sq = 0.0;
  for (double x : mu) mu_sq += x * x;
  const double af = a.frobenius_norm();
  const double norm_scale = af * af + n * mu_sq;

  EigOptions opt;
  opt.seed = seed;
  const auto pairs = symmetric_eigs(cov, n, norm_scale, k, EigWhich::largest, opt);

  // F[:, c] = X v_c = A v_c - (mu . v_c) * 1; columns beyond k stay zero.
  Matrix out(n, dim);
  std::vector<double> av(n);
  for (int c = 0; c < k; ++c) {
    const auto& v = pairs[c].vector;
    a.multiply(v, av);
    double mu_dot = 0.0;
    for (int i = 0; i < n; ++i) mu_dot += mu[i] * v[i];
    for (int i = 0; i < n; ++i) out(i, c) = av[i] - mu_dot;
  }
  return out;
}

}  // namespace gap
