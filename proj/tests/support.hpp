#pragma once

// Shared fixtures and test-only oracles. The Jacobi eigensolver here is an
// independent route used to check the Lanczos implementation and PCA; it
// never shares code with src/.

#include <algorithm>
#include <cmath>
#include <vector>

#include "gap/graph.hpp"
#include "gap/matrix.hpp"
#include "gap/rng.hpp"

namespace gap::test {

inline Graph cycle4() { return Graph(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}}); }
inline Graph path4() { return Graph(4, {{0, 1}, {1, 2}, {2, 3}}); }
inline Graph k2() { return Graph(2, {{0, 1}}); }
inline Graph k4() { return Graph(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}); }

// Two triangles {0,1,2} and {3,4,5} joined by the bridge 2-3; 7 edges.
inline Graph two_triangle_bridge() {
  return Graph(6, {{0, 1}, {0, 2}, {1, 2}, {3, 4}, {3, 5}, {4, 5}, {2, 3}});
}

// Cliques of the given sizes chained by single bridge edges.
inline Graph planted_cliques(const std::vector<int>& sizes) {
  std::vector<Edge> edges;
  int base = 0;
  int prev_last = -1;
  for (int sz : sizes) {
    for (int i = 0; i < sz; ++i)
      for (int j = i + 1; j < sz; ++j) edges.push_back({base + i, base + j, 1.0});
    if (prev_last >= 0) edges.push_back({prev_last, base, 1.0});
    prev_last = base + sz - 1;
    base += sz;
  }
  return Graph(base, edges);
}

// Row-stochastic matrix with strictly positive entries.
inline Matrix random_row_stochastic(int rows, int cols, uint64_t seed) {
  Rng rng(seed);
  Matrix y(rows, cols);
  for (int i = 0; i < rows; ++i) {
    double sum = 0.0;
    for (int j = 0; j < cols; ++j) {
      y(i, j) = 0.05 + rng.uniform();
      sum += y(i, j);
    }
    for (int j = 0; j < cols; ++j) y(i, j) /= sum;
  }
  return y;
}

inline std::vector<int> random_assignment(int n, int g, uint64_t seed) {
  Rng rng(seed);
  std::vector<int> a(n);
  for (int i = 0; i < n; ++i) a[i] = static_cast<int>(rng.uniform_int(g));
  return a;
}

// Cyclic Jacobi eigendecomposition of a dense symmetric matrix; eigenvalues
// ascending, eigenvectors in the columns of `vecs`.
inline void jacobi_eig(Matrix a, std::vector<double>& values, Matrix& vecs) {
  const int n = a.rows();
  vecs = Matrix(n, n);
  for (int i = 0; i < n; ++i) vecs(i, i) = 1.0;
  for (int sweep = 0; sweep < 200; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off < 1e-26) break;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        if (std::abs(a(p, q)) < 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int i = 0; i < n; ++i) {
          const double aip = a(i, p), aiq = a(i, q);
          a(i, p) = c * aip - s * aiq;
          a(i, q) = s * aip + c * aiq;
        }
        for (int i = 0; i < n; ++i) {
          const double api = a(p, i), aqi = a(q, i);
          a(p, i) = c * api - s * aqi;
          a(q, i) = s * api + c * aqi;
        }
        for (int i = 0; i < n; ++i) {
          const double vip = vecs(i, p), viq = vecs(i, q);
          vecs(i, p) = c * vip - s * viq;
          vecs(i, q) = s * vip + c * viq;
        }
      }
    }
  }
  values.resize(n);
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) {
    values[i] = a(i, i);
    order[i] = i;
  }
  std::sort(order.begin(), order.end(), [&](int x, int y) { return a(x, x) < a(y, y); });
  std::vector<double> sorted(n);
  Matrix sorted_vecs(n, n);
  for (int i = 0; i < n; ++i) {
    sorted[i] = a(order[i], order[i]);
    for (int r = 0; r < n; ++r) sorted_vecs(r, i) = vecs(r, order[i]);
  }
  values = sorted;
  vecs = sorted_vecs;
}

}  // namespace gap::test
