#include "gap/eigs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gap/errors.hpp"
#include "gap/rng.hpp"

namespace gap {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

// Implicit-shift QL for a symmetric tridiagonal matrix (EISPACK tql2 scheme).
// d: diagonal (length n); e: sub-diagonal, e[i] couples d[i] and d[i+1]. On
// return d holds eigenvalues and the columns of z the eigenvectors.
void tridiag_eig(std::vector<double>& d, std::vector<double>& e,
                 std::vector<std::vector<double>>& z) {
  const int n = static_cast<int>(d.size());
  constexpr double eps = 2.220446049250313e-16;
  z.assign(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i) z[i][i] = 1.0;
  if (n == 1) return;
  e.resize(n, 0.0);
  e[n - 1] = 0.0;
  for (int l = 0; l < n; ++l) {
    int iter = 0;
    int m;
    do {
      for (m = l; m < n - 1; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= eps * dd + 1e-300) break;
      }
      if (m != l) {
        if (iter++ == 50) throw numeric_error("tridiagonal QL failed to converge");
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + (g >= 0.0 ? std::abs(r) : -std::abs(r)));
        double s = 1.0, c = 1.0, p = 0.0;
        bool underflow = false;
        for (int i = m - 1; i >= l; --i) {
          double f = s * e[i];
          const double b = c * e[i];
          r = std::hypot(f, g);
          e[i + 1] = r;
          if (r == 0.0) {
            d[i + 1] -= p;
            e[m] = 0.0;
            underflow = true;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          p = s * r;
          d[i + 1] = g + p;
          g = c * r - b;
          for (int row = 0; row < n; ++row) {
            f = z[row][i + 1];
            z[row][i + 1] = s * z[row][i] + c * f;
            z[row][i] = c * z[row][i] - s * f;
          }
        }
        if (underflow) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }
}

}  // namespace

std::vector<EigPair> symmetric_eigs(const LinearOperator& op, int n, double norm_scale, int k,
                                    EigWhich which, EigOptions opt) {
  if (n <= 0) throw validation_error("symmetric_eigs: n must be positive");
  if (k <= 0 || k > n)
    throw validation_error("symmetric_eigs: k must lie in 1..n, got " + std::to_string(k));
  const double tol = opt.tol_scale * std::max(norm_scale, 1e-300);
  const double breakdown_tol = 1e-13 * std::max(norm_scale, 1e-300);
  const int max_iters = opt.max_iters > 0 ? opt.max_iters : std::max(100, 10 * n);
  const int pass_cap = std::min(n, 250);

  std::vector<EigPair> locked;
  int iters_used = 0;
  int restart = 0;
  int stale_restarts = 0;
  double best_residual = std::numeric_limits<double>::infinity();

  auto orth_against_locked = [&](std::vector<double>& w) {
    for (int pass = 0; pass < 2; ++pass)
      for (const EigPair& lp : locked) axpy(-dot(w, lp.vector), lp.vector, w);
  };

  while (static_cast<int>(locked.size()) < k) {
    // Fresh start vector in the orthogonal complement of the locked set.
    std::vector<double> v(n);
    double vnorm = 0.0;
    for (int attempt = 0; attempt < 16 && vnorm < 1e-12; ++attempt) {
      Rng rng(seed_combine(opt.seed, static_cast<uint64_t>(restart) * 16 + attempt));
      for (double& x : v) x = rng.normal();
      orth_against_locked(v);
      vnorm = norm2(v);
    }
    ++restart;
    if (vnorm < 1e-12)
      throw numeric_error("symmetric_eigs: cannot build a start vector orthogonal to the " +
                          std::to_string(locked.size()) + " locked eigenvectors");
    for (double& x : v) x /= vnorm;

    std::vector<std::vector<double>> basis{v};
    std::vector<double> alphas, betas;
    std::vector<double> w(n);
    bool locked_this_pass = false;

    while (!locked_this_pass) {
      if (iters_used >= max_iters)
        throw numeric_error("symmetric_eigs: no convergence after " + std::to_string(iters_used) +
                            " iterations; best residual " + std::to_string(best_residual) +
                            " vs tolerance " + std::to_string(tol));
      ++iters_used;
      const int j = static_cast<int>(basis.size()) - 1;
      op(basis[j], w);
      const double alpha = dot(w, basis[j]);
      alphas.push_back(alpha);
      axpy(-alpha, basis[j], w);
      if (j > 0) axpy(-betas[j - 1], basis[j - 1], w);
      // Full reorthogonalization, two passes.
      for (int pass = 0; pass < 2; ++pass) {
        for (const EigPair& lp : locked) axpy(-dot(w, lp.vector), lp.vector, w);
        for (const auto& u : basis) axpy(-dot(w, u), u, w);
      }
      const double beta = norm2(w);
      const int dim = static_cast<int>(alphas.size());
      const bool exhausted = beta <= breakdown_tol || dim >= pass_cap ||
                             dim >= n - static_cast<int>(locked.size());
      const bool extract = exhausted || dim <= 40 || dim % 5 == 0;
      if (extract) {
        std::vector<double> d = alphas;
        std::vector<double> e = betas;
        e.resize(dim, 0.0);
        std::vector<std::vector<double>> z;
        tridiag_eig(d, e, z);
        // Extremal candidate for the requested end of the spectrum.
        int cand = 0;
        for (int i = 1; i < dim; ++i) {
          if (which == EigWhich::smallest ? d[i] < d[cand] : d[i] > d[cand]) cand = i;
        }
        const double res_est = std::abs(beta * z[dim - 1][cand]);
        if (res_est <= tol || exhausted) {
          std::vector<double> y(n, 0.0);
          for (int b = 0; b < dim; ++b) axpy(z[b][cand], basis[b], y);
          orth_against_locked(y);
          const double ynorm = norm2(y);
          if (ynorm > 1e-12) {
            for (double& x : y) x /= ynorm;
            std::vector<double> ay(n);
            op(y, ay);
            const double theta = dot(y, ay);
            axpy(-theta, y, ay);
            const double true_res = norm2(ay);
            best_residual = std::min(best_residual, true_res);
            if (true_res <= tol) {
              locked.push_back({theta, std::move(y)});
              locked_this_pass = true;
              break;
            }
          }
          if (exhausted) break;  // restart with a fresh vector
        }
      }
      if (beta <= breakdown_tol || static_cast<int>(basis.size()) >= pass_cap) break;
      std::vector<double> next = w;
      for (double& x : next) x /= beta;
      betas.push_back(beta);
      basis.push_back(std::move(next));
    }
    if (!locked_this_pass && ++stale_restarts > 64)
      throw numeric_error("symmetric_eigs: stalled after " + std::to_string(restart) +
                          " restarts; best residual " + std::to_string(best_residual) +
                          " vs tolerance " + std::to_string(tol));
  }

  std::sort(locked.begin(), locked.end(), [&](const EigPair& a, const EigPair& b) {
    return which == EigWhich::smallest ? a.value < b.value : a.value > b.value;
  });
  locked.resize(k);
  return locked;
}

std::vector<EigPair> symmetric_eigs(const SparseMatrix& m, int k, EigWhich which, EigOptions opt) {
  if (m.rows() != m.cols()) throw validation_error("symmetric_eigs: matrix must be square");
  if (!m.is_symmetric(1e-12 * std::max(m.frobenius_norm(), 1.0)))
    throw validation_error("symmetric_eigs: matrix is not symmetric");
  LinearOperator op = [&m](std::span<const double> x, std::span<double> y) { m.multiply(x, y); };
  return symmetric_eigs(op, m.rows(), m.frobenius_norm(), k, which, opt);
}

}  // namespace gap
