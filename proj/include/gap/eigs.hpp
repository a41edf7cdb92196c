#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "gap/sparse.hpp"

namespace gap {

// y = A x for a symmetric operator; used where materializing A is wasteful
// (PCA covariance of a sparse adjacency).
using LinearOperator = std::function<void(std::span<const double>, std::span<double>)>;

enum class EigWhich { smallest, largest };

struct EigOptions {
  int max_iters = 0;        // 0 selects the default 10*n
  double tol_scale = 1e-6;  // residual tolerance = tol_scale * norm_scale
  uint64_t seed = 0;
};

struct EigPair {
  double value;
  std::vector<double> vector;
};

// Lanczos iteration with full reorthogonalization; converged eigenpairs are
// locked and deflated, and the iteration restarts in their orthogonal
// complement until k pairs are found. Results are sorted by eigenvalue
// (ascending for smallest, descending for largest); every returned pair
// satisfies ||A v - lambda v|| <= tol_scale * norm_scale. Deterministic per
// seed. Throws numeric_error with the achieved residual on non-convergence.
std::vector<EigPair> symmetric_eigs(const LinearOperator& op, int n, double norm_scale, int k,
                                    EigWhich which, EigOptions opt = {});

// Convenience overload; norm_scale is the Frobenius norm of m.
std::vector<EigPair> symmetric_eigs(const SparseMatrix& m, int k, EigWhich which,
                                    EigOptions opt = {});

}  // namespace gap
