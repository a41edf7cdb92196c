#include "gap/optim.hpp"

#include <cmath>

#include "gap/errors.hpp"
#include "gap/rng.hpp"

namespace gap {

Matrix xavier_init(int rows, int cols, uint64_t seed) {
  if (rows <= 0 || cols <= 0) throw validation_error("xavier_init: dimensions must be positive");
  const double bound = std::sqrt(6.0 / (rows + cols));
  Rng rng(seed);
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = bound * (2.0 * rng.uniform() - 1.0);
  return m;
}

void AdamState::restore(std::vector<Matrix> m, std::vector<Matrix> v, int64_t t) {
  if (m.size() != v.size()) throw validation_error("adam restore: moment count mismatch");
  m_ = std::move(m);
  v_ = std::move(v);
  t_ = t;
}

void AdamState::step(std::vector<Matrix*> params, const std::vector<const Matrix*>& grads,
                     const std::vector<std::string>& names) {
  if (params.size() != grads.size() || params.size() != names.size())
    throw validation_error("adam_step: parameter/gradient count mismatch");
  if (m_.empty()) {
    for (const Matrix* p : params) {
      m_.emplace_back(p->rows(), p->cols());
      v_.emplace_back(p->rows(), p->cols());
    }
  }
  if (m_.size() != params.size()) throw validation_error("adam_step: parameter set changed");
  ++t_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  for (std::size_t k = 0; k < params.size(); ++k) {
    Matrix& p = *params[k];
    const Matrix& grad = *grads[k];
    if (!p.same_shape(grad) || !p.same_shape(m_[k]))
      throw validation_error("adam_step: shape mismatch for parameter '" + names[k] + "'");
    if (!grad.all_finite())
      throw numeric_error("adam_step: non-finite gradient for parameter '" + names[k] + "'");
    Matrix& m = m_[k];
    Matrix& v = v_[k];
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double gr = grad.data()[i];
      m.data()[i] = cfg_.beta1 * m.data()[i] + (1.0 - cfg_.beta1) * gr;
      v.data()[i] = cfg_.beta2 * v.data()[i] + (1.0 - cfg_.beta2) * gr * gr;
      const double mhat = m.data()[i] / bc1;
      const double vhat = v.data()[i] / bc2;
      p.data()[i] -= cfg_.learning_rate * mhat / (std::sqrt(vhat) + cfg_.epsilon);
    }
  }
}

}  // namespace gap
