#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gap/matrix.hpp"

namespace gap {

// Uniform on [-sqrt(6/(rows+cols)), +sqrt(6/(rows+cols))], deterministic per seed.
Matrix xavier_init(int rows, int cols, uint64_t seed);

struct AdamConfig {
  double learning_rate = 7.5e-5;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Bias-corrected Adam over a fixed set of named parameter tensors. Moment
// shapes are pinned on first step; a shape change aborts.
class AdamState {
public:
  explicit AdamState(AdamConfig cfg = {}) : cfg_(cfg) {}

  // In-place update; grads[i] pairs with params[i]. Throws numeric_error
  // naming the parameter if a gradient is non-finite.
  void step(std::vector<Matrix*> params, const std::vector<const Matrix*>& grads,
            const std::vector<std::string>& names);

  int64_t step_count() const { return t_; }
  const AdamConfig& config() const { return cfg_; }
  void set_learning_rate(double lr) { cfg_.learning_rate = lr; }

  // Serialization access for checkpoint resume.
  std::vector<Matrix>& first_moments() { return m_; }
  std::vector<Matrix>& second_moments() { return v_; }
  void restore(std::vector<Matrix> m, std::vector<Matrix> v, int64_t t);

private:
  AdamConfig cfg_;
  std::vector<Matrix> m_;
  std::vector<Matrix> v_;
  int64_t t_ = 0;
};

}  // namespace gap
