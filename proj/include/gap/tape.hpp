#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "gap/matrix.hpp"
#include "gap/sparse.hpp"

namespace gap {

using ValueId = int;

// Define-by-run reverse-mode tape. Each primitive records the forward value
// and a closure pair, so a recorded computation can be replayed bit-for-bit
// (after mutating a leaf) and differentiated exactly.
//
// A tape is confined to one logical thread; distinct tapes run concurrently.
// Sparse operands are shared by pointer and must outlive the tape.
class Tape {
public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;
  Tape(Tape&&) = delete;  // recorded closures capture `this`
  Tape& operator=(Tape&&) = delete;

  // Leaves. input() is a constant; parameter() is a gradient-requiring leaf
  // registered under a unique name.
  ValueId input(Matrix v);
  ValueId parameter(const std::string& name, Matrix v);

  const Matrix& value(ValueId id) const { return node(id).value; }
  const Matrix& grad(ValueId id) const;
  Matrix& leaf_value(ValueId id);

  const std::vector<ValueId>& parameters() const { return parameters_; }
  const std::string& parameter_name(ValueId id) const { return node(id).name; }
  int num_nodes() const { return static_cast<int>(nodes_.size()); }

  // Recomputes every non-leaf value in recorded order.
  void replay();

  // Reverse pass from a scalar (1x1) output; fills grad() for every node.
  void backward(ValueId output);

  // Primitives.
  ValueId matmul(ValueId a, ValueId b);
  ValueId matmul_bt(ValueId a, ValueId b);  // a * b^T
  ValueId sparse_dense_matmul(std::shared_ptr<const SparseMatrix> s, ValueId x);
  ValueId add(ValueId a, ValueId b);  // equal shapes, or b a 1xC row broadcast
  ValueId sub(ValueId a, ValueId b);
  ValueId elementwise_mul(ValueId a, ValueId b);
  ValueId elementwise_div(ValueId a, ValueId b);  // equal shapes, or b a 1xC row broadcast
  ValueId tanh(ValueId a);
  ValueId relu(ValueId a);
  ValueId row_softmax(ValueId a);
  ValueId reduce_sum(ValueId a);  // 1x1
  ValueId square(ValueId a);
  ValueId scale(ValueId a, double c);
  ValueId clamp_min(ValueId a, double floor);
  ValueId l2_normalize_rows(ValueId a);
  ValueId hconcat(ValueId a, ValueId b);

  // Row i of the output is the elementwise max over rows sets[i] of the
  // message matrix; an empty set yields a zero row. Ties route the gradient
  // to the first index in the set, so backward is deterministic.
  ValueId row_maxpool_over_sets(ValueId messages, std::vector<std::vector<int>> sets);

  // Scalar sum over nonzeros of `mask` of mask_ij * dot(q_i, r_j). Equals
  // reduce_sum((Q R^T) .* mask) without materializing the n x n product.
  ValueId edge_masked_dot_sum(std::shared_ptr<const SparseMatrix> mask, ValueId q, ValueId r);

private:
  struct Node {
    Matrix value;
    Matrix grad;
    bool is_leaf = false;
    std::string name;
    std::function<void()> forward;   // null for leaves
    std::function<void()> backward;  // null for leaves
  };

  Node& node(ValueId id) { return nodes_[check_id(id)]; }
  const Node& node(ValueId id) const { return nodes_[check_id(id)]; }
  int check_id(ValueId id) const;
  ValueId emplace(Matrix value, bool is_leaf);
  Matrix& val(ValueId id) { return nodes_[id].value; }
  Matrix& g(ValueId id) { return nodes_[id].grad; }

  std::vector<Node> nodes_;
  std::vector<ValueId> parameters_;
  bool grads_valid_ = false;
};

// Central-difference check of backward() for one registered parameter.
// Returns the worst relative error over the parameter's coordinates, with
// denominator max(|analytic|, |numeric|, 1e-8). Restores the tape on exit.
double finite_difference_check(Tape& tape, ValueId output, ValueId param, double step);

}  // namespace gap
