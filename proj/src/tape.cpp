#include "gap/tape.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "gap/errors.hpp"

namespace gap {

int Tape::check_id(ValueId id) const {
  if (id < 0 || id >= static_cast<int>(nodes_.size()))
    throw validation_error("tape: unknown value id " + std::to_string(id));
  return id;
}

ValueId Tape::emplace(Matrix value, bool is_leaf) {
  Node n;
  n.value = std::move(value);
  n.is_leaf = is_leaf;
  nodes_.push_back(std::move(n));
  grads_valid_ = false;
  return static_cast<ValueId>(nodes_.size() - 1);
}

ValueId Tape::input(Matrix v) {
  if (!v.all_finite()) throw numeric_error("tape input: non-finite entries");
  return emplace(std::move(v), /*is_leaf=*/true);
}

ValueId Tape::parameter(const std::string& name, Matrix v) {
  if (!v.all_finite()) throw numeric_error("tape parameter '" + name + "': non-finite entries");
  for (ValueId p : parameters_)
    if (nodes_[p].name == name)
      throw validation_error("tape: duplicate parameter name '" + name + "'");
  ValueId id = emplace(std::move(v), /*is_leaf=*/true);
  nodes_[id].name = name;
  parameters_.push_back(id);
  return id;
}

const Matrix& Tape::grad(ValueId id) const {
  const Node& n = node(id);
  if (!grads_valid_) throw validation_error("tape: gradients not computed; call backward()");
  return n.grad;
}

Matrix& Tape::leaf_value(ValueId id) {
  Node& n = node(id);
  if (!n.is_leaf) throw validation_error("tape: only leaf values may be mutated");
  grads_valid_ = false;
  return n.value;
}

void Tape::replay() {
  for (Node& n : nodes_)
    if (n.forward) n.forward();
  grads_valid_ = false;
}

void Tape::backward(ValueId output) {
  const Node& out = node(output);
  if (out.value.rows() != 1 || out.value.cols() != 1)
    throw validation_error("backward: output must be a 1x1 scalar, got " + out.value.shape_str());
  for (Node& n : nodes_) {
    n.grad = Matrix(n.value.rows(), n.value.cols());
  }
  nodes_[output].grad(0, 0) = 1.0;
  for (int i = output; i >= 0; --i) {
    if (nodes_[i].backward) nodes_[i].backward();
  }
  grads_valid_ = true;
}

ValueId Tape::matmul(ValueId a, ValueId b) {
  Matrix y = gap::matmul(value(a), value(b));
  ValueId id = emplace(std::move(y), /*is_leaf=*/false);
  node(id).forward = [this, a, b, id] { val(id) = gap::matmul(val(a), val(b)); };
  node(id).backward = [this, a, b, id] {
    const Matrix& gy = g(id);
    Matrix da = gap::matmul_bt(gy, val(b));
    Matrix db = gap::matmul_at(val(a), gy);
    Matrix& ga = g(a);
    Matrix& gb = g(b);
    for (std::size_t k = 0; k < ga.size(); ++k) ga.data()[k] += da.data()[k];
    for (std::size_t k = 0; k < gb.size(); ++k) gb.data()[k] += db.data()[k];
  };
  return id;
}

ValueId Tape::matmul_bt(ValueId a, ValueId b) {
  Matrix y = gap::matmul_bt(value(a), value(b));
  ValueId id = emplace(std::move(y), /*is_leaf=*/false);
  node(id).forward = [this, a, b, id] { val(id) = gap::matmul_bt(val(a), val(b)); };
  node(id).backward = [this, a, b, id] {
    const Matrix& gy = g(id);
    Matrix da = gap::matmul(gy, val(b));
    Matrix db = gap::matmul_at(gy, val(a));
    Matrix& ga = g(a);
    Matrix& gb = g(b);
    for (std::size_t k = 0; k < ga.size(); ++k) ga.data()[k] += da.data()[k];
    for (std::size_t k = 0; k < gb.size(); ++k) gb.data()[k] += db.data()[k];
  };
  return id;
}

ValueId Tape::sparse_dense_matmul(std::shared_ptr<const SparseMatrix> s, ValueId x) {
  if (!s) throw validation_error("sparse_dense_matmul: null matrix");
  Matrix y = s->multiply_dense(value(x));
  ValueId id = emplace(std::move(y), /*is_leaf=*/false);
  node(id).forward = [this, s, x, id] { val(id) = s->multiply_dense(val(x)); };
  node(id).backward = [this, s, x, id] {
    // dX += S^T G, accumulated row by row of S.
    const Matrix& gy = g(id);
    Matrix& gx = g(x);
    for (int r = 0; r < s->rows(); ++r) {
      auto cs = s->row_cols(r);
      auto vs = s->row_values(r);
      const double* grow = gy.row(r);
      for (std::size_t p = 0; p < cs.size(); ++p) {
        double* xrow = gx.row(cs[p]);
        const double v = vs[p];
        for (int j = 0; j < gx.cols(); ++j) xrow[j] += v * grow[j];
      }
    }
  };
  return id;
}

namespace {

enum class Broadcast { none, row };

Broadcast broadcast_kind(const Matrix& a, const Matrix& b, const char* op) {
  if (a.same_shape(b)) return Broadcast::none;
  if (b.rows() == 1 && b.cols() == a.cols()) return Broadcast::row;
  throw validation_error(std::string(op) + ": shape mismatch " + a.shape_str() + " vs " +
                         b.shape_str());
}

}  // namespace

ValueId Tape::add(ValueId a, ValueId b) {
  const Broadcast bc = broadcast_kind(value(a), value(b), "add");
  auto fwd_val = [this, a, b, bc]() {
    const Matrix& av = val(a);
    const Matrix& bv = val(b);
    Matrix y(av.rows(), av.cols());
    for (int i = 0; i < av.rows(); ++i) {
      const double* brow = bc == Broadcast::row ? bv.row(0) : bv.row(i);
      for (int j = 0; j < av.cols(); ++j) y(i, j) = av(i, j) + brow[j];
    }
    return y;
  };
  ValueId id = emplace(fwd_val(), /*is_leaf=*/false);
  node(id).forward = [this, id, fwd_val] { val(id) = fwd_val(); };
  node(id).backward = [this, a, b, bc, id] {
    const Matrix& gy = g(id);
    Matrix& ga = g(a);
    Matrix& gb = g(b);
    for (std::size_t k = 0; k < ga.size(); ++k) ga.data()[k] += gy.data()[k];
    if (bc == Broadcast::row) {
      for (int i = 0; i < gy.rows(); ++i)
        for (int j = 0; j < gy.cols(); ++j) gb(0, j) += gy(i, j);
    } else {
      for (std::size_t k = 0; k < gb.size(); ++k) gb.data()[k] += gy.data()[k];
    }
  };
  return id;
}

ValueId Tape::sub(ValueId a, ValueId b) {
  if (!value(a).same_shape(value(b)))
    throw validation_error("sub: shape mismatch " + value(a).shape_str() + " vs " +
                           value(b).shape_str());
  auto fwd_val = [this, a, b]() {
    const Matrix& av = val(a);
    const Matrix& bv = val(b);
    Matrix y(av.rows(), av.cols());
    for (std::size_t k = 0; k < y.size(); ++k) y.data()[k] = av.data()[k] - bv.data()[k];
    return y;
  };
  ValueId id = emplace(fwd_val(), /*is_leaf=*/false);
  node(id).forward = [this, id, fwd_val] { val(id) = fwd_val(); };
  node(id).backward = [this, a, b, id] {
    const Matrix& gy = g(id);
    Matrix& ga = g(a);
    Matrix& gb = g(b);
    for (std::size_t k = 0; k < ga.size(); ++k) ga.data()[k] += gy.data()[k];
    for (std::size_t k = 0; k < gb.size(); ++k) gb.data()[k] -= gy.data()[k];
  };
  return id;
}

ValueId Tape::elementwise_mul(ValueId a, ValueId b) {
  if (!value(a).same_shape(value(b)))
    throw validation_error("elementwise_mul: shape mismatch " + value(a).shape_str() + " vs " +
                           value(b).shape_str());
  auto fwd_val = [this, a, b]() {
    const Matrix& av = val(a);
    const Matrix& bv = val(b);
    Matrix y(av.rows(), av.cols());
    for (std::size_t k = 0; k < y.size(); ++k) y.data()[k] = av.data()[k] * bv.data()[k];
    return y;
  };
  ValueId id = emplace(fwd_val(), /*is_leaf=*/false);
  node(id).forward = [this, id, fwd_val] { val(id) = fwd_val(); };
  node(id).backward = [this, a, b, id] {
    const Matrix& gy = g(id);
    Matrix& ga = g(a);
    Matrix& gb = g(b);
    const Matrix& av = val(a);
    const Matrix& bv = val(b);
    for (std::size_t k = 0; k < ga.size(); ++k) {
      ga.data()[k] += gy.data()[k] * bv.data()[k];
      gb.data()[k] += gy.data()[k] * av.data()[k];
    }
  };
  return id;
}

ValueId Tape::elementwise_div(ValueId a, ValueId b) {
  const Broadcast bc = broadcast_kind(value(a), value(b), "elementwise_div");
  auto fwd_val = [this, a, b, bc]() {
    const Matrix& av = val(a);
    const Matrix& bv = val(b);
    Matrix y(av.rows(), av.cols());
    for (int i = 0; i < av.rows(); ++i) {
      const double* brow = bc == Broadcast::row ? bv.row(0) : bv.row(i);
      for (int j = 0; j < av.cols(); ++j) y(i, j) = av(i, j) / brow[j];
    }
    return y;
  };
  ValueId id = emplace(fwd_val(), /*is_leaf=*/false);
  node(id).forward = [this, id, fwd_val] { val(id) = fwd_val(); };
  node(id).backward = [this, a, b, bc, id] {
    const Matrix& gy = g(id);
    const Matrix& av = val(a);
    const Matrix& bv = val(b);
    Matrix& ga = g(a);
    Matrix& gb = g(b);
    for (int i = 0; i < gy.rows(); ++i) {
      const double* brow = bc == Broadcast::row ? bv.row(0) : bv.row(i);
      double* gbrow = bc == Broadcast::row ? gb.row(0) : gb.row(i);
      for (int j = 0; j < gy.cols(); ++j) {
        const double inv = 1.0 / brow[j];
        ga(i, j) += gy(i, j) * inv;
        gbrow[j] -= gy(i, j) * av(i, j) * inv * inv;
      }
    }
  };
  return id;
}

ValueId Tape::tanh(ValueId a) {
  auto fwd_val = [this, a]() {
    const Matrix& av = val(a);
    Matrix y(av.rows(), av.cols());
    for (std::size_t k = 0; k < y.size(); ++k) y.data()[k] = std::tanh(av.data()[k]);
    return y;
  };
  ValueId id = emplace(fwd_val(), /*is_leaf=*/false);
  node(id).forward = [this, id, fwd_val] { val(id) = fwd_val(); };
  node(id).backward = [this, a, id] {
    const Matrix& gy = g(id);
    const Matrix& yv = val(id);
    Matrix& ga = g(a);
    for (std::size_t k = 0; k < ga.size(); ++k)
      ga.data()[k] += gy.data()[k] * (1.0 - yv.data()[k] * yv.data()[k]);
  };
  return id;
}

ValueId Tape::relu(ValueId a) {
  auto fwd_val = [this, a]() {
    const Matrix& av = val(a);
    Matrix y(av.rows(), av.cols());
    for (std::size_t k = 0; k < y.size(); ++k) y.data()[k] = av.data()[k] > 0.0 ? av.data()[k] : 0.0;
    return y;
  };
  ValueId id = emplace(fwd_val(), /*is_leaf=*/false);
  node(id).forward = [this, id, fwd_val] { val(id) = fwd_val(); };
  node(id).backward = [this, a, id] {
    const Matrix& gy = g(id);
    const Matrix& av = val(a);
    Matrix& ga = g(a);
    for (std::size_t k = 0; k < ga.size(); ++k)
      if (av.data()[k] > 0.0) ga.data()[k] += gy.data()[k];
  };
  return id;
}

ValueId Tape::row_softmax(ValueId a) {
  auto fwd_val = [this, a]() {
    const Matrix& av = val(a);
    if (!av.all_finite()) throw numeric_error("row_softmax: non-finite input");
    Matrix y(av.rows(), av.cols());
    for (int i = 0; i < av.rows(); ++i) {
      double mx = av(i, 0);
      for (int j = 1; j < av.cols(); ++j) mx = std::max(mx, av(i, j));
      double sum = 0.0;
      for (int j = 0; j < av.cols(); ++j) {
        y(i, j) = std::exp(av(i, j) - mx);
        sum += y(i, j);
      }
      for (int j = 0; j < av.cols(); ++j) y(i, j) /= sum;
    }
    return y;
  };
  ValueId id = emplace(fwd_val(), /*is_leaf=*/false);
  node(id).forward = [this, id, fwd_val] { val(id) = fwd_val(); };
  node(id).backward = [this, a, id] {
    const Matrix& gy = g(id);
    const Matrix& yv = val(id);
    Matrix& ga = g(a);
    for (int i = 0; i < gy.rows(); ++i) {
      double dot = 0.0;
      for (int j = 0; j < gy.cols(); ++j) dot += gy(i, j) * yv(i, j);
      for (int j = 0; j < gy.cols(); ++j) ga(i, j) += yv(i, j) * (gy(i, j) - dot);
    }
  };
  return id;
}

ValueId Tape::reduce_sum(ValueId a) {
  auto fwd_val = [this, a]() {
    const Matrix& av = val(a);
    double s = 0.0;
    for (std::size_t k = 0; k < av.size(); ++k) s += av.data()[k];
    Matrix y(1, 1);
    y(0, 0) = s;
    return y;
  };
  ValueId id = emplace(fwd_val(), /*is_leaf=*/false);
  node(id).forward = [this, id, fwd_val] { val(id) = fwd_val(); };
  node(id).backward = [this, a, id] {
    const double gy = g(id)(0, 0);
    Matrix& ga = g(a);
    for (std::size_t k = 0; k < ga.size(); ++k) ga.data()[k] += gy;
  };
  return id;
}

ValueId Tape::square(ValueId a) {
  auto fwd_val = [this, a]() {
    const Matrix& av = val(a);
    Matrix y(av.rows(), av.cols());
    for (std::size_t k = 0; k < y.size(); ++k) y.data()[k] = av.data()[k] * av.data()[k];
    return y;
  };
  ValueId id = emplace(fwd_val(), /*is_leaf=*/false);
  node(id).forward = [this, id, fwd_val] { val(id) = fwd_val(); };
  node(id).backward = [this, a, id] {
    const Matrix& gy = g(id);
    const Matrix& av = val(a);
    Matrix& ga = g(a);
    for (std::size_t k = 0; k < ga.size(); ++k) ga.data()[k] += 2.0 * av.data()[k] * gy.data()[k];
  };
  return id;
}

ValueId Tape::scale(ValueId a, double c) {
  auto fwd_val = [this, a, c]() {
    const Matrix& av = val(a);
    Matrix y(av.rows(), av.cols());
    for (std::size_t k = 0; k < y.size(); ++k) y.data()[k] = c * av.data()[k];
    return y;
  };
  ValueId id = emplace(fwd_val(), /*is_leaf=*/false);
  node(id).forward = [this, id, fwd_val] { val(id) = fwd_val(); };
  node(id).backward = [this, a, c, id] {
    const Matrix& gy = g(id);
    Matrix& ga = g(a);
    for (std::size_t k = 0; k < ga.size(); ++k) ga.data()[k] += c * gy.data()[k];
  };
  return id;
}

ValueId Tape::clamp_min(ValueId a, double floor) {
  auto fwd_val = [this, a, floor]() {
    const Matrix& av = val(a);
    Matrix y(av.rows(), av.cols());
    for (std::size_t k = 0; k < y.size(); ++k) y.data()[k] = std::max(av.data()[k], floor);
    return y;
  };
  ValueId id = emplace(fwd_val(), /*is_leaf=*/false);
  node(id).forward = [this, id, fwd_val] { val(id) = fwd_val(); };
  node(id).backward = [this, a, floor, id] {
    const Matrix& gy = g(id);
    const Matrix& av = val(a);
    Matrix& ga = g(a);
    for (std::size_t k = 0; k < ga.size(); ++k)
      if (av.data()[k] > floor) ga.data()[k] += gy.data()[k];
  };
  return id;
}

// Row-norm floor: zero rows stay zero instead of dividing by zero.
static constexpr double kNormFloor = 1e-12;

ValueId Tape::l2_normalize_rows(ValueId a) {
  auto fwd_val = [this, a]() {
    const Matrix& av = val(a);
    Matrix y(av.rows(), av.cols());
    for (int i = 0; i < av.rows(); ++i) {
      double sq = 0.0;
      for (int j = 0; j < av.cols(); ++j) sq += av(i, j) * av(i, j);
      const double r = std::max(std::sqrt(sq), kNormFloor);
      for (int j = 0; j < av.cols(); ++j) y(i, j) = av(i, j) / r;
    }
    return y;
  };
  ValueId id = emplace(fwd_val(), /*is_leaf=*/false);
  node(id).forward = [this, id, fwd_val] { val(id) = fwd_val(); };
  node(id).backward = [this, a, id] {
    const Matrix& gy = g(id);
    const Matrix& av = val(a);
    const Matrix& yv = val(id);
    Matrix& ga = g(a);
    for (int i = 0; i < gy.rows(); ++i) {
      double sq = 0.0;
      for (int j = 0; j < gy.cols(); ++j) sq += av(i, j) * av(i, j);
      const double norm = std::sqrt(sq);
      if (norm > kNormFloor) {
        double dot = 0.0;
        for (int j = 0; j < gy.cols(); ++j) dot += gy(i, j) * yv(i, j);
        for (int j = 0; j < gy.cols(); ++j) ga(i, j) += (gy(i, j) - yv(i, j) * dot) / norm;
      } else {
        // Below the floor the divisor is constant.
        for (int j = 0; j < gy.cols(); ++j) ga(i, j) += gy(i, j) / kNormFloor;
      }
    }
  };
  return id;
}

ValueId Tape::hconcat(ValueId a, ValueId b) {
  if (value(a).rows() != value(b).rows())
    throw validation_error("hconcat: row mismatch " + value(a).shape_str() + " vs " +
                           value(b).shape_str());
  auto fwd_val = [this, a, b]() {
    const Matrix& av = val(a);
    const Matrix& bv = val(b);
    Matrix y(av.rows(), av.cols() + bv.cols());
    for (int i = 0; i < av.rows(); ++i) {
      for (int j = 0; j < av.cols(); ++j) y(i, j) = av(i, j);
      for (int j = 0; j < bv.cols(); ++j) y(i, av.cols() + j) = bv(i, j);
    }
    return y;
  };
  ValueId id = emplace(fwd_val(), /*is_leaf=*/false);
  node(id).forward = [this, id, fwd_val] { val(id) = fwd_val(); };
  node(id).backward = [this, a, b, id] {
    const Matrix& gy = g(id);
    Matrix& ga = g(a);
    Matrix& gb = g(b);
    for (int i = 0; i < gy.rows(); ++i) {
      for (int j = 0; j < ga.cols(); ++j) ga(i, j) += gy(i, j);
      for (int j = 0; j < gb.cols(); ++j) gb(i, j) += gy(i, ga.cols() + j);
    }
  };
  return id;
}

ValueId Tape::row_maxpool_over_sets(ValueId messages, std::vector<std::vector<int>> sets) {
  const int cols = value(messages).cols();
  const int mrows = value(messages).rows();
  for (const auto& set : sets)
    for (int j : set)
      if (j < 0 || j >= mrows)
        throw validation_error("row_maxpool_over_sets: index " + std::to_string(j) +
                               " out of range");
  auto shared_sets = std::make_shared<std::vector<std::vector<int>>>(std::move(sets));
  // argmax row index per output coordinate; -1 marks the empty-set zero row.
  auto argmax = std::make_shared<std::vector<int>>();
  auto fwd_val = [this, messages, shared_sets, argmax, cols]() {
    const Matrix& mv = val(messages);
    const int n = static_cast<int>(shared_sets->size());
    Matrix y(n, cols);
    argmax->assign(static_cast<std::size_t>(n) * cols, -1);
    for (int i = 0; i < n; ++i) {
      const auto& set = (*shared_sets)[i];
      if (set.empty()) continue;  // zero row
      for (int j = 0; j < cols; ++j) {
        int best = set[0];
        double bv = mv(set[0], j);
        for (std::size_t s = 1; s < set.size(); ++s) {
          const double v = mv(set[s], j);
          if (v > bv) {
            bv = v;
            best = set[s];
          }
        }
        y(i, j) = bv;
        (*argmax)[static_cast<std::size_t>(i) * cols + j] = best;
      }
    }
    return y;
  };
  ValueId id = emplace(fwd_val(), /*is_leaf=*/false);
  node(id).forward = [this, id, fwd_val] { val(id) = fwd_val(); };
  node(id).backward = [this, messages, argmax, cols, id] {
    const Matrix& gy = g(id);
    Matrix& gm = g(messages);
    for (int i = 0; i < gy.rows(); ++i) {
      for (int j = 0; j < cols; ++j) {
        const int src = (*argmax)[static_cast<std::size_t>(i) * cols + j];
        if (src >= 0) gm(src, j) += gy(i, j);
      }
    }
  };
  return id;
}

ValueId Tape::edge_masked_dot_sum(std::shared_ptr<const SparseMatrix> mask, ValueId q, ValueId r) {
  if (!mask) throw validation_error("edge_masked_dot_sum: null mask");
  const Matrix& qv = value(q);
  const Matrix& rv = value(r);
  if (qv.rows() != mask->rows() || rv.rows() != mask->cols() || qv.cols() != rv.cols())
    throw validation_error("edge_masked_dot_sum: shape mismatch q=" + qv.shape_str() + " r=" +
                           rv.shape_str() + " mask=" + std::to_string(mask->rows()) + "x" +
                           std::to_string(mask->cols()));
  auto fwd_val = [this, mask, q, r]() {
    const Matrix& Q = val(q);
    const Matrix& R = val(r);
    double total = 0.0;
    for (int i = 0; i < mask->rows(); ++i) {
      auto cs = mask->row_cols(i);
      auto vs = mask->row_values(i);
      const double* qrow = Q.row(i);
      for (std::size_t p = 0; p < cs.size(); ++p) {
        const double* rrow = R.row(cs[p]);
        double dot = 0.0;
        for (int c = 0; c < Q.cols(); ++c) dot += qrow[c] * rrow[c];
        total += vs[p] * dot;
      }
    }
    Matrix y(1, 1);
    y(0, 0) = total;
    return y;
  };
  ValueId id = emplace(fwd_val(), /*is_leaf=*/false);
  node(id).forward = [this, id, fwd_val] { val(id) = fwd_val(); };
  node(id).backward = [this, mask, q, r, id] {
    const double gy = g(id)(0, 0);
    const Matrix& Q = val(q);
    const Matrix& R = val(r);
    Matrix& gq = g(q);
    Matrix& gr = g(r);
    for (int i = 0; i < mask->rows(); ++i) {
      auto cs = mask->row_cols(i);
      auto vs = mask->row_values(i);
      const double* qrow = Q.row(i);
      double* gqrow = gq.row(i);
      for (std::size_t p = 0; p < cs.size(); ++p) {
        const double w = gy * vs[p];
        const double* rrow = R.row(cs[p]);
        double* grrow = gr.row(cs[p]);
        for (int c = 0; c < Q.cols(); ++c) {
          gqrow[c] += w * rrow[c];
          grrow[c] += w * qrow[c];
        }
      }
    }
  };
  return id;
}

double finite_difference_check(Tape& tape, ValueId output, ValueId param, double step) {
  if (!(step > 0.0)) throw validation_error("finite_difference_check: step must be > 0");
  tape.replay();
  tape.backward(output);
  const Matrix analytic = tape.grad(param);
  Matrix& pv = tape.leaf_value(param);
  double worst = 0.0;
  for (int i = 0; i < pv.rows(); ++i) {
    for (int j = 0; j < pv.cols(); ++j) {
      const double orig = pv(i, j);
      pv(i, j) = orig + step;
      tape.replay();
      const double fp = tape.value(output)(0, 0);
      pv(i, j) = orig - step;
      tape.replay();
      const double fm = tape.value(output)(0, 0);
      pv(i, j) = orig;
      const double numeric = (fp - fm) / (2.0 * step);
      const double a = analytic(i, j);
      const double denom = std::max({std::abs(a), std::abs(numeric), 1e-8});
      worst = std::max(worst, std::abs(a - numeric) / denom);
    }
  }
  tape.replay();
  return worst;
}

}  // namespace gap
