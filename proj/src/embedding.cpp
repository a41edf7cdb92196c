#include "gap/embedding.hpp"

#include <algorithm>
#include <string>

#include "gap/errors.hpp"
#include "gap/optim.hpp"
#include "gap/rng.hpp"

namespace gap {

GcnParams make_gcn_params(int in_dim, int hidden, uint64_t seed, bool trainable) {
  GcnParams p;
  p.w0 = xavier_init(in_dim, hidden, seed_combine(seed, 0));
  p.w1 = xavier_init(hidden, hidden, seed_combine(seed, 1));
  p.w2 = xavier_init(hidden, hidden, seed_combine(seed, 2));
  p.trainable = trainable;
  return p;
}

GcnTapeIds register_gcn(Tape& tape, const GcnParams& p, bool as_parameters,
                        const std::string& prefix) {
  auto reg = [&](const std::string& name, const Matrix& m) {
    return as_parameters ? tape.parameter(prefix + "." + name, m) : tape.input(m);
  };
  return {reg("w0", p.w0), reg("w1", p.w1), reg("w2", p.w2)};
}

ValueId gcn_forward(Tape& tape, std::shared_ptr<const SparseMatrix> ahat, ValueId x,
                    const GcnTapeIds& ids) {
  if (tape.value(x).cols() != tape.value(ids.w0).rows())
    throw validation_error("gcn_forward: feature width " +
                           std::to_string(tape.value(x).cols()) + " does not match W0 rows " +
                           std::to_string(tape.value(ids.w0).rows()));
  ValueId h = tape.tanh(tape.matmul(tape.sparse_dense_matmul(ahat, x), ids.w0));
  h = tape.tanh(tape.matmul(tape.sparse_dense_matmul(ahat, h), ids.w1));
  h = tape.tanh(tape.matmul(tape.sparse_dense_matmul(ahat, h), ids.w2));
  return h;
}

SageParams make_sage_params(int in_dim, int hidden, int steps, bool shared_pooling,
                            SageParams::ProjectionBias bias_mode, int neighbor_sample_size,
                            uint64_t seed, bool trainable) {
  if (steps < 0) throw validation_error("sage: step count must be nonnegative");
  if (steps > 0 && (in_dim <= 0 || hidden <= 0))
    throw validation_error("sage: in_dim and hidden must be positive");
  SageParams p;
  p.steps = steps;
  p.hidden = hidden;
  p.shared_pooling = shared_pooling;
  p.projection_bias = bias_mode;
  p.neighbor_sample_size = neighbor_sample_size;
  p.trainable = trainable;
  int shared_idx = -1;
  for (int k = 0; k < steps; ++k) {
    const int w = p.step_in_width(k, in_dim);
    if (p.step_shares_pooling(k, in_dim) && shared_idx >= 0) {
      p.agg_of_step.push_back(shared_idx);
    } else {
      p.w_agg.push_back(xavier_init(w, w, seed_combine(seed, 4 * k)));
      p.b_agg.push_back(Matrix(1, w));
      p.agg_of_step.push_back(static_cast<int>(p.w_agg.size()) - 1);
      if (p.step_shares_pooling(k, in_dim)) shared_idx = p.agg_of_step.back();
    }
    p.w_proj.push_back(xavier_init(2 * w, hidden, seed_combine(seed, 4 * k + 1)));
    p.b_proj.push_back(Matrix(1, hidden));
  }
  return p;
}

SageTapeIds register_sage(Tape& tape, const SageParams& p, int in_dim, bool as_parameters,
                          const std::string& prefix) {
  SageTapeIds ids;
  ids.in_dim = in_dim;
  auto reg = [&](const std::string& name, const Matrix& m) {
    return as_parameters ? tape.parameter(prefix + "." + name, m) : tape.input(m);
  };
  std::vector<ValueId> agg_w_ids, agg_b_ids;
  for (std::size_t i = 0; i < p.w_agg.size(); ++i) {
    agg_w_ids.push_back(reg("w_agg." + std::to_string(i), p.w_agg[i]));
    agg_b_ids.push_back(reg("b_agg." + std::to_string(i), p.b_agg[i]));
  }
  for (int k = 0; k < p.steps; ++k) {
    ids.w_agg.push_back(agg_w_ids[p.agg_of_step[k]]);
    ids.b_agg.push_back(agg_b_ids[p.agg_of_step[k]]);
    ids.w_proj.push_back(reg("w_proj." + std::to_string(k), p.w_proj[k]));
    ids.b_proj.push_back(reg("b_proj." + std::to_string(k), p.b_proj[k]));
  }
  return ids;
}

std::vector<int> sample_neighbors(const Graph& g, int node, int size, uint64_t seed) {
  const auto nbrs = g.neighbors(node);
  std::vector<int> all(nbrs.begin(), nbrs.end());
  if (size <= 0 || static_cast<int>(all.size()) <= size) return all;
  Rng rng(seed_combine(seed, static_cast<uint64_t>(node)));
  std::vector<int> idx = rng.sample_without_replacement(static_cast<int>(all.size()), size);
  std::vector<int> out;
  out.reserve(idx.size());
  for (int i : idx) out.push_back(all[i]);
  std::sort(out.begin(), out.end());  // fixed iteration order for the maxpool
  return out;
}

ValueId sage_forward(Tape& tape, const Graph& g, ValueId x, const SageParams& p,
                     const SageTapeIds& ids, uint64_t seed, bool sample_all) {
  if (p.steps == 0) return x;
  if (tape.value(x).cols() != tape.value(ids.w_agg[0]).rows())
    throw validation_error("sage_forward: feature width " +
                           std::to_string(tape.value(x).cols()) + " does not match step-1 width " +
                           std::to_string(tape.value(ids.w_agg[0]).rows()));
  const int n = g.num_nodes();
  const int sample_size = sample_all ? 0 : p.neighbor_sample_size;
  ValueId h = x;
  for (int k = 0; k < p.steps; ++k) {
    ValueId messages = tape.add(tape.matmul(h, ids.w_agg[k]), ids.b_agg[k]);
    std::vector<std::vector<int>> sets(n);
    for (int v = 0; v < n; ++v)
      sets[v] = sample_neighbors(g, v, sample_size,
                                 seed_combine(seed, static_cast<uint64_t>(k)));
    ValueId pooled = tape.row_maxpool_over_sets(messages, std::move(sets));
    ValueId concat = tape.hconcat(h, pooled);
    const bool agg_bias = p.step_uses_agg_bias(k, ids.in_dim);
    ValueId bias = agg_bias ? ids.b_agg[k] : ids.b_proj[k];
    ValueId pre = tape.add(tape.matmul(concat, ids.w_proj[k]), bias);
    h = tape.l2_normalize_rows(tape.relu(pre));
  }
  return h;
}

}  // namespace gap
