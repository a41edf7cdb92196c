#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "gap/graph.hpp"
#include "gap/tape.hpp"

namespace gap {

// 3-layer GCN: Z = tanh(Ahat tanh(Ahat tanh(Ahat X W0) W1) W2).
struct GcnParams {
  Matrix w0;  // d x h
  Matrix w1;  // h x h
  Matrix w2;  // h x h
  bool trainable = true;
};

GcnParams make_gcn_params(int in_dim, int hidden, uint64_t seed, bool trainable);

struct GcnTapeIds {
  ValueId w0, w1, w2;
};

// Registers the weights on the tape: gradient-requiring parameters when
// as_parameters is set, plain inputs otherwise (the gradient-stop switch
// between the partitioning and embedding modules).
GcnTapeIds register_gcn(Tape& tape, const GcnParams& p, bool as_parameters,
                        const std::string& prefix = "gcn");

ValueId gcn_forward(Tape& tape, std::shared_ptr<const SparseMatrix> ahat, ValueId x,
                    const GcnTapeIds& ids);

// GraphSAGE with max-pool aggregation. Per step k over incoming width w:
//   messages  m_j = W_agg h_j + b_agg            (w -> w)
//   pooled    h_N(i) = max over sampled neighbors, zero for empty sets
//   update    h_i = relu(W_proj [h_i, h_N(i)] + bias), then row L2-normalize
// The printed update reuses the aggregation bias in the projection line;
// `projection_bias` keeps that behavior (`agg`) with a `proj` escape hatch.
// At width-changing steps the aggregation bias cannot be reused and the
// dedicated projection bias applies regardless of the mode; the same shape
// rule scopes `shared_pooling` to the steps whose incoming width equals the
// hidden width.
struct SageParams {
  enum class ProjectionBias { agg, proj };

  int steps = 0;  // K; 0 passes features through unchanged
  int hidden = 0;
  bool shared_pooling = false;
  ProjectionBias projection_bias = ProjectionBias::agg;
  int neighbor_sample_size = 0;  // 0 = all neighbors
  bool trainable = true;

  // Distinct aggregation pairs (w x w, 1 x w); agg_of_step maps each step to
  // its pair, so a shared pair is stored and updated once.
  std::vector<Matrix> w_agg, b_agg;
  std::vector<int> agg_of_step;
  std::vector<Matrix> w_proj, b_proj;  // per step: 2w x h, 1 x h

  int step_in_width(int step, int in_dim) const { return step == 0 ? in_dim : hidden; }
  bool step_shares_pooling(int step, int in_dim) const {
    return shared_pooling && step_in_width(step, in_dim) == hidden;
  }
  bool step_uses_agg_bias(int step, int in_dim) const {
    return projection_bias == ProjectionBias::agg && step_in_width(step, in_dim) == hidden;
  }
};

SageParams make_sage_params(int in_dim, int hidden, int steps, bool shared_pooling,
                            SageParams::ProjectionBias bias_mode, int neighbor_sample_size,
                            uint64_t seed, bool trainable);

struct SageTapeIds {
  std::vector<ValueId> w_agg, b_agg, w_proj, b_proj;
  int in_dim = 0;
};

SageTapeIds register_sage(Tape& tape, const SageParams& p, int in_dim, bool as_parameters,
                          const std::string& prefix = "sage");

// Uniform sample without replacement of min(size, |N(v)|) neighbors;
// size = 0 returns all of N(v). Deterministic per (seed, node).
std::vector<int> sample_neighbors(const Graph& g, int node, int size, uint64_t seed);

// seed feeds per-(step, node) sampling streams; sample_all overrides the
// configured sample size (inference), making the pass sampling-free.
ValueId sage_forward(Tape& tape, const Graph& g, ValueId x, const SageParams& p,
                     const SageTapeIds& ids, uint64_t seed, bool sample_all = false);

}  // namespace gap
