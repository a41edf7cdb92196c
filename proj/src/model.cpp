#include "gap/model.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <memory>
#include <set>
#include <sstream>

#include "gap/errors.hpp"
#include "gap/pca.hpp"
#include "gap/rng.hpp"

namespace gap {

namespace {

int embedding_out_dim(const ModelConfig& cfg) {
  switch (cfg.embedding) {
    case EmbeddingKind::none:
      return cfg.features.input_dim();
    case EmbeddingKind::gcn:
      return cfg.gcn_hidden;
    case EmbeddingKind::sage:
      return cfg.sage_layers == 0 ? cfg.features.input_dim() : cfg.sage_units;
  }
  return 0;
}

}  // namespace

GapModel GapModel::create(const ModelConfig& cfg, uint64_t seed) {
  if (cfg.partitions < 2) throw validation_error("model: need at least 2 partitions");
  if (cfg.features.input_dim() <= 0)
    throw validation_error("model: feature spec has no input width");
  GapModel m;
  m.cfg_ = cfg;
  const int d = cfg.features.input_dim();
  if (cfg.embedding == EmbeddingKind::gcn) {
    m.gcn_ = make_gcn_params(d, cfg.gcn_hidden, seed_combine(seed, 0x6c), cfg.embedding_trainable);
  } else if (cfg.embedding == EmbeddingKind::sage) {
    m.sage_ = make_sage_params(d, cfg.sage_units, cfg.sage_layers, cfg.shared_pooling,
                               cfg.projection_bias, cfg.neighbor_sample_size,
                               seed_combine(seed, 0x5a), cfg.embedding_trainable);
  }
  int width = embedding_out_dim(cfg);
  int layer = 0;
  for (int units : cfg.head_hidden) {
    if (units <= 0) throw validation_error("model: head layer width must be positive");
    m.head_.push_back({xavier_init(width, units, seed_combine(seed, 0x100 + layer)),
                       Matrix(1, units)});
    width = units;
    ++layer;
  }
  m.head_.push_back({xavier_init(width, cfg.partitions, seed_combine(seed, 0x100 + layer)),
                     Matrix(1, cfg.partitions)});
  return m;
}

Matrix GapModel::features_for(const Graph& g) const {
  const FeatureSpec& spec = cfg_.features;
  switch (spec.kind) {
    case FeatureSpec::Kind::graph: {
      const Matrix& x = g.node_features();
      if (x.cols() != spec.width)
        throw validation_error("feature mismatch: graph provides width " +
                               std::to_string(x.cols()) + ", model expects " +
                               std::to_string(spec.width));
      return x;
    }
    case FeatureSpec::Kind::onehot: {
      if (!g.has_features())
        throw validation_error("feature mismatch: model needs one-hot op-type features but the "
                               "graph has none");
      const auto& names = g.feature_names();
      if (names != spec.vocab) {
        std::set<std::string> have(names.begin(), names.end());
        std::ostringstream os;
        os << "feature mismatch: graph feature columns differ from the model vocabulary;";
        os << " missing:";
        int shown = 0;
        for (const auto& v : spec.vocab)
          if (!have.count(v) && shown++ < 8) os << " " << v;
        if (shown == 0) os << " (none, column order or extra entries differ)";
        throw validation_error(os.str());
      }
      return g.node_features();
    }
    case FeatureSpec::Kind::pca:
      return pca_features(g, spec.width);
    case FeatureSpec::Kind::index: {
      if (g.num_nodes() > spec.width)
        throw validation_error("feature mismatch: graph has " + std::to_string(g.num_nodes()) +
                               " nodes but index features are capped at width " +
                               std::to_string(spec.width));
      Matrix x(g.num_nodes(), spec.width);
      for (int i = 0; i < g.num_nodes(); ++i) x(i, i) = 1.0;
      return x;
    }
  }
  throw validation_error("feature spec: unknown kind");
}

ValueId GapModel::forward(Tape& tape, const Graph& g, uint64_t seed, bool train_mode,
                          const Matrix* features_override) const {
  ValueId x = tape.input(features_override ? *features_override : features_for(g));
  ValueId z = x;
  if (cfg_.embedding == EmbeddingKind::gcn) {
    auto ahat = std::make_shared<SparseMatrix>(normalized_adjacency(g));
    GcnTapeIds ids = register_gcn(tape, gcn_, train_mode && gcn_.trainable);
    z = gcn_forward(tape, std::move(ahat), x, ids);
  } else if (cfg_.embedding == EmbeddingKind::sage) {
    SageTapeIds ids =
        register_sage(tape, sage_, cfg_.features.input_dim(), train_mode && sage_.trainable);
    z = sage_forward(tape, g, x, sage_, ids, seed, /*sample_all=*/!train_mode);
  }
  ValueId h = z;
  for (std::size_t l = 0; l < head_.size(); ++l) {
    const std::string base = "head." + std::to_string(l);
    ValueId w = train_mode ? tape.parameter(base + ".w", head_[l].w) : tape.input(head_[l].w);
    ValueId b = train_mode ? tape.parameter(base + ".b", head_[l].b) : tape.input(head_[l].b);
    ValueId pre = tape.add(tape.matmul(h, w), b);
    h = l + 1 < head_.size() ? tape.relu(pre) : pre;
  }
  return tape.row_softmax(h);
}

std::vector<NamedWeight> GapModel::weights() {
  std::vector<NamedWeight> out;
  if (cfg_.embedding == EmbeddingKind::gcn) {
    out.push_back({"gcn.w0", &gcn_.w0, gcn_.trainable});
    out.push_back({"gcn.w1", &gcn_.w1, gcn_.trainable});
    out.push_back({"gcn.w2", &gcn_.w2, gcn_.trainable});
  } else if (cfg_.embedding == EmbeddingKind::sage) {
    for (std::size_t i = 0; i < sage_.w_agg.size(); ++i) {
      out.push_back({"sage.w_agg." + std::to_string(i), &sage_.w_agg[i], sage_.trainable});
      out.push_back({"sage.b_agg." + std::to_string(i), &sage_.b_agg[i], sage_.trainable});
    }
    for (std::size_t k = 0; k < sage_.w_proj.size(); ++k) {
      out.push_back({"sage.w_proj." + std::to_string(k), &sage_.w_proj[k], sage_.trainable});
      out.push_back({"sage.b_proj." + std::to_string(k), &sage_.b_proj[k], sage_.trainable});
    }
  }
  for (std::size_t l = 0; l < head_.size(); ++l) {
    out.push_back({"head." + std::to_string(l) + ".w", &head_[l].w, true});
    out.push_back({"head." + std::to_string(l) + ".b", &head_[l].b, true});
  }
  return out;
}

std::vector<NamedWeight> GapModel::trainable_weights() {
  std::vector<NamedWeight> all = weights();
  std::vector<NamedWeight> out;
  for (auto& w : all)
    if (w.trainable) out.push_back(w);
  return out;
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw validation_error("train: learning rate must be > 0");
  if (max_epochs < 1) throw validation_error("train: max_epochs must be >= 1");
  if (balance_weight < 0.0) throw validation_error("train: balance weight must be >= 0");
  if (minibatch_size < 0) throw validation_error("train: minibatch size must be >= 0");
}

namespace {

struct GraphContext {
  const Graph* graph;
  std::shared_ptr<const SparseMatrix> adj;
  std::vector<double> degrees;
  Matrix features;
};

struct LossNodes {
  ValueId loss, ncut, balance;
};

LossNodes build_loss(Tape& tape, const GraphContext& ctx, ValueId y, int g_parts,
                     const TrainConfig& cfg, uint64_t epoch_seed) {
  LossOptions opts;
  opts.balance_weight = cfg.balance_weight;
  opts.normalized_balance = cfg.normalized_balance;
  const int n = ctx.graph->num_nodes();
  if (cfg.minibatch_size > 0 && cfg.minibatch_size < n) {
    Rng rng(seed_combine(epoch_seed, 0xba7c4));
    std::vector<int> batch =
        rng.sample_without_replacement(n, cfg.minibatch_size);
    std::sort(batch.begin(), batch.end());
    ValueId loss = gap_loss_minibatch_node(tape, *ctx.graph, y, batch, g_parts, opts);
    return {loss, loss, loss};  // components not broken out in minibatch mode
  }
  ValueId ncut = expected_ncut_node(tape, ctx.adj, y, ctx.degrees);
  ValueId balance = balance_error_node(tape, y, g_parts, opts.normalized_balance);
  ValueId loss = tape.add(ncut, tape.scale(balance, opts.balance_weight));
  return {loss, ncut, balance};
}

std::vector<Matrix> snapshot_weights(const std::vector<NamedWeight>& ws) {
  std::vector<Matrix> out;
  out.reserve(ws.size());
  for (const auto& w : ws) out.push_back(*w.matrix);
  return out;
}

void restore_weights(const std::vector<NamedWeight>& ws, const std::vector<Matrix>& snap) {
  for (std::size_t i = 0; i < ws.size(); ++i) *ws[i].matrix = snap[i];
}

}  // namespace

TrainResult train_multi_graph(GapModel& m, const std::vector<Graph>& train_graphs,
                              const std::vector<Graph>& val_graphs, const TrainConfig& cfg,
                              AdamState* optimizer) {
  cfg.validate();
  if (train_graphs.empty()) throw validation_error("train: no training graphs");
  const auto t_start = std::chrono::steady_clock::now();
  const int g_parts = m.partitions();

  std::vector<GraphContext> train_ctx, val_ctx;
  for (const Graph& g : train_graphs)
    train_ctx.push_back({&g, std::make_shared<SparseMatrix>(adjacency_matrix(g)),
                         degree_vector(g), m.features_for(g)});
  for (const Graph& g : val_graphs)
    val_ctx.push_back({&g, std::make_shared<SparseMatrix>(adjacency_matrix(g)), degree_vector(g),
                       m.features_for(g)});

  AdamState local_optimizer(AdamConfig{cfg.learning_rate});
  AdamState& adam = optimizer ? *optimizer : local_optimizer;
  adam.set_learning_rate(cfg.learning_rate);

  std::vector<NamedWeight> trainable = m.trainable_weights();
  std::vector<Matrix> best_snapshot = snapshot_weights(trainable);
  TrainResult result;
  result.per_graph_loss.assign(train_ctx.size(), {});
  result.best_loss = std::numeric_limits<double>::infinity();
  result.best_epoch = -1;

  const int num_graphs = static_cast<int>(train_ctx.size());
  std::vector<int> order(num_graphs);
  for (int i = 0; i < num_graphs; ++i) order[i] = i;

  // Evaluates the current weights on a context without touching them.
  struct Eval {
    double loss, ncut, balance;
    Matrix y;
  };
  auto evaluate = [&](const GraphContext& ctx, uint64_t seed) -> Eval {
    Tape tape;
    try {
      ValueId y = m.forward(tape, *ctx.graph, seed, /*train_mode=*/false, &ctx.features);
      ValueId ncut = expected_ncut_node(tape, ctx.adj, y, ctx.degrees);
      ValueId balance = balance_error_node(tape, y, g_parts, cfg.normalized_balance);
      ValueId loss = tape.add(ncut, tape.scale(balance, cfg.balance_weight));
      return {tape.value(loss)(0, 0), tape.value(ncut)(0, 0), tape.value(balance)(0, 0),
              tape.value(y)};
    } catch (const numeric_error&) {
      const double nan = std::numeric_limits<double>::quiet_NaN();
      return {nan, nan, nan, Matrix(ctx.graph->num_nodes(), g_parts)};
    }
  };

  auto validation_loss = [&](double fallback) {
    if (val_ctx.empty()) return fallback;
    double sum = 0.0;
    for (const auto& ctx : val_ctx) sum += evaluate(ctx, /*seed=*/0).loss;
    return sum / static_cast<double>(val_ctx.size());
  };

  int epoch = 0;
  for (; epoch < cfg.max_epochs; ++epoch) {
    // Per-epoch record from the pre-step weights.
    EpochRecord rec;
    rec.epoch = epoch;
    for (int gi = 0; gi < num_graphs; ++gi) {
      const auto ev = evaluate(train_ctx[gi], seed_combine(cfg.seed, epoch, gi));
      rec.loss += ev.loss;
      rec.expected_ncut += ev.ncut;
      rec.balance_error += ev.balance;
      const HardAssignment a = argmax_assignment(ev.y);
      rec.edge_cut_ratio += edge_cut_ratio(*train_ctx[gi].graph, a);
      rec.balancedness += balancedness(a, g_parts);
      result.per_graph_loss[gi].push_back(ev.loss);
    }
    rec.loss /= num_graphs;
    rec.expected_ncut /= num_graphs;
    rec.balance_error /= num_graphs;
    rec.edge_cut_ratio /= num_graphs;
    rec.balancedness /= num_graphs;

    if (!std::isfinite(rec.loss)) {
      result.diverged = true;
      result.history.push_back(rec);
      break;
    }
    rec.val_loss = validation_loss(rec.loss);
    result.history.push_back(rec);

    if (rec.val_loss < result.best_loss) {
      result.best_loss = rec.val_loss;
      result.best_epoch = epoch;
      best_snapshot = snapshot_weights(trainable);
    } else if (cfg.patience > 0 && epoch - result.best_epoch >= cfg.patience) {
      break;
    }

    // Optimizer pass over shuffled training graphs.
    Rng shuffle_rng(seed_combine(cfg.seed, epoch, 0x0d));
    for (int i = num_graphs - 1; i > 0; --i) {
      const int j = static_cast<int>(shuffle_rng.uniform_int(i + 1));
      std::swap(order[i], order[j]);
    }
    std::vector<Matrix> grad_accum;
    bool step_failed = false;
    for (int idx = 0; idx < num_graphs && !step_failed; ++idx) {
      const int gi = order[idx];
      const GraphContext& ctx = train_ctx[gi];
      Tape tape;
      const uint64_t visit_seed = seed_combine(cfg.seed, epoch, gi);
      ValueId y = -1;
      LossNodes nodes{};
      try {
        y = m.forward(tape, *ctx.graph, visit_seed, /*train_mode=*/true, &ctx.features);
        nodes = build_loss(tape, ctx, y, g_parts, cfg, visit_seed);
      } catch (const numeric_error&) {
        step_failed = true;  // overflowed weights; keep the best finite state
        break;
      }
      const double loss_value = tape.value(nodes.loss)(0, 0);
      if (!std::isfinite(loss_value)) {
        step_failed = true;
        break;
      }
      tape.backward(nodes.loss);
      const auto& param_ids = tape.parameters();
      if (param_ids.size() != trainable.size())
        throw validation_error("train: tape parameter count does not match model weights");
      if (cfg.accumulate_grads) {
        if (grad_accum.empty())
          for (ValueId pid : param_ids) grad_accum.push_back(tape.grad(pid));
        else
          for (std::size_t p = 0; p < param_ids.size(); ++p) {
            const Matrix& gm = tape.grad(param_ids[p]);
            for (std::size_t k = 0; k < gm.size(); ++k) grad_accum[p].data()[k] += gm.data()[k];
          }
      } else {
        std::vector<Matrix*> params;
        std::vector<const Matrix*> grads;
        std::vector<std::string> names;
        for (std::size_t p = 0; p < param_ids.size(); ++p) {
          if (tape.parameter_name(param_ids[p]) != trainable[p].name)
            throw validation_error("train: parameter order mismatch at '" + trainable[p].name +
                                   "'");
          params.push_back(trainable[p].matrix);
          grads.push_back(&tape.grad(param_ids[p]));
          names.push_back(trainable[p].name);
        }
        adam.step(std::move(params), grads, names);
      }
    }
    if (step_failed) {
      result.diverged = true;
      break;
    }
    if (cfg.accumulate_grads && !grad_accum.empty()) {
      std::vector<Matrix*> params;
      std::vector<const Matrix*> grads;
      std::vector<std::string> names;
      for (std::size_t p = 0; p < trainable.size(); ++p) {
        params.push_back(trainable[p].matrix);
        grads.push_back(&grad_accum[p]);
        names.push_back(trainable[p].name);
      }
      adam.step(std::move(params), grads, names);
    }
  }

  // The last optimizer step may have improved on everything recorded.
  if (!result.diverged) {
    double final_train = 0.0;
    for (int gi = 0; gi < num_graphs; ++gi)
      final_train += evaluate(train_ctx[gi], seed_combine(cfg.seed, epoch, gi)).loss;
    final_train /= num_graphs;
    if (std::isfinite(final_train)) {
      const double final_val = validation_loss(final_train);
      if (final_val < result.best_loss) {
        result.best_loss = final_val;
        result.best_epoch = epoch;
        best_snapshot = snapshot_weights(trainable);
      }
    }
  }
  restore_weights(trainable, best_snapshot);
  result.wall_clock_ms = std::chrono::duration<double, std::milli>(
                             std::chrono::steady_clock::now() - t_start)
                             .count();
  return result;
}

TrainResult train_single_graph(GapModel& m, const Graph& g, const TrainConfig& cfg,
                               AdamState* optimizer) {
  return train_multi_graph(m, {g}, {}, cfg, optimizer);
}

InferResult infer(const GapModel& m, const Graph& g) {
  const auto t0 = std::chrono::steady_clock::now();
  Tape tape;
  ValueId y = m.forward(tape, g, /*seed=*/0, /*train_mode=*/false);
  InferResult out;
  out.probabilities = tape.value(y);
  out.assignment = argmax_assignment(out.probabilities);
  const double ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  out.metrics = compute_metrics(g, out.assignment, m.partitions());
  out.metrics.wall_clock_ms = ms;
  return out;
}

}  // namespace gap
