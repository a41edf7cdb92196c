#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gap/embedding.hpp"
#include "gap/graph.hpp"
#include "gap/loss.hpp"
#include "gap/matrix.hpp"
#include "gap/metrics.hpp"
#include "gap/optim.hpp"
#include "gap/tape.hpp"

namespace gap {

enum class EmbeddingKind { none, gcn, sage };

// How the model turns a graph into its input feature matrix. Fixed at model
// creation; checkpoints carry it so inference graphs are encoded identically
// to training graphs.
struct FeatureSpec {
  enum class Kind {
    graph,   // use the graph's own feature matrix as-is
    onehot,  // one-hot op types over a fixed vocabulary
    pca,     // principal components of the adjacency rows, zero-padded
    index,   // one-hot node index, capped at `width`
  };
  Kind kind = Kind::pca;
  int width = 0;  // input width for pca/index/graph; onehot uses vocab size
  std::vector<std::string> vocab;

  int input_dim() const { return kind == Kind::onehot ? static_cast<int>(vocab.size()) : width; }
};

struct ModelConfig {
  EmbeddingKind embedding = EmbeddingKind::gcn;
  bool embedding_trainable = false;  // the gradient-stop switch (offline|trained)
  int gcn_hidden = 64;
  int sage_layers = 5;
  int sage_units = 512;
  bool shared_pooling = false;
  SageParams::ProjectionBias projection_bias = SageParams::ProjectionBias::agg;
  int neighbor_sample_size = 0;  // 0 = all
  std::vector<int> head_hidden = {64, 64, 64};
  FeatureSpec features;
  int partitions = 3;
};

struct NamedWeight {
  std::string name;
  Matrix* matrix;
  bool trainable;
};

struct DenseLayer {
  Matrix w;
  Matrix b;
};

// Embedding module + fully-connected softmax head.
class GapModel {
public:
  GapModel() = default;
  static GapModel create(const ModelConfig& cfg, uint64_t seed);

  const ModelConfig& config() const { return cfg_; }
  int partitions() const { return cfg_.partitions; }

  // Feature matrix per the model's feature spec. Throws a feature-mismatch
  // error naming missing vocabulary entries for one-hot models.
  Matrix features_for(const Graph& g) const;

  // Records the forward pass and returns the Y node (rows sum to 1).
  // train_mode registers trainable weights as tape parameters; inference
  // registers everything as inputs and always samples all neighbors.
  // features_override skips feature construction (training caches it).
  ValueId forward(Tape& tape, const Graph& g, uint64_t seed, bool train_mode,
                  const Matrix* features_override = nullptr) const;

  // Canonical weight enumeration; order matches tape registration order.
  std::vector<NamedWeight> weights();
  std::vector<NamedWeight> trainable_weights();

  GcnParams& gcn() { return gcn_; }
  SageParams& sage() { return sage_; }
  std::vector<DenseLayer>& head() { return head_; }

private:
  ModelConfig cfg_;
  GcnParams gcn_;
  SageParams sage_;
  std::vector<DenseLayer> head_;
};

struct TrainConfig {
  double learning_rate = 7.5e-5;
  int max_epochs = 300;
  uint64_t seed = 1;
  double balance_weight = 1.0;
  bool normalized_balance = false;
  int minibatch_size = 0;  // 0 = full batch
  int patience = 50;       // epochs without improvement before stopping
  bool accumulate_grads = false;  // multi-graph: one step per epoch instead of per visit
  std::string preset;

  void validate() const;
};

struct EpochRecord {
  int epoch = 0;
  double loss = 0.0;            // mean over training graphs
  double expected_ncut = 0.0;
  double balance_error = 0.0;
  double edge_cut_ratio = 0.0;  // argmax metrics, mean over training graphs
  double balancedness = 0.0;
  double val_loss = 0.0;        // = loss when no validation graphs
};

struct TrainResult {
  std::vector<EpochRecord> history;
  std::vector<std::vector<double>> per_graph_loss;  // [graph][epoch]
  int best_epoch = 0;
  double best_loss = 0.0;  // selection criterion at best epoch
  bool diverged = false;
  double wall_clock_ms = 0.0;
};

// Full-batch (or minibatch) descent on the loss for one graph; the model is
// left holding the best-by-loss weights.
TrainResult train_single_graph(GapModel& m, const Graph& g, const TrainConfig& cfg,
                               AdamState* optimizer = nullptr);

// Epochs iterate over training graphs (shuffled per seed), one optimizer
// step per graph visit; early stopping on validation loss (training loss
// when val_graphs is empty); the model is left holding the best weights.
TrainResult train_multi_graph(GapModel& m, const std::vector<Graph>& train_graphs,
                              const std::vector<Graph>& val_graphs, const TrainConfig& cfg,
                              AdamState* optimizer = nullptr);

struct InferResult {
  HardAssignment assignment;
  Matrix probabilities;
  MetricsReport metrics;  // wall_clock_ms covers featureization + forward + argmax
};

InferResult infer(const GapModel& m, const Graph& g);

}  // namespace gap
