#include "gap/presets.hpp"

#include "gap/errors.hpp"

namespace gap {

namespace {

Preset base_preset(const std::string& name) {
  Preset p;
  p.name = name;
  p.train.preset = name;
  p.train.patience = 50;
  p.train.max_epochs = 300;
  // These presets target graphs of >= 1000 nodes, where the raw balance
  // quadratic dwarfs the normalized-cut term; the normalized mode keeps the
  // two commensurate.
  p.train.normalized_balance = true;
  p.train.balance_weight = 1.0;
  p.model.partitions = 3;
  return p;
}

}  // namespace

Preset get_preset(const std::string& name) {
  if (name == "gap-op-sage-trained") {
    // One-hot op-type features; GraphSAGE trained jointly with the head.
    Preset p = base_preset(name);
    p.model.embedding = EmbeddingKind::sage;
    p.model.embedding_trainable = true;
    p.model.sage_layers = 5;
    p.model.sage_units = 512;
    p.model.shared_pooling = true;
    p.model.head_hidden = {64, 64, 64};
    p.model.features.kind = FeatureSpec::Kind::onehot;
    p.train.learning_rate = 7.5e-5;
    return p;
  }
  if (name == "gap-op-gcn-offline") {
    Preset p = base_preset(name);
    p.model.embedding = EmbeddingKind::gcn;
    p.model.embedding_trainable = false;
    p.model.gcn_hidden = 64;
    p.model.head_hidden = {64, 64, 64};
    p.model.features.kind = FeatureSpec::Kind::onehot;
    p.train.learning_rate = 7.5e-5;
    return p;
  }
  if (name == "gap-id-gcn-offline") {
    // Node-index one-hot features instead of op types.
    Preset p = base_preset(name);
    p.model.embedding = EmbeddingKind::gcn;
    p.model.embedding_trainable = false;
    p.model.gcn_hidden = 64;
    p.model.head_hidden = {64, 64, 64};
    p.model.features.kind = FeatureSpec::Kind::index;
    p.model.features.width = 2048;
    p.train.learning_rate = 7.5e-5;
    return p;
  }
  if (name == "gap-random-1") {
    Preset p = base_preset(name);
    p.model.embedding = EmbeddingKind::sage;
    p.model.embedding_trainable = true;
    p.model.sage_layers = 5;
    p.model.sage_units = 128;
    p.model.shared_pooling = true;
    p.model.head_hidden = {64, 64};
    p.model.features.kind = FeatureSpec::Kind::pca;
    p.model.features.width = 1000;
    p.train.learning_rate = 7.5e-4;
    p.train.max_epochs = 500;
    return p;
  }
  if (name == "gap-random-10") {
    Preset p = base_preset(name);
    p.model.embedding = EmbeddingKind::sage;
    p.model.embedding_trainable = true;
    p.model.sage_layers = 2;
    p.model.sage_units = 256;
    p.model.shared_pooling = true;
    p.model.head_hidden = {128, 128, 128};
    p.model.features.kind = FeatureSpec::Kind::pca;
    p.model.features.width = 1000;
    p.train.learning_rate = 7.5e-6;
    return p;
  }
  if (name == "gap-scalefree-1") {
    Preset p = base_preset(name);
    p.model.embedding = EmbeddingKind::sage;
    p.model.embedding_trainable = true;
    p.model.sage_layers = 5;
    p.model.sage_units = 512;
    p.model.head_hidden = {128, 128, 128};
    p.model.features.kind = FeatureSpec::Kind::pca;
    p.model.features.width = 1000;
    p.train.learning_rate = 2.5e-6;
    return p;
  }
  if (name == "gap-scalefree-10") {
    Preset p = base_preset(name);
    p.model.embedding = EmbeddingKind::sage;
    p.model.embedding_trainable = true;
    p.model.sage_layers = 4;
    p.model.sage_units = 128;
    p.model.head_hidden = {64};
    p.model.features.kind = FeatureSpec::Kind::pca;
    p.model.features.width = 1000;
    p.train.learning_rate = 7.5e-6;
    return p;
  }
  throw validation_error("unknown preset '" + name + "'");
}

std::vector<std::string> preset_names() {
  return {"gap-op-sage-trained", "gap-op-gcn-offline", "gap-id-gcn-offline",
          "gap-random-1",        "gap-random-10",      "gap-scalefree-1",
          "gap-scalefree-10"};
}

}  // namespace gap
