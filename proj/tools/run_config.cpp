#include "run_config.hpp"

#include <set>

#include "gap/errors.hpp"
#include "gap/fsutil.hpp"
#include "gap/graph_io.hpp"
#include "gap/presets.hpp"

namespace gap::cli {

namespace {

void reject_unknown_keys(const nlohmann::json& j, const std::set<std::string>& known,
                         const std::string& section) {
  if (!j.is_object()) throw validation_error("config: '" + section + "' must be an object");
  for (const auto& [key, value] : j.items())
    if (!known.count(key))
      throw validation_error("config: unknown key '" + key + "' in section '" + section + "'");
}

FeatureSpec::Kind feature_kind_from(const std::string& s) {
  if (s == "graph") return FeatureSpec::Kind::graph;
  if (s == "onehot") return FeatureSpec::Kind::onehot;
  if (s == "pca") return FeatureSpec::Kind::pca;
  if (s == "index") return FeatureSpec::Kind::index;
  throw validation_error("config: unknown feature kind '" + s + "'");
}

std::string feature_kind_str(FeatureSpec::Kind k) {
  switch (k) {
    case FeatureSpec::Kind::graph: return "graph";
    case FeatureSpec::Kind::onehot: return "onehot";
    case FeatureSpec::Kind::pca: return "pca";
    case FeatureSpec::Kind::index: return "index";
  }
  return "pca";
}

}  // namespace

RunConfig parse_run_config(const nlohmann::json& j) {
  reject_unknown_keys(j, {"dataset", "model", "training", "bench", "output"}, "<root>");
  RunConfig cfg;

  if (j.contains("model")) {
    const auto& jm = j.at("model");
    reject_unknown_keys(jm,
                        {"preset", "embedding", "embedding_trainable", "gcn_hidden",
                         "sage_layers", "sage_units", "shared_pooling", "projection_bias",
                         "neighbor_sample_size", "head_hidden", "features", "partitions"},
                        "model");
    if (jm.contains("preset")) {
      cfg.preset = jm.at("preset").get<std::string>();
      const Preset p = get_preset(cfg.preset);
      cfg.model = p.model;
      cfg.train = p.train;
    }
    if (jm.contains("embedding")) {
      const std::string e = jm.at("embedding").get<std::string>();
      cfg.model.embedding = e == "gcn"    ? EmbeddingKind::gcn
                            : e == "sage" ? EmbeddingKind::sage
                            : e == "none" ? EmbeddingKind::none
                                          : throw validation_error(
                                                "config: unknown embedding '" + e + "'");
    }
    if (jm.contains("embedding_trainable"))
      cfg.model.embedding_trainable = jm.at("embedding_trainable").get<bool>();
    if (jm.contains("gcn_hidden")) cfg.model.gcn_hidden = jm.at("gcn_hidden").get<int>();
    if (jm.contains("sage_layers")) cfg.model.sage_layers = jm.at("sage_layers").get<int>();
    if (jm.contains("sage_units")) cfg.model.sage_units = jm.at("sage_units").get<int>();
    if (jm.contains("shared_pooling"))
      cfg.model.shared_pooling = jm.at("shared_pooling").get<bool>();
    if (jm.contains("projection_bias"))
      cfg.model.projection_bias = jm.at("projection_bias").get<std::string>() == "proj"
                                      ? SageParams::ProjectionBias::proj
                                      : SageParams::ProjectionBias::agg;
    if (jm.contains("neighbor_sample_size"))
      cfg.model.neighbor_sample_size = jm.at("neighbor_sample_size").get<int>();
    if (jm.contains("head_hidden"))
      cfg.model.head_hidden = jm.at("head_hidden").get<std::vector<int>>();
    if (jm.contains("features")) {
      const auto& jf = jm.at("features");
      reject_unknown_keys(jf, {"kind", "width", "vocab"}, "model.features");
      if (jf.contains("kind"))
        cfg.model.features.kind = feature_kind_from(jf.at("kind").get<std::string>());
      if (jf.contains("width")) cfg.model.features.width = jf.at("width").get<int>();
      if (jf.contains("vocab"))
        cfg.model.features.vocab = jf.at("vocab").get<std::vector<std::string>>();
    }
    if (jm.contains("partitions")) cfg.model.partitions = jm.at("partitions").get<int>();
  }

  if (j.contains("dataset")) {
    const auto& jd = j.at("dataset");
    reject_unknown_keys(jd, {"train", "val", "format", "weighted", "vocab"}, "dataset");
    if (jd.contains("train")) cfg.dataset.train = jd.at("train").get<std::vector<std::string>>();
    if (jd.contains("val")) cfg.dataset.val = jd.at("val").get<std::vector<std::string>>();
    if (jd.contains("format")) cfg.dataset.format = jd.at("format").get<std::string>();
    if (jd.contains("weighted")) cfg.dataset.weighted = jd.at("weighted").get<bool>();
    if (jd.contains("vocab")) cfg.dataset.vocab = jd.at("vocab").get<std::string>();
  }

  if (j.contains("training")) {
    const auto& jt = j.at("training");
    reject_unknown_keys(jt,
                        {"learning_rate", "max_epochs", "seed", "balance_weight",
                         "normalized_balance", "minibatch_size", "patience",
                         "accumulate_grads"},
                        "training");
    if (jt.contains("learning_rate")) cfg.train.learning_rate = jt.at("learning_rate").get<double>();
    if (jt.contains("max_epochs")) cfg.train.max_epochs = jt.at("max_epochs").get<int>();
    if (jt.contains("seed")) cfg.train.seed = jt.at("seed").get<uint64_t>();
    if (jt.contains("balance_weight"))
      cfg.train.balance_weight = jt.at("balance_weight").get<double>();
    if (jt.contains("normalized_balance"))
      cfg.train.normalized_balance = jt.at("normalized_balance").get<bool>();
    if (jt.contains("minibatch_size"))
      cfg.train.minibatch_size = jt.at("minibatch_size").get<int>();
    if (jt.contains("patience")) cfg.train.patience = jt.at("patience").get<int>();
    if (jt.contains("accumulate_grads"))
      cfg.train.accumulate_grads = jt.at("accumulate_grads").get<bool>();
  }

  if (j.contains("bench")) {
    const auto& jb = j.at("bench");
    reject_unknown_keys(jb, {"graphs", "partitions", "repeats", "partitioners"}, "bench");
    if (jb.contains("graphs")) cfg.bench.graphs = jb.at("graphs").get<std::vector<std::string>>();
    if (jb.contains("partitions")) cfg.bench.partitions = jb.at("partitions").get<int>();
    if (jb.contains("repeats")) cfg.bench.repeats = jb.at("repeats").get<int>();
    if (jb.contains("partitioners")) {
      for (const auto& jp : jb.at("partitioners")) {
        BenchPartitionerSpec spec;
        if (jp.is_string()) {
          spec.kind = jp.get<std::string>();
          spec.name = spec.kind;
        } else {
          reject_unknown_keys(jp, {"kind", "name", "checkpoint", "command"},
                              "bench.partitioners[]");
          spec.kind = jp.at("kind").get<std::string>();
          spec.name = jp.value("name", spec.kind);
          spec.checkpoint = jp.value("checkpoint", "");
          spec.command = jp.value("command", "");
        }
        cfg.bench.partitioners.push_back(std::move(spec));
      }
    }
  }

  if (j.contains("output")) {
    const auto& jo = j.at("output");
    reject_unknown_keys(jo, {"dir"}, "output");
    if (jo.contains("dir")) cfg.output.dir = jo.at("dir").get<std::string>();
  }
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw validation_error("config '" + path.string() + "': " + e.what());
  }
  return parse_run_config(j);
}

nlohmann::json run_config_to_json(const RunConfig& cfg) {
  nlohmann::json j;
  j["dataset"] = {{"train", cfg.dataset.train},
                  {"val", cfg.dataset.val},
                  {"format", cfg.dataset.format},
                  {"weighted", cfg.dataset.weighted},
                  {"vocab", cfg.dataset.vocab}};
  j["model"] = {
      {"embedding", cfg.model.embedding == EmbeddingKind::gcn    ? "gcn"
                    : cfg.model.embedding == EmbeddingKind::sage ? "sage"
                                                                 : "none"},
      {"embedding_trainable", cfg.model.embedding_trainable},
      {"gcn_hidden", cfg.model.gcn_hidden},
      {"sage_layers", cfg.model.sage_layers},
      {"sage_units", cfg.model.sage_units},
      {"shared_pooling", cfg.model.shared_pooling},
      {"projection_bias",
       cfg.model.projection_bias == SageParams::ProjectionBias::proj ? "proj" : "agg"},
      {"neighbor_sample_size", cfg.model.neighbor_sample_size},
      {"head_hidden", cfg.model.head_hidden},
      {"features",
       {{"kind", feature_kind_str(cfg.model.features.kind)},
        {"width", cfg.model.features.width},
        {"vocab", cfg.model.features.vocab}}},
      {"partitions", cfg.model.partitions}};
  j["training"] = {{"learning_rate", cfg.train.learning_rate},
                   {"max_epochs", cfg.train.max_epochs},
                   {"seed", cfg.train.seed},
                   {"balance_weight", cfg.train.balance_weight},
                   {"normalized_balance", cfg.train.normalized_balance},
                   {"minibatch_size", cfg.train.minibatch_size},
                   {"patience", cfg.train.patience},
                   {"accumulate_grads", cfg.train.accumulate_grads}};
  if (!cfg.bench.graphs.empty() || !cfg.bench.partitioners.empty()) {
    nlohmann::json parts = nlohmann::json::array();
    for (const auto& p : cfg.bench.partitioners)
      parts.push_back({{"kind", p.kind},
                       {"name", p.name},
                       {"checkpoint", p.checkpoint},
                       {"command", p.command}});
    j["bench"] = {{"graphs", cfg.bench.graphs},
                  {"partitions", cfg.bench.partitions},
                  {"repeats", cfg.bench.repeats},
                  {"partitioners", parts}};
  }
  j["output"] = {{"dir", cfg.output.dir}};
  return j;
}

Graph load_graph_file(const std::filesystem::path& path, const std::string& format,
                      bool weighted, const std::vector<std::string>& vocab) {
  std::string fmt = format;
  if (fmt == "auto" || fmt.empty()) {
    const std::string ext = path.extension().string();
    if (ext == ".metis" || ext == ".graph")
      fmt = "metis";
    else if (ext == ".fg" || ext == ".featured")
      fmt = "featured";
    else
      fmt = "edgelist";
  }
  if (fmt == "metis") return load_metis(path);
  if (fmt == "featured") return load_featured_graph(path, vocab);
  if (fmt == "edgelist") return load_edge_list(path, weighted);
  throw validation_error("unknown graph format '" + format + "'");
}

}  // namespace gap::cli
