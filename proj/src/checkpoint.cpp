#include "gap/checkpoint.hpp"

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <json.hpp>

#include "gap/errors.hpp"
#include "gap/fsutil.hpp"

namespace gap {

namespace {

constexpr char kMagic[8] = {'G', 'A', 'P', 'C', 'K', 'P', 'T', '\n'};
constexpr uint32_t kFormatVersion = 1;

void put_u32(std::string& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& out, uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f64(std::string& out, double d) {
  uint64_t bits;
  std::memcpy(&bits, &d, 8);
  put_u64(out, bits);
}

struct Reader {
  const std::string& buf;
  std::size_t pos = 0;

  void need(std::size_t n, const char* what) const {
    if (pos + n > buf.size())
      throw io_error(std::string("checkpoint truncated while reading ") + what);
  }
  uint32_t u32(const char* what) {
    need(4, what);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(static_cast<unsigned char>(buf[pos++])) << (8 * i);
    return v;
  }
  uint64_t u64(const char* what) {
    need(8, what);
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(static_cast<unsigned char>(buf[pos++])) << (8 * i);
    return v;
  }
  double f64(const char* what) {
    const uint64_t bits = u64(what);
    double d;
    std::memcpy(&d, &bits, 8);
    return d;
  }
  std::string bytes(std::size_t n, const char* what) {
    need(n, what);
    std::string s = buf.substr(pos, n);
    pos += n;
    return s;
  }
};

nlohmann::json feature_spec_json(const FeatureSpec& fs) {
  nlohmann::json j;
  switch (fs.kind) {
    case FeatureSpec::Kind::graph: j["kind"] = "graph"; break;
    case FeatureSpec::Kind::onehot: j["kind"] = "onehot"; break;
    case FeatureSpec::Kind::pca: j["kind"] = "pca"; break;
    case FeatureSpec::Kind::index: j["kind"] = "index"; break;
  }
  j["width"] = fs.width;
  j["vocab"] = fs.vocab;
  j["vocab_digest"] = vocabulary_digest(fs.vocab);
  return j;
}

FeatureSpec feature_spec_from_json(const nlohmann::json& j) {
  FeatureSpec fs;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "graph")
    fs.kind = FeatureSpec::Kind::graph;
  else if (kind == "onehot")
    fs.kind = FeatureSpec::Kind::onehot;
  else if (kind == "pca")
    fs.kind = FeatureSpec::Kind::pca;
  else if (kind == "index")
    fs.kind = FeatureSpec::Kind::index;
  else
    throw io_error("checkpoint: unknown feature kind '" + kind + "'");
  fs.width = j.at("width").get<int>();
  fs.vocab = j.at("vocab").get<std::vector<std::string>>();
  if (j.at("vocab_digest").get<std::string>() != vocabulary_digest(fs.vocab))
    throw io_error("checkpoint: vocabulary digest mismatch");
  return fs;
}

}  // namespace

std::string vocabulary_digest(const std::vector<std::string>& vocab) {
  uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](unsigned char c) {
    h ^= c;
    h *= 0x100000001b3ULL;
  };
  for (const auto& name : vocab) {
    for (unsigned char c : name) mix(c);
    mix('\n');
  }
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
  return hex;
}

void save_checkpoint(GapModel& model, const std::filesystem::path& path,
                     const std::string& config_fingerprint, const OptimizerSnapshot* optimizer) {
  const ModelConfig& cfg = model.config();
  nlohmann::json meta;
  meta["embedding"] = cfg.embedding == EmbeddingKind::gcn    ? "gcn"
                      : cfg.embedding == EmbeddingKind::sage ? "sage"
                                                             : "none";
  meta["embedding_trainable"] = cfg.embedding_trainable;
  meta["gcn_hidden"] = cfg.gcn_hidden;
  meta["sage_layers"] = cfg.sage_layers;
  meta["sage_units"] = cfg.sage_units;
  meta["shared_pooling"] = cfg.shared_pooling;
  meta["projection_bias"] =
      cfg.projection_bias == SageParams::ProjectionBias::agg ? "agg" : "proj";
  meta["neighbor_sample_size"] = cfg.neighbor_sample_size;
  meta["head_hidden"] = cfg.head_hidden;
  meta["features"] = feature_spec_json(cfg.features);
  meta["partitions"] = cfg.partitions;
  meta["config_fingerprint"] = config_fingerprint;
  const std::string meta_str = meta.dump();

  std::string out;
  out.append(kMagic, sizeof kMagic);
  put_u32(out, kFormatVersion);
  put_u32(out, static_cast<uint32_t>(meta_str.size()));
  out += meta_str;

  const auto ws = model.weights();
  put_u32(out, static_cast<uint32_t>(ws.size()));
  for (const auto& w : ws) {
    put_u32(out, static_cast<uint32_t>(w.name.size()));
    out += w.name;
    put_u32(out, static_cast<uint32_t>(w.matrix->rows()));
    put_u32(out, static_cast<uint32_t>(w.matrix->cols()));
  }
  for (const auto& w : ws)
    for (std::size_t i = 0; i < w.matrix->size(); ++i) put_f64(out, w.matrix->data()[i]);

  if (optimizer) {
    out.push_back(1);
    put_u64(out, static_cast<uint64_t>(optimizer->step_count));
    put_u32(out, static_cast<uint32_t>(optimizer->first_moments.size()));
    auto dump = [&out](const std::vector<Matrix>& ms) {
      for (const Matrix& m : ms) {
        put_u32(out, static_cast<uint32_t>(m.rows()));
        put_u32(out, static_cast<uint32_t>(m.cols()));
        for (std::size_t i = 0; i < m.size(); ++i) put_f64(out, m.data()[i]);
      }
    };
    dump(optimizer->first_moments);
    dump(optimizer->second_moments);
  } else {
    out.push_back(0);
  }
  atomic_write_binary(path, out);
}

LoadedCheckpoint load_checkpoint(const std::filesystem::path& path) {
  const std::string buf = read_text_file(path);
  Reader r{buf};
  const std::string magic = r.bytes(sizeof kMagic, "magic");
  if (std::memcmp(magic.data(), kMagic, sizeof kMagic) != 0)
    throw io_error("checkpoint '" + path.string() + "': bad magic bytes, not a checkpoint file");
  const uint32_t version = r.u32("format version");
  if (version != kFormatVersion)
    throw io_error("checkpoint: format version " + std::to_string(version) +
                   " unsupported (expected " + std::to_string(kFormatVersion) + ")");
  const uint32_t meta_len = r.u32("metadata length");
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(r.bytes(meta_len, "metadata"));
  } catch (const nlohmann::json::exception& e) {
    throw io_error(std::string("checkpoint: bad metadata block: ") + e.what());
  }

  ModelConfig cfg;
  try {
    const std::string emb = meta.at("embedding").get<std::string>();
    cfg.embedding = emb == "gcn"    ? EmbeddingKind::gcn
                    : emb == "sage" ? EmbeddingKind::sage
                                    : EmbeddingKind::none;
    cfg.embedding_trainable = meta.at("embedding_trainable").get<bool>();
    cfg.gcn_hidden = meta.at("gcn_hidden").get<int>();
    cfg.sage_layers = meta.at("sage_layers").get<int>();
    cfg.sage_units = meta.at("sage_units").get<int>();
    cfg.shared_pooling = meta.at("shared_pooling").get<bool>();
    cfg.projection_bias = meta.at("projection_bias").get<std::string>() == "proj"
                              ? SageParams::ProjectionBias::proj
                              : SageParams::ProjectionBias::agg;
    cfg.neighbor_sample_size = meta.at("neighbor_sample_size").get<int>();
    cfg.head_hidden = meta.at("head_hidden").get<std::vector<int>>();
    cfg.features = feature_spec_from_json(meta.at("features"));
    cfg.partitions = meta.at("partitions").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw io_error(std::string("checkpoint: metadata field missing or mistyped: ") + e.what());
  }

  LoadedCheckpoint out;
  out.model = GapModel::create(cfg, /*seed=*/0);
  out.config_fingerprint = meta.value("config_fingerprint", "");

  const uint32_t count = r.u32("tensor count");
  auto ws = out.model.weights();
  if (count != ws.size())
    throw io_error("checkpoint: shape table has " + std::to_string(count) + " tensors, model has " +
                   std::to_string(ws.size()));
  std::vector<std::pair<uint32_t, uint32_t>> shapes;
  for (uint32_t t = 0; t < count; ++t) {
    const uint32_t name_len = r.u32("tensor name length");
    const std::string name = r.bytes(name_len, "tensor name");
    const uint32_t rows = r.u32("tensor rows");
    const uint32_t cols = r.u32("tensor cols");
    if (name != ws[t].name)
      throw io_error("checkpoint: shape table entry '" + name + "' does not match model weight '" +
                     ws[t].name + "'");
    if (rows != static_cast<uint32_t>(ws[t].matrix->rows()) ||
        cols != static_cast<uint32_t>(ws[t].matrix->cols()))
      throw io_error("checkpoint: shape mismatch for '" + name + "'");
    shapes.emplace_back(rows, cols);
  }
  for (uint32_t t = 0; t < count; ++t) {
    Matrix& m = *ws[t].matrix;
    for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = r.f64("weight payload");
  }

  r.need(1, "optimizer flag");
  const bool has_opt = buf[r.pos++] != 0;
  if (has_opt) {
    OptimizerSnapshot snap;
    snap.step_count = static_cast<int64_t>(r.u64("optimizer step count"));
    const uint32_t n = r.u32("optimizer tensor count");
    auto read_moments = [&r](uint32_t cnt) {
      std::vector<Matrix> ms;
      for (uint32_t i = 0; i < cnt; ++i) {
        const uint32_t rows = r.u32("moment rows");
        const uint32_t cols = r.u32("moment cols");
        Matrix m(static_cast<int>(rows), static_cast<int>(cols));
        for (std::size_t k = 0; k < m.size(); ++k) m.data()[k] = r.f64("moment payload");
        ms.push_back(std::move(m));
      }
      return ms;
    };
    snap.first_moments = read_moments(n);
    snap.second_moments = read_moments(n);
    out.optimizer = std::move(snap);
  }
  if (r.pos != buf.size()) throw io_error("checkpoint: trailing bytes after payload");
  return out;
}

}  // namespace gap
