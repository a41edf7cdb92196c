#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "gap/model.hpp"
#include "gap/optim.hpp"

namespace gap {

// Optimizer state captured alongside the weights so training can resume.
struct OptimizerSnapshot {
  std::vector<Matrix> first_moments;
  std::vector<Matrix> second_moments;
  int64_t step_count = 0;
};

struct LoadedCheckpoint {
  GapModel model;
  std::string config_fingerprint;
  std::optional<OptimizerSnapshot> optimizer;
};

// Binary layout: magic, u32 format version, length-prefixed JSON metadata
// (embedding kind, g, feature spec + vocabulary digest, config fingerprint),
// shape table, then the raw little-endian f64 weight payload and an optional
// optimizer section. Writes are atomic (temp file + rename).
void save_checkpoint(GapModel& model, const std::filesystem::path& path,
                     const std::string& config_fingerprint = "",
                     const OptimizerSnapshot* optimizer = nullptr);

LoadedCheckpoint load_checkpoint(const std::filesystem::path& path);

// FNV-1a over the vocabulary entries; stored in checkpoint metadata so
// feature-space mismatches are detectable without shipping the vocabulary.
std::string vocabulary_digest(const std::vector<std::string>& vocab);

}  // namespace gap
