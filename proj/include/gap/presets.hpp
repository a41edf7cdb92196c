#pragma once

#include <string>
#include <vector>

#include "gap/model.hpp"

namespace gap {

// Named hyperparameter bundles for the reported experiment setups. Epoch
// budgets and patience are this toolkit's choices; the sources report none.
struct Preset {
  std::string name;
  ModelConfig model;
  TrainConfig train;
};

Preset get_preset(const std::string& name);
std::vector<std::string> preset_names();

}  // namespace gap
