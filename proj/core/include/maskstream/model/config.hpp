#pragma once

#include <string>
#include <vector>

#include "maskstream/nn/layers.hpp"

namespace maskstream::model {

enum class ConvConfig { Small, Large, None };

std::string to_string(ConvConfig c);
ConvConfig conv_config_from_string(const std::string& s);

struct ModelConfig {
  ConvConfig conv_config = ConvConfig::Small;
  int blstm_depth = 2;
  int blstm_width = 512;
  int fc_depth = 1;
  int fc_width = 512;
  bool delta_phase = false;
  double lambda = 0.0;
  double learning_rate = 1e-4;
  int input_channels = 2;
  bool causal = false;
  int look_ahead_frames = 0;
  double compression_power = 0.3;

  int feature_channels() const { return input_channels * (delta_phase ? 2 : 1); }
};

// Flat "key = value" text, one pair per line; '#' starts a comment. Unknown
// keys are rejected, missing keys keep their defaults.
ModelConfig parse_model_config(const std::string& text);
ModelConfig load_model_config(const std::string& path);
std::string serialize_model_config(const ModelConfig& cfg);
void save_model_config(const std::string& path, const ModelConfig& cfg);

// Throws std::invalid_argument listing every violation.
void validate_model_config(const ModelConfig& cfg);

// Fixed conv stacks selectable from the config; empty for None.
std::vector<nn::ConvLayerSpec> conv_stack(ConvConfig which, bool causal);

}  // namespace maskstream::model
