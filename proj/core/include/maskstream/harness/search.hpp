#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "maskstream/data/manifest.hpp"
#include "maskstream/model/config.hpp"
#include "maskstream/rng.hpp"

namespace maskstream::harness {

// Hyperparameter ranges for random search. Defaults cover the full space the
// production models were tuned over; tests and desk runs narrow them through
// the same flat key=value file format the model config uses.
struct SearchSpace {
  std::vector<model::ConvConfig> conv_choices{model::ConvConfig::Small,
                                              model::ConvConfig::Large};
  int blstm_depth_min = 0, blstm_depth_max = 5;
  int blstm_width_min = 8, blstm_width_max = 1024;
  int fc_depth_min = 0, fc_depth_max = 5;
  int fc_width_min = 8, fc_width_max = 1024;
  int delta_phase = 2;  // 0: off, 1: on, 2: sample either
  double lambda_min = 0.0, lambda_max = 1.0;
  double learning_rate_min = 3e-6, learning_rate_max = 1e-3;  // log-uniform
  int input_channels_min = 1, input_channels_max = 2;
};

void validate_search_space(const SearchSpace& s);
SearchSpace parse_search_space(const std::string& text);
SearchSpace load_search_space(const std::string& path);
std::string serialize_search_space(const SearchSpace& s);

// One config, drawn with a fixed field order so a given rng state always
// yields the same config. Always validates.
model::ModelConfig sample_config(const SearchSpace& s, Rng& rng);

struct SearchOptions {
  int budget = 1;            // number of trials
  int per_trial_steps = 200; // fixed step budget per trial
  int batch_size = 4;
  int checkpoint_every = 100;
  double chunk_seconds = 3.0;
  uint64_t seed = 0;
  std::string data_dir;
  int eval_threads = 0;
  int filter_len = 512;
};

struct SearchTrial {
  int index = 0;  // sampling order
  model::ModelConfig config;
  long long param_count = 0;
  double ops_per_audio_second = 0.0;
  bool failed = false;
  double best_dev_sdr = 0.0;  // NaN when no checkpoint scored
  int best_step = -1;
};

// Samples `budget` configs up front (so the draw sequence is independent of
// training), trains each with the fixed step budget, and returns trials
// ranked by best dev SDR, failed trials last.
std::vector<SearchTrial> random_search(const SearchSpace& space,
                                       const SearchOptions& opts,
                                       const data::DatasetManifest& train_manifest,
                                       const data::DatasetManifest& dev_manifest);

// One row per trial (= budget rows), ranked order, with the size/cost/score
// triple used for accuracy-vs-cost scatter plots.
void write_search_csv(const std::string& path, const std::vector<SearchTrial>& trials);

}  // namespace maskstream::harness
