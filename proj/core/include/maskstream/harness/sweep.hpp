#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "maskstream/data/manifest.hpp"
#include "maskstream/model/config.hpp"

namespace maskstream::harness {

struct SweepOptions {
  std::vector<int> look_ahead_ms;  // multiples of the 10 ms hop, within -100..200
  int trials_per_point = 2;
  // true: each trial gets its own seed (shared across points, so points are
  // compared on paired runs); false: every trial repeats the same seed and the
  // per-point std collapses to zero.
  bool distinct_trial_seeds = true;
  uint64_t seed = 0;
  int steps = 300;
  int batch_size = 2;
  int checkpoint_every = 100;
  double chunk_seconds = 3.0;
  std::string data_dir;
  int eval_threads = 0;
  int filter_len = 512;
};

struct SweepPoint {
  int look_ahead_ms = 0;
  std::vector<double> dev_sdr;   // best dev SDR per trial
  std::vector<double> eval_sdr;  // eval-split SDR of each trial's best model
  double dev_mean = 0.0, dev_std = 0.0;
  double eval_mean = 0.0, eval_std = 0.0;
};

// Trains trials_per_point causal models per look-ahead value (base config
// forced causal, look_ahead_frames set from the ms value) and scores each
// trial's best checkpoint on the dev and eval splits.
std::vector<SweepPoint> lookahead_sweep(const model::ModelConfig& base,
                                        const SweepOptions& opts,
                                        const data::DatasetManifest& train_manifest,
                                        const data::DatasetManifest& dev_manifest,
                                        const data::DatasetManifest& eval_manifest);

// look_ahead_ms,trial,sdr_dev,sdr_eval — one row per trained trial.
void write_sweep_csv(const std::string& path, const std::vector<SweepPoint>& points);

}  // namespace maskstream::harness
