#pragma once

#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "maskstream/data/manifest.hpp"
#include "maskstream/model/config.hpp"
#include "maskstream/model/network.hpp"

namespace maskstream::harness {

struct TrainOptions {
  model::ModelConfig config;
  uint64_t seed = 0;
  int max_steps = 2000;
  int batch_size = 4;
  int checkpoint_every = 200;  // dev-SDR cadence; the final step always scores
  double chunk_seconds = 3.0;
  double clip_norm = 5.0;  // global gradient norm
  int filter_len = 512;
  std::string data_dir;  // optional materialized corpus
  std::string out_dir;   // best.ckpt / final.ckpt / metrics.csv; empty: memory only
  int eval_threads = 0;
};

struct StepMetric {
  int step = 0;
  double loss = 0.0;              // batch-mean clip loss
  double dev_sdr = std::nan("");  // only on checkpoint steps
  bool evaluated = false;
};

struct TrainRun {
  model::ModelConfig config;
  uint64_t seed = 0;
  int max_steps = 0;
  int batch_size = 0;

  bool failed = false;  // non-finite loss or gradient; record is partial
  int steps_completed = 0;
  double baseline_dev_sdr = std::nan("");  // channel-sum bypass, scored pre-training
  double best_dev_sdr = std::nan("");
  int best_step = -1;
  std::vector<StepMetric> metrics;
  std::string best_checkpoint;  // path, when out_dir was set
  std::shared_ptr<model::Network<float>> best_net;
};

// Adam (beta1 0.9, beta2 0.999, eps 1e-8) over shuffled fixed-length chunks of
// the training split; every checkpoint scores mean dev SDR and the strictly
// best one is kept. Fully deterministic in (config, manifests, seed).
TrainRun train(const TrainOptions& opts, const data::DatasetManifest& train_manifest,
               const data::DatasetManifest& dev_manifest);

// step,loss,dev_sdr rows; dev_sdr is empty on steps without a dev evaluation.
void write_metrics_csv(const std::string& path, const TrainRun& run);

}  // namespace maskstream::harness
