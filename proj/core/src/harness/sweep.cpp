#include "maskstream/harness/sweep.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "maskstream/harness/evaluate.hpp"
#include "maskstream/harness/train.hpp"
#include "maskstream/rng.hpp"

namespace maskstream::harness {

namespace {

constexpr uint64_t kTrialTag = 0x7377'6565ULL;

void mean_std(const std::vector<double>& xs, double* mean, double* std_out) {
  double s = 0.0;
  int n = 0;
  for (double x : xs) {
    if (std::isfinite(x)) {
      s += x;
      ++n;
    }
  }
  if (n == 0) {
    *mean = std::nan("");
    *std_out = std::nan("");
    return;
  }
  *mean = s / n;
  if (n == 1) {
    *std_out = 0.0;
    return;
  }
  double ss = 0.0;
  for (double x : xs) {
    if (std::isfinite(x)) {
      const double d = x - *mean;
      ss += d * d;
    }
  }
  *std_out = std::sqrt(ss / (n - 1));
}

}  // namespace

std::vector<SweepPoint> lookahead_sweep(const model::ModelConfig& base,
                                        const SweepOptions& opts,
                                        const data::DatasetManifest& train_manifest,
                                        const data::DatasetManifest& dev_manifest,
                                        const data::DatasetManifest& eval_manifest) {
  if (opts.look_ahead_ms.empty()) {
    throw std::invalid_argument("sweep: no look-ahead values");
  }
  for (int ms : opts.look_ahead_ms) {
    if (ms % 10 != 0) {
      throw std::invalid_argument("sweep: look-ahead " + std::to_string(ms) +
                                  " ms is not a multiple of the 10 ms hop");
    }
    if (ms < -100 || ms > 200) {
      throw std::invalid_argument("sweep: look-ahead " + std::to_string(ms) +
                                  " ms is outside -100..200");
    }
  }
  if (opts.trials_per_point < 1) {
    throw std::invalid_argument("sweep: trials_per_point must be >= 1");
  }

  const std::vector<data::UtterancePair> eval_pairs =
      load_manifest_pairs(eval_manifest, opts.data_dir);
  EvalOptions eopts;
  eopts.filter_len = opts.filter_len;
  eopts.threads = opts.eval_threads;

  std::vector<SweepPoint> points;
  points.reserve(opts.look_ahead_ms.size());
  for (int ms : opts.look_ahead_ms) {
    SweepPoint point;
    point.look_ahead_ms = ms;
    model::ModelConfig cfg = base;
    cfg.causal = true;
    cfg.look_ahead_frames = ms / 10;
    for (int trial = 0; trial < opts.trials_per_point; ++trial) {
      TrainOptions topt;
      topt.config = cfg;
      topt.seed = opts.distinct_trial_seeds
                      ? Rng::mix(Rng::mix(opts.seed, kTrialTag), static_cast<uint64_t>(trial))
                      : Rng::mix(opts.seed, kTrialTag);
      topt.max_steps = opts.steps;
      topt.batch_size = opts.batch_size;
      topt.checkpoint_every = opts.checkpoint_every;
      topt.chunk_seconds = opts.chunk_seconds;
      topt.data_dir = opts.data_dir;
      topt.eval_threads = opts.eval_threads;
      topt.filter_len = opts.filter_len;
      const TrainRun run = train(topt, train_manifest, dev_manifest);
      point.dev_sdr.push_back(run.best_dev_sdr);
      point.eval_sdr.push_back(
          run.best_net ? mean_sdr(evaluate_pairs(run.best_net.get(), eval_pairs, eopts))
                       : std::nan(""));
    }
    mean_std(point.dev_sdr, &point.dev_mean, &point.dev_std);
    mean_std(point.eval_sdr, &point.eval_mean, &point.eval_std);
    points.push_back(std::move(point));
  }
  return points;
}

void write_sweep_csv(const std::string& path, const std::vector<SweepPoint>& points) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write csv: " + path);
  out << "look_ahead_ms,trial,sdr_dev,sdr_eval\n";
  char buf[64];
  for (const SweepPoint& p : points) {
    for (size_t t = 0; t < p.dev_sdr.size(); ++t) {
      std::snprintf(buf, sizeof(buf), "%d,%zu,%.4f,%.4f", p.look_ahead_ms, t,
                    p.dev_sdr[t], p.eval_sdr[t]);
      out << buf << "\n";
    }
  }
  if (!out) throw std::runtime_error("failed writing csv: " + path);
}

}  // namespace maskstream::harness
