#include "maskstream/harness/train.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "maskstream/data/corpus.hpp"
#include "maskstream/dsp/features.hpp"
#include "maskstream/dsp/stft.hpp"
#include "maskstream/harness/evaluate.hpp"
#include "maskstream/model/enhance.hpp"
#include "maskstream/model/loss.hpp"
#include "maskstream/rng.hpp"

namespace maskstream::harness {

namespace {

constexpr uint64_t kInitTag = 0x696e'6974ULL;
constexpr uint64_t kShuffleTag = 0x7368'7566ULL;

// One training chunk with everything the step loop needs precomputed: padded
// input features, the channel-sum spectrogram the mask multiplies, and the
// clean reference spectrogram.
struct TrainClip {
  nn::TensorF features;  // [frames + pad][bins][feat channels]
  dsp::ComplexSpectrogram z;
  dsp::ComplexSpectrogram clean;
  int frames = 0;
};

TrainClip prepare_clip(const data::UtterancePair& pair, const model::ModelConfig& cfg,
                       const dsp::StftParams& params) {
  TrainClip clip;
  dsp::ComplexSpectrogram spec = dsp::stft(pair.noisy, params);
  clip.z = dsp::channel_sum(spec);
  clip.frames = spec.frames;
  nn::TensorF feats =
      dsp::model_features<float>(spec, cfg.compression_power, cfg.delta_phase);
  clip.features = model::pad_feature_rows(feats, model::pad_rows_before(cfg),
                                          model::pad_rows_after(cfg));
  clip.clean = dsp::stft(pair.clean, params);
  return clip;
}

void fisher_yates(std::vector<size_t>& order, Rng& rng) {
  for (size_t i = order.size(); i > 1; --i) {
    const auto j = static_cast<size_t>(
        rng.uniform_int(0, static_cast<int64_t>(i) - 1));
    std::swap(order[i - 1], order[j]);
  }
}

struct AdamState {
  std::vector<std::vector<double>> m, v;
};

}  // namespace

TrainRun train(const TrainOptions& opts, const data::DatasetManifest& train_manifest,
               const data::DatasetManifest& dev_manifest) {
  if (opts.batch_size < 1) throw std::invalid_argument("train: batch_size must be >= 1");
  if (opts.max_steps < 0) throw std::invalid_argument("train: negative step count");
  model::validate_model_config(opts.config);
  const dsp::StftParams params;
  const model::ModelConfig& cfg = opts.config;

  TrainRun run;
  run.config = cfg;
  run.seed = opts.seed;
  run.max_steps = opts.max_steps;
  run.batch_size = opts.batch_size;

  // Fixed-length training chunks, remainders dropped.
  std::vector<TrainClip> clips;
  for (const data::UtterancePair& pair :
       load_manifest_pairs(train_manifest, opts.data_dir)) {
    for (const data::UtterancePair& chunk : data::chunk_fixed(pair, opts.chunk_seconds)) {
      clips.push_back(prepare_clip(chunk, cfg, params));
    }
  }
  if (clips.empty()) {
    throw std::runtime_error("train: no training chunks (utterances shorter than chunk length?)");
  }

  const std::vector<data::UtterancePair> dev_pairs =
      load_manifest_pairs(dev_manifest, opts.data_dir);
  EvalOptions eopts;
  eopts.filter_len = opts.filter_len;
  eopts.threads = opts.eval_threads;
  {
    EvalOptions bypass = eopts;
    bypass.bypass_mask = true;
    run.baseline_dev_sdr = mean_sdr(evaluate_pairs(nullptr, dev_pairs, bypass));
  }

  model::NetworkF net =
      model::NetworkF::build(cfg, Rng::mix(opts.seed, kInitTag), params.bins());
  auto refs = net.param_refs();
  AdamState adam;
  adam.m.resize(refs.size());
  adam.v.resize(refs.size());
  for (size_t i = 0; i < refs.size(); ++i) {
    adam.m[i].assign(refs[i].value->numel(), 0.0);
    adam.v[i].assign(refs[i].value->numel(), 0.0);
  }
  constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kEps = 1e-8;

  Rng shuffle_rng(Rng::mix(opts.seed, kShuffleTag));
  std::vector<size_t> order(clips.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  size_t cursor = order.size();  // forces a shuffle before the first batch
  auto next_clip = [&]() -> size_t {
    if (cursor >= order.size()) {
      fisher_yates(order, shuffle_rng);
      cursor = 0;
    }
    return order[cursor++];
  };

  const int off = model::mask_row_offset(cfg);
  const double inv_batch = 1.0 / static_cast<double>(opts.batch_size);
  double best = -std::numeric_limits<double>::infinity();
  const bool to_disk = !opts.out_dir.empty();
  if (to_disk) std::filesystem::create_directories(opts.out_dir);

  for (int step = 1; step <= opts.max_steps; ++step) {
    net.zero_grads();
    double loss_sum = 0.0;
    for (int b = 0; b < opts.batch_size; ++b) {
      const TrainClip& clip = clips[next_clip()];
      model::NetworkF::Trace tr;
      nn::TensorF mask_pad = net.forward(clip.features, &tr);
      nn::TensorF mask({clip.frames, net.bins});
      for (int t = 0; t < clip.frames; ++t) {
        std::copy(mask_pad.row(t + off), mask_pad.row(t + off) + net.bins, mask.row(t));
      }
      dsp::ComplexSpectrogram enhanced = model::apply_mask(mask, clip.z);
      std::vector<std::complex<double>> grad_e;
      loss_sum += model::mask_loss_grad(enhanced, clip.clean, cfg.lambda,
                                        cfg.compression_power, &grad_e);
      nn::TensorF gmask = model::mask_grad<float>(grad_e, clip.z);
      nn::TensorF gpad({clip.features.dim(0), net.bins});
      for (int t = 0; t < clip.frames; ++t) {
        const float* src = gmask.row(t);
        float* dst = gpad.row(t + off);
        for (int f = 0; f < net.bins; ++f) {
          dst[f] = static_cast<float>(src[f] * inv_batch);
        }
      }
      net.backward(tr, gpad);
    }
    const double loss = loss_sum * inv_batch;

    // Global gradient norm; a non-finite value means the step diverged.
    double norm_sq = 0.0;
    for (const auto& r : refs) {
      for (float g : r.grad->v) norm_sq += static_cast<double>(g) * g;
    }
    const double norm = std::sqrt(norm_sq);
    StepMetric metric;
    metric.step = step;
    metric.loss = loss;
    if (!std::isfinite(loss) || !std::isfinite(norm)) {
      run.metrics.push_back(metric);
      run.failed = true;
      run.steps_completed = step - 1;
      break;
    }
    const double scale =
        (opts.clip_norm > 0.0 && norm > opts.clip_norm) ? opts.clip_norm / norm : 1.0;

    const double bc1 = 1.0 - std::pow(kBeta1, step);
    const double bc2 = 1.0 - std::pow(kBeta2, step);
    for (size_t i = 0; i < refs.size(); ++i) {
      auto& value = refs[i].value->v;
      auto& grad = refs[i].grad->v;
      auto& m = adam.m[i];
      auto& v = adam.v[i];
      for (size_t j = 0; j < value.size(); ++j) {
        const double g = static_cast<double>(grad[j]) * scale;
        m[j] = kBeta1 * m[j] + (1.0 - kBeta1) * g;
        v[j] = kBeta2 * v[j] + (1.0 - kBeta2) * g * g;
        const double update =
            cfg.learning_rate * (m[j] / bc1) / (std::sqrt(v[j] / bc2) + kEps);
        value[j] = static_cast<float>(static_cast<double>(value[j]) - update);
      }
    }
    run.steps_completed = step;

    const bool checkpoint =
        (opts.checkpoint_every > 0 && step % opts.checkpoint_every == 0) ||
        step == opts.max_steps;
    if (checkpoint) {
      const double dev = mean_sdr(evaluate_pairs(&net, dev_pairs, eopts));
      metric.dev_sdr = dev;
      metric.evaluated = true;
      if (std::isfinite(dev) && dev > best) {
        best = dev;
        run.best_step = step;
        run.best_net = std::make_shared<model::NetworkF>(net);
        if (to_disk) {
          run.best_checkpoint = opts.out_dir + "/best.ckpt";
          model::save_network(run.best_checkpoint, net);
        }
      }
    }
    run.metrics.push_back(metric);
  }
  if (run.best_step >= 0) run.best_dev_sdr = best;

  if (to_disk) {
    if (!run.failed) model::save_network(opts.out_dir + "/final.ckpt", net);
    write_metrics_csv(opts.out_dir + "/metrics.csv", run);
  }
  return run;
}

void write_metrics_csv(const std::string& path, const TrainRun& run) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write csv: " + path);
  out << "step,loss,dev_sdr\n";
  char buf[64];
  for (const StepMetric& m : run.metrics) {
    std::snprintf(buf, sizeof(buf), "%d,%.9g,", m.step, m.loss);
    out << buf;
    if (m.evaluated) {
      std::snprintf(buf, sizeof(buf), "%.9g", m.dev_sdr);
      out << buf;
    }
    out << "\n";
  }
  if (!out) throw std::runtime_error("failed writing csv: " + path);
}

}  // namespace maskstream::harness
