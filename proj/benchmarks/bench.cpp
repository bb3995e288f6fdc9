// Microbenchmarks for the hot paths: framing, feature extraction, the conv
// and recurrent stacks, the streaming engine, and SDR scoring.

#include <benchmark/benchmark.h>

#include <vector>

#include "maskstream/audio.hpp"
#include "maskstream/dsp/features.hpp"
#include "maskstream/dsp/stft.hpp"
#include "maskstream/eval/sdr.hpp"
#include "maskstream/model/config.hpp"
#include "maskstream/model/enhance.hpp"
#include "maskstream/model/network.hpp"
#include "maskstream/rng.hpp"
#include "maskstream/stream/engine.hpp"

namespace {

using namespace maskstream;

AudioBuffer noise_clip(uint64_t seed, double seconds, int channels) {
  AudioBuffer a;
  a.sample_rate = 16000;
  a.samples.resize(static_cast<size_t>(channels));
  Rng rng(seed);
  size_t n = static_cast<size_t>(seconds * 16000.0);
  for (auto& ch : a.samples) {
    ch.resize(n);
    for (auto& v : ch) v = 0.1 * rng.normal();
  }
  return a;
}

nn::TensorF random_feats(int frames, int bins, int channels, uint64_t seed) {
  nn::TensorF t({frames, bins, channels});
  Rng rng(seed);
  for (auto& v : t.v) v = static_cast<float>(0.2 * rng.normal());
  return t;
}

void BM_Stft(benchmark::State& state) {
  AudioBuffer clip = noise_clip(1, 1.0, 2);
  for (auto _ : state) {
    auto spec = dsp::stft(clip);
    benchmark::DoNotOptimize(spec.values.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(clip.length()));
}
BENCHMARK(BM_Stft);

void BM_Istft(benchmark::State& state) {
  auto spec = dsp::channel_sum(dsp::stft(noise_clip(2, 1.0, 2)));
  for (auto _ : state) {
    AudioBuffer out = dsp::istft(spec);
    benchmark::DoNotOptimize(out.samples[0].data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(spec.original_length));
}
BENCHMARK(BM_Istft);

void BM_Features(benchmark::State& state) {
  auto spec = dsp::stft(noise_clip(3, 1.0, 2));
  for (auto _ : state) {
    auto feats = dsp::model_features<float>(spec, 0.3, true);
    benchmark::DoNotOptimize(feats.v.data());
  }
  state.SetItemsProcessed(state.iterations() * spec.frames);
}
BENCHMARK(BM_Features);

void BM_ConvStackForward(benchmark::State& state) {
  model::ModelConfig cfg;
  cfg.conv_config = model::ConvConfig::Small;
  cfg.blstm_depth = 0;
  cfg.fc_depth = 0;
  cfg.delta_phase = true;
  cfg.input_channels = 2;
  cfg.causal = true;
  auto net = model::NetworkF::build(cfg, 10);
  auto feats = random_feats(50, 257, 4, 11);
  for (auto _ : state) {
    auto mask = net.forward(feats, nullptr);
    benchmark::DoNotOptimize(mask.v.data());
  }
  state.SetItemsProcessed(state.iterations() * 50);
}
BENCHMARK(BM_ConvStackForward);

void BM_LstmForward(benchmark::State& state) {
  model::ModelConfig cfg;
  cfg.conv_config = model::ConvConfig::None;
  cfg.blstm_depth = 1;
  cfg.blstm_width = static_cast<int>(state.range(0));
  cfg.fc_depth = 0;
  cfg.delta_phase = false;
  cfg.input_channels = 2;
  cfg.causal = true;
  auto net = model::NetworkF::build(cfg, 12);
  auto feats = random_feats(50, 257, 2, 13);
  for (auto _ : state) {
    auto mask = net.forward(feats, nullptr);
    benchmark::DoNotOptimize(mask.v.data());
  }
  state.SetItemsProcessed(state.iterations() * 50);
}
BENCHMARK(BM_LstmForward)->Arg(64)->Arg(256);

void BM_StreamPush(benchmark::State& state) {
  model::ModelConfig cfg;
  cfg.conv_config = model::ConvConfig::Small;
  cfg.blstm_depth = 1;
  cfg.blstm_width = 64;
  cfg.fc_depth = 1;
  cfg.fc_width = 64;
  cfg.delta_phase = true;
  cfg.input_channels = 2;
  cfg.causal = true;
  auto net = model::NetworkF::build(cfg, 14);
  AudioBuffer clip = noise_clip(15, 2.0, 2);
  const size_t hop = 160;

  for (auto _ : state) {
    stream::StreamEngine eng(net);
    size_t emitted = 0;
    for (size_t pos = 0; pos + hop <= clip.length(); pos += hop) {
      std::vector<std::vector<double>> chunk(2);
      for (int c = 0; c < 2; ++c)
        chunk[static_cast<size_t>(c)].assign(clip.samples[static_cast<size_t>(c)].begin() + static_cast<long>(pos),
                        clip.samples[static_cast<size_t>(c)].begin() + static_cast<long>(pos + hop));
      emitted += eng.push(chunk).size();
    }
    benchmark::DoNotOptimize(emitted);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(clip.length()));
}
BENCHMARK(BM_StreamPush);

void BM_SdrValue(benchmark::State& state) {
  AudioBuffer ref = noise_clip(16, 1.0, 1);
  AudioBuffer noise = noise_clip(17, 1.0, 1);
  std::vector<double> est(ref.samples[0]);
  for (size_t i = 0; i < est.size(); ++i) est[i] += 0.3 * noise.samples[0][i];
  const int taps = static_cast<int>(state.range(0));
  for (auto _ : state) {
    double sdr = eval::sdr_value(est, ref.samples[0], taps);
    benchmark::DoNotOptimize(sdr);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(ref.length()));
}
BENCHMARK(BM_SdrValue)->Arg(128)->Arg(512);

void BM_EnhanceOffline(benchmark::State& state) {
  model::ModelConfig cfg;
  cfg.conv_config = model::ConvConfig::None;
  cfg.blstm_depth = 1;
  cfg.blstm_width = 128;
  cfg.fc_depth = 1;
  cfg.fc_width = 128;
  cfg.delta_phase = true;
  cfg.input_channels = 2;
  auto net = model::NetworkF::build(cfg, 18);
  AudioBuffer clip = noise_clip(19, 1.0, 2);
  dsp::StftParams params;
  for (auto _ : state) {
    AudioBuffer out = model::enhance_offline(&net, clip, params);
    benchmark::DoNotOptimize(out.samples[0].data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(clip.length()));
}
BENCHMARK(BM_EnhanceOffline);

}  // namespace

BENCHMARK_MAIN();
