// Acceptance gate. Each test case checks one release criterion end to end and
// prints a single PASS/FAIL summary line; the thresholds are pinned here as
// constants and must not be loosened to make a run green.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "doctest.h"
#include "helpers.hpp"
#include "maskstream/data/manifest.hpp"
#include "maskstream/dsp/stft.hpp"
#include "maskstream/eval/report.hpp"
#include "maskstream/eval/sdr.hpp"
#include "maskstream/harness/evaluate.hpp"
#include "maskstream/harness/sweep.hpp"
#include "maskstream/harness/train.hpp"
#include "maskstream/model/config.hpp"
#include "maskstream/model/enhance.hpp"
#include "maskstream/model/loss.hpp"
#include "maskstream/model/network.hpp"
#include "maskstream/model/stats.hpp"
#include "maskstream/nn/accounting.hpp"
#include "maskstream/stream/engine.hpp"
#include "oracles.hpp"

using namespace maskstream;
using Clock = std::chrono::steady_clock;

namespace {

constexpr double kStftTol = 1e-6;         // interior round-trip error / peak
constexpr double kStftBudgetS = 1.0;
constexpr double kGradTol = 1e-4;         // finite-difference relative error
constexpr double kGradBudgetS = 120.0;
constexpr double kStreamTol = 1e-5;       // streaming vs offline, waveform
constexpr double kSdrOracleTolDb = 1e-6;  // Toeplitz vs dense solve
constexpr double kOrthoTolDb = 0.01;      // constructed 10 dB case
constexpr double kRowMeanTolDb = 0.005;   // published-row arithmetic
constexpr double kOpsRatioLo = 1.5, kOpsRatioHi = 2.5;
constexpr double kParamTarget = 65e6;     // within a factor of 2
constexpr double kTrainGainDb = 3.0;      // dev SDR over the noisy baseline
constexpr double kTrainBudgetS = 1200.0;
constexpr int kTrainSteps = 2000;
constexpr double kLagDropDb = 1.0;        // -100 ms must lose at least this
constexpr double kLagFlatDb = 1.0;        // 0..200 ms must agree within this

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void report(int criterion, bool pass, const std::string& detail) {
  std::printf("criterion %d [%s] %s\n", criterion, pass ? "PASS" : "FAIL",
              detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* spec, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), spec, a, b, c);
  return buf;
}

double rel_against(double got, double want, double floor_v) {
  double d = std::abs(got - want);
  return d / std::max({std::abs(got), std::abs(want), floor_v});
}

dsp::ComplexSpectrogram random_spec(int frames, int bins, int channels, uint64_t seed) {
  dsp::ComplexSpectrogram s;
  s.params = dsp::StftParams();
  s.frames = frames;
  s.bins = bins;
  s.channels = channels;
  s.original_length = static_cast<size_t>(frames) * 160;
  s.values.resize(static_cast<size_t>(frames) * bins * channels);
  Rng rng(seed);
  for (auto& v : s.values) v = {rng.normal(), rng.normal()};
  return s;
}

nn::Tensor<double> random_features(int frames, int bins, int channels, uint64_t seed) {
  nn::Tensor<double> t({frames, bins, channels});
  Rng rng(seed);
  for (auto& v : t.v) v = 0.2 * rng.normal();
  return t;
}

struct CliCapture {
  int code = 0;
  std::string out;
};

CliCapture run_cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv{"maskstream"};
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::streambuf* old = std::cout.rdbuf(out.rdbuf());
  CliCapture r;
  r.code = cli_main(static_cast<int>(argv.size()), argv.data());
  std::cout.rdbuf(old);
  r.out = out.str();
  return r;
}

harness::TrainOptions smoke_train_options(uint64_t seed) {
  harness::TrainOptions opts;
  opts.config = model::load_model_config(testutil::data_path("tiny.cfg"));
  opts.seed = seed;
  opts.max_steps = kTrainSteps;
  opts.batch_size = 2;
  opts.checkpoint_every = 200;
  opts.chunk_seconds = 1.5;
  opts.filter_len = 512;
  opts.eval_threads = 1;
  return opts;
}

}  // namespace

TEST_CASE("criterion 1: analysis-synthesis round trip on random signals") {
  std::vector<AudioBuffer> clips;
  for (int i = 0; i < 5; ++i) clips.push_back(testutil::noise_audio(400 + i, 1.0, 1 + i % 2));

  auto t0 = Clock::now();
  double worst = 0.0;
  for (const auto& clip : clips) {
    auto spec = dsp::stft(clip);
    AudioBuffer back = dsp::istft(spec);
    REQUIRE(back.length() == clip.length());
    double peak = 0.0;
    for (const auto& ch : clip.samples)
      for (double v : ch) peak = std::max(peak, std::abs(v));
    const size_t lo = 400, hi = clip.length() - 400;
    for (int c = 0; c < clip.channels(); ++c) {
      for (size_t n = lo; n < hi; ++n) {
        worst = std::max(worst, std::abs(back.samples[c][n] - clip.samples[c][n]) / peak);
      }
    }
  }
  double secs = seconds_since(t0);

  bool pass = worst < kStftTol && secs < kStftBudgetS;
  report(1, pass, fmt("stft round trip: max interior error %.3g (limit 1e-6), %.2f s", worst, secs));
  CHECK(worst < kStftTol);
  CHECK(secs < kStftBudgetS);
}

TEST_CASE("criterion 2: finite-difference gradients across every layer type") {
  const double lambdas[3] = {0.0, 0.113, 1.0};
  const double powers[2] = {0.3, 1.0};
  const int bins = 9, frames = 5;

  auto t0 = Clock::now();
  double worst = 0.0;
  int probes = 0;
  for (int s = 0; s < 20; ++s) {
    model::ModelConfig cfg;
    cfg.conv_config = model::ConvConfig::Small;  // all conv shapes and dilations
    cfg.blstm_depth = 1;
    cfg.blstm_width = 8;
    cfg.fc_depth = 1;
    cfg.fc_width = 9;
    cfg.delta_phase = true;
    cfg.input_channels = 2;
    cfg.causal = s % 2 == 1;  // both conv paddings, both recurrence modes
    cfg.lambda = lambdas[s % 3];
    cfg.compression_power = powers[s % 2];

    auto net = model::NetworkD::build(cfg, 1000 + static_cast<uint64_t>(s), bins);
    auto feats = random_features(frames, bins, cfg.feature_channels(), 2000 + s);
    auto noisy = random_spec(frames, bins, 2, 3000 + s);
    auto zsum = dsp::channel_sum(noisy);
    auto clean = random_spec(frames, bins, 1, 4000 + s);

    auto objective = [&]() {
      auto mask = net.forward(feats, nullptr);
      auto enhanced = model::apply_mask(mask, noisy);
      return model::mask_loss(enhanced, clean, cfg.lambda, cfg.compression_power);
    };

    model::NetworkD::Trace tr;
    auto mask = net.forward(feats, &tr);
    auto enhanced = model::apply_mask(mask, noisy);
    std::vector<std::complex<double>> ge;
    model::mask_loss_grad(enhanced, clean, cfg.lambda, cfg.compression_power, &ge);
    auto gmask = model::mask_grad<double>(ge, zsum);
    net.zero_grads();
    auto gfeat = net.backward(tr, gmask);

    // A secant is only a derivative estimate between ReLU kinks, and at init
    // the deep conv activations sit within ~1e-5 of the kink, so single-step
    // differences routinely straddle one. Take secants at two step sizes:
    // when they disagree the step crossed a kink and the probe moves to
    // another coordinate; if no coordinate settles, fail loudly. |grad| below
    // kGradFloor is below what the secant can resolve in double precision, so
    // those coordinates are held to an absolute budget instead of digits.
    // Secant roundoff here is ~1e-6 absolute (objective ~45, h = 5e-8), while
    // a crossed kink shifts the two secants apart by >=3e-4 relative, so the
    // gate separates the two cleanly and the floor keeps the digit comparison
    // above the noise.
    constexpr double kH1 = 1e-7, kH2 = 5e-8;
    constexpr double kAgreeRel = 5e-5, kAgreeAbs = 5e-6;
    constexpr double kGradFloor = 1e-1;
    auto secant = [&](double& slot, double save, double h) {
      slot = save + h;
      double fp = objective();
      slot = save - h;
      double fm = objective();
      slot = save;
      return (fp - fm) / (2 * h);
    };
    auto try_probe = [&](double& slot, double analytic) {
      double save = slot;
      double fd1 = secant(slot, save, kH1);
      double fd2 = secant(slot, save, kH2);
      double gap = std::abs(fd1 - fd2);
      if (gap > std::max(kAgreeRel * std::max(std::abs(fd1), std::abs(fd2)), kAgreeAbs))
        return false;
      worst = std::max(worst, rel_against(analytic, fd2, kGradFloor));
      probes++;
      return true;
    };
    auto probe_tensor = [&](nn::Tensor<double>& value, const nn::Tensor<double>& grad,
                            size_t start, const std::string& what) {
      size_t n = value.numel();
      size_t stride = std::max<size_t>(1, n / 7);
      size_t i = start % n;
      bool ok = false;
      for (int attempt = 0; attempt < 16 && !ok; ++attempt, i = (i + stride) % n)
        ok = try_probe(value.v[i], grad.v[i]);
      REQUIRE_MESSAGE(ok, what, ": finite differences would not settle at any probed coordinate");
    };
    for (auto& ref : net.param_refs()) {
      probe_tensor(*ref.value, *ref.grad, static_cast<size_t>(s) * 7 + 3, ref.name);
      size_t im = 0;  // largest-|grad| coordinate gives the strongest digit check
      for (size_t k = 1; k < ref.grad->numel(); ++k)
        if (std::abs(ref.grad->v[k]) > std::abs(ref.grad->v[im])) im = k;
      probe_tensor(*ref.value, *ref.grad, im, ref.name);
    }
    for (int k = 0; k < 3; ++k) {
      probe_tensor(feats, gfeat,
                   static_cast<size_t>(s) * 11 + static_cast<size_t>(k) * 17, "features");
    }
  }
  double secs = seconds_since(t0);

  bool pass = worst < kGradTol && secs < kGradBudgetS;
  report(2, pass, fmt("gradient check: %.0f probes, max relative error %.3g (limit 1e-4), %.1f s",
                      static_cast<double>(probes), worst, secs));
  CHECK(probes >= 500);
  CHECK(worst < kGradTol);
  CHECK(secs < kGradBudgetS);
}

TEST_CASE("criterion 3: causal stack never looks ahead; context matches the per-layer sum") {
  model::ModelConfig cfg;
  cfg.conv_config = model::ConvConfig::Small;
  cfg.blstm_depth = 1;
  cfg.blstm_width = 16;
  cfg.fc_depth = 0;
  cfg.delta_phase = false;
  cfg.input_channels = 2;
  cfg.causal = true;

  auto net = model::NetworkF::build(cfg, 4242);
  const int frames = 36, bins = 257;
  nn::TensorF feats({frames, bins, 2});
  Rng rng(31);
  for (auto& v : feats.v) v = static_cast<float>(0.3 * rng.normal());

  auto base = net.forward(feats, nullptr);
  const int tp = 30;
  nn::TensorF bumped = feats;
  for (int f = 0; f < bins; ++f)
    for (int c = 0; c < 2; ++c) bumped.at(tp, f, c) += 0.7f;
  auto out = net.forward(bumped, nullptr);

  bool past_untouched = true;
  for (int t = 0; t < tp && past_untouched; ++t)
    for (int f = 0; f < bins; ++f)
      if (out.at(t, f) != base.at(t, f)) {
        past_untouched = false;
        break;
      }
  bool present_changed = false;
  for (int f = 0; f < bins; ++f)
    if (out.at(tp, f) != base.at(tp, f)) present_changed = true;

  // Per-layer context sum over the causal conv stack.
  int past_sum = 0, future_sum = 0;
  for (const auto& spec : model::conv_stack(model::ConvConfig::Small, true)) {
    auto [p, f] = nn::conv_layer_context(spec);
    past_sum += p;
    future_sum += f;
  }
  auto stats = model::model_stats(cfg);

  bool pass = past_untouched && present_changed && past_sum == 130 && future_sum == 0 &&
              stats.past_context_frames == 130 && stats.future_context_frames == 0;
  report(3, pass, fmt("causality: past outputs bit-identical under future perturbation; "
                      "receptive field %.0f past / %.0f future frames",
                      static_cast<double>(stats.past_context_frames),
                      static_cast<double>(stats.future_context_frames)));
  CHECK(past_untouched);
  CHECK(present_changed);
  CHECK(past_sum == 130);
  CHECK(future_sum == 0);
  CHECK(stats.past_context_frames == 130);
  CHECK(stats.future_context_frames == 0);
}

TEST_CASE("criterion 4: streaming equals offline at every look-ahead; chunking is bit-exact") {
  dsp::StftParams params;
  double worst = 0.0;

  auto stream_all = [&](stream::StreamEngine& eng, const AudioBuffer& clip,
                        const std::vector<size_t>& sizes) {
    std::vector<double> out;
    size_t pos = 0, si = 0;
    while (pos < clip.length()) {
      size_t n = std::min(sizes[si++ % sizes.size()], clip.length() - pos);
      std::vector<std::vector<double>> chunk;
      for (const auto& ch : clip.samples)
        chunk.emplace_back(ch.begin() + static_cast<long>(pos),
                           ch.begin() + static_cast<long>(pos + n));
      auto got = eng.push(chunk);
      out.insert(out.end(), got.begin(), got.end());
      pos += n;
    }
    auto tail = eng.flush();
    out.insert(out.end(), tail.begin(), tail.end());
    return out;
  };

  // Light recurrent model across the full look-ahead grid, ten clips each.
  model::ModelConfig light;
  light.conv_config = model::ConvConfig::None;
  light.blstm_depth = 1;
  light.blstm_width = 12;
  light.fc_depth = 1;
  light.fc_width = 12;
  light.delta_phase = true;
  light.input_channels = 2;
  light.causal = true;
  for (int ms : {-100, 0, 100, 200}) {
    light.look_ahead_frames = ms / 10;
    auto net = model::NetworkF::build(light, 600 + static_cast<uint64_t>(ms));
    for (int i = 0; i < 10; ++i) {
      auto clip = testutil::noise_audio(700 + i, 0.2 + 0.025 * i, 2);
      auto offline = model::enhance_offline(&net, clip, params);
      stream::StreamEngine eng(net, params);
      auto streamed = stream_all(eng, clip, {163, 1, 320, 77});
      REQUIRE(streamed.size() == clip.length());
      for (size_t n = 0; n < streamed.size(); ++n)
        worst = std::max(worst, std::abs(streamed[n] - offline.samples[0][n]));
    }
  }

  // Dilated conv rings under streaming.
  model::ModelConfig convy = light;
  convy.conv_config = model::ConvConfig::Small;
  convy.blstm_width = 8;
  convy.fc_depth = 0;
  for (int ms : {0, 100}) {
    convy.look_ahead_frames = ms / 10;
    auto net = model::NetworkF::build(convy, 800 + static_cast<uint64_t>(ms));
    for (double dur : {0.22, 0.31}) {
      auto clip = testutil::noise_audio(810 + static_cast<uint64_t>(dur * 100), dur, 2);
      auto offline = model::enhance_offline(&net, clip, params);
      stream::StreamEngine eng(net, params);
      auto streamed = stream_all(eng, clip, {160, 333, 41});
      REQUIRE(streamed.size() == clip.length());
      for (size_t n = 0; n < streamed.size(); ++n)
        worst = std::max(worst, std::abs(streamed[n] - offline.samples[0][n]));
    }
  }

  // Chunking invariance, compared bitwise across patterns.
  light.look_ahead_frames = 0;
  auto net = model::NetworkF::build(light, 900);
  auto clip = testutil::noise_audio(901, 0.33, 2);
  std::vector<std::vector<double>> outputs;
  for (const auto& sizes :
       std::vector<std::vector<size_t>>{{clip.length()}, {1, 13, 401, 7, 1600}, {159}}) {
    stream::StreamEngine eng(net, params);
    outputs.push_back(stream_all(eng, clip, sizes));
  }
  bool chunk_exact = outputs[1] == outputs[0] && outputs[2] == outputs[0];

  bool pass = worst < kStreamTol && chunk_exact;
  report(4, pass, fmt("streaming vs offline: max waveform deviation %.3g (limit 1e-5), "
                      "chunking bit-exact: %.0f", worst, chunk_exact ? 1.0 : 0.0));
  CHECK(worst < kStreamTol);
  CHECK(chunk_exact);
}

TEST_CASE("criterion 5: projection SDR against dense least squares and pinned cases") {
  double worst_db = 0.0;
  Rng rng(51);
  for (int k = 0; k < 100; ++k) {
    int n = static_cast<int>(rng.uniform_int(40, 220));
    int L = static_cast<int>(rng.uniform_int(1, 12));
    std::vector<double> ref(static_cast<size_t>(n)), est(static_cast<size_t>(n));
    for (auto& v : ref) v = rng.normal();
    for (int i = 0; i < n; ++i) est[static_cast<size_t>(i)] =
        0.8 * ref[static_cast<size_t>(i)] + 0.4 * rng.normal();
    bool capped = false;
    double got = eval::sdr_value(est, ref, L, &capped);
    REQUIRE_FALSE(capped);
    double want = oracle::sdr_reference(est, ref, L);
    worst_db = std::max(worst_db, std::abs(got - want));
  }

  // Noise built orthogonal to every delayed copy of the reference, scaled to
  // a 10:1 energy ratio: the projection recovers the reference exactly and
  // the SDR is 10 dB by construction.
  const int n = 160, L = 24;
  std::vector<double> ref(n), noise(n);
  Rng rng2(52);
  for (auto& v : ref) v = rng2.normal();
  for (auto& v : noise) v = rng2.normal();
  // Project the noise onto the delayed-reference family and subtract the
  // projection, leaving a residual orthogonal to every delayed copy.
  {
    std::vector<std::vector<double>> cols;
    for (int j = 0; j < L; ++j) {
      std::vector<double> d(n, 0.0);
      for (int r = j; r < n; ++r) d[static_cast<size_t>(r)] = ref[static_cast<size_t>(r - j)];
      cols.push_back(std::move(d));
    }
    std::vector<double> gram(static_cast<size_t>(L) * L, 0.0);
    std::vector<double> rhs(L, 0.0);
    for (int a = 0; a < L; ++a) {
      for (int b = 0; b < L; ++b) {
        double s = 0.0;
        for (int r = 0; r < n; ++r)
          s += cols[static_cast<size_t>(a)][static_cast<size_t>(r)] *
               cols[static_cast<size_t>(b)][static_cast<size_t>(r)];
        gram[static_cast<size_t>(a) * L + b] = s;
      }
      double s = 0.0;
      for (int r = 0; r < n; ++r)
        s += cols[static_cast<size_t>(a)][static_cast<size_t>(r)] * noise[static_cast<size_t>(r)];
      rhs[static_cast<size_t>(a)] = s;
    }
    auto coef = oracle::solve_dense(gram, rhs);
    for (int j = 0; j < L; ++j)
      for (int r = 0; r < n; ++r)
        noise[static_cast<size_t>(r)] -= coef[static_cast<size_t>(j)] *
                                         cols[static_cast<size_t>(j)][static_cast<size_t>(r)];
  }
  double e_ref = 0.0, e_noise = 0.0;
  for (double v : ref) e_ref += v * v;
  for (double v : noise) e_noise += v * v;
  double scale = std::sqrt(e_ref / (10.0 * e_noise));
  std::vector<double> est10(ref);
  for (int r = 0; r < n; ++r) est10[static_cast<size_t>(r)] += scale * noise[static_cast<size_t>(r)];
  bool capped10 = false;
  double sdr10 = eval::sdr_value(est10, ref, L, &capped10);

  // Bucket-mean arithmetic over a published-style row of six bucket scores.
  const double row[6] = {12.17, 13.44, 14.70, 15.83, 17.30, 18.78};
  std::vector<eval::SdrResult> results;
  for (int b = 0; b < 6; ++b) {
    eval::SdrResult r;
    r.utterance_id = "row" + std::to_string(b);
    r.input_snr_db = eval::kSnrBuckets[static_cast<size_t>(b)];
    r.sdr_db = row[b];
    results.push_back(r);
  }
  double overall = eval::aggregate(results).overall;

  bool pass = worst_db < kSdrOracleTolDb && !capped10 &&
              std::abs(sdr10 - 10.0) < kOrthoTolDb &&
              std::abs(overall - 15.37) < kRowMeanTolDb;
  report(5, pass, fmt("sdr oracle: max |toeplitz - dense| %.3g dB, orthogonal case %.4f dB, "
                      "row mean %.4f dB", worst_db, sdr10, overall));
  CHECK(worst_db < kSdrOracleTolDb);
  CHECK_FALSE(capped10);
  CHECK(std::abs(sdr10 - 10.0) < kOrthoTolDb);
  CHECK(std::abs(overall - 15.37) < kRowMeanTolDb);
}

TEST_CASE("criterion 6: production config structure, cost ratio, and size formulas") {
  auto info = run_cli({"info", testutil::data_path("table3.cfg")});
  bool info_ok = info.code == 0 &&
                 info.out.find("conv_config: small") != std::string::npos &&
                 info.out.find("blstm_depth: 3") != std::string::npos &&
                 info.out.find("blstm_width: 1023") != std::string::npos &&
                 info.out.find("fc_width: 873") != std::string::npos &&
                 info.out.find("input_channels: 2") != std::string::npos &&
                 info.out.find("delta_phase: on") != std::string::npos;

  auto cfg = model::load_model_config(testutil::data_path("table3.cfg"));
  auto small_stats = model::model_stats(cfg);
  auto large_cfg = cfg;
  large_cfg.conv_config = model::ConvConfig::Large;
  auto large_stats = model::model_stats(large_cfg);
  double ratio = large_stats.ops_per_audio_second / small_stats.ops_per_audio_second;

  double params = static_cast<double>(small_stats.param_count);
  bool size_ok = params > kParamTarget / 2 && params < kParamTarget * 2;

  // Per-layer formulas against explicit arithmetic.
  nn::ConvLayerSpec first{32, 1, 7, 1, 1, nn::PaddingMode::Centered};
  bool formulas_ok =
      nn::conv_params(first, 2) == 1 * 7 * 2 * 32 + 32 &&
      nn::conv_ops_per_frame(first, 2, 257) == 257.0 * 2 * 32 * 1 * 7 &&
      nn::lstm_dir_params(2056, 1023) == 4LL * (1023LL * (2056 + 1023) + 1023) &&
      nn::dense_params(2046, 873) == 2046LL * 873 + 873;

  // Whole-model hand count for the production config: 4 feature channels in,
  // the fixed 8-layer conv stack, three bidirectional recurrent layers with
  // one input projection, two dense layers, sigmoid head over 257 bins.
  long long convs = (1 * 7 * 4 * 32 + 32)        // bins x 7 over 4 channels
                    + (7 * 1 * 32 * 32 + 32)     // 7 frames x 1 bin
                    + 5 * (5 * 5 * 32 * 32 + 32) // dilated 5x5 tower
                    + (1 * 1 * 32 * 8 + 8);      // 1x1 bottleneck to 8 maps
  long long lstm0 = 2 * (4LL * (1023LL * (2056 + 1023) + 1023)) + 2056LL * 2046;
  long long lstm12 = 2 * (2 * (4LL * (1023LL * (2046 + 1023) + 1023)));
  long long fcs = (2046LL * 873 + 873) + (873LL * 873 + 873);
  long long head = 873LL * 257 + 257;
  long long hand_total = convs + lstm0 + lstm12 + fcs + head;
  bool total_ok = hand_total == small_stats.param_count;

  bool pass = info_ok && ratio >= kOpsRatioLo && ratio <= kOpsRatioHi && size_ok &&
              formulas_ok && total_ok;
  report(6, pass, fmt("structure: ops ratio large/small %.2f (range 1.5..2.5), "
                      "param count %.1fM (target 65M within 2x)", ratio, params / 1e6));
  CHECK(info_ok);
  CHECK(ratio >= kOpsRatioLo);
  CHECK(ratio <= kOpsRatioHi);
  CHECK(size_ok);
  CHECK(formulas_ok);
  CHECK_MESSAGE(total_ok, "hand total ", hand_total, " vs ", small_stats.param_count);
}

TEST_CASE("criterion 7: desk-scale training lifts dev SDR over the noisy baseline") {
  auto train_m = data::make_desk_manifest("train", 1, 3.0, 17);
  auto dev_m = data::make_desk_manifest("dev", 1, 3.0, 17);

  auto t0 = Clock::now();
  testutil::TempDir dir("accept7");
  auto opts = smoke_train_options(1);
  opts.out_dir = dir.path();
  auto run = harness::train(opts, train_m, dev_m);
  double secs = seconds_since(t0);

  double gain = run.best_dev_sdr - run.baseline_dev_sdr;
  bool pass = !run.failed && gain >= kTrainGainDb && secs < kTrainBudgetS;
  report(7, pass, fmt("desk training: dev SDR gain %.2f dB over baseline (need >= 3), "
                      "%.0f s for 2000 steps", gain, secs));
  CHECK_FALSE(run.failed);
  CHECK(gain >= kTrainGainDb);
  CHECK(secs < kTrainBudgetS);
}

TEST_CASE("criterion 8: negative look-ahead costs SDR; non-negative is flat") {
  auto train_m = data::make_desk_manifest("train", 1, 3.0, 19);
  auto dev_m = data::make_desk_manifest("dev", 1, 3.0, 19);
  auto eval_m = data::make_desk_manifest("eval", 1, 3.0, 19);
  auto base = model::load_model_config(testutil::data_path("sweep_base.cfg"));

  harness::SweepOptions opts;
  opts.look_ahead_ms = {-100, 0, 100, 200};
  opts.trials_per_point = 2;
  opts.distinct_trial_seeds = true;
  opts.seed = 2;
  opts.steps = 300;
  opts.batch_size = 2;
  opts.checkpoint_every = 100;
  opts.chunk_seconds = 1.5;
  opts.filter_len = 512;
  opts.eval_threads = 1;

  auto t0 = Clock::now();
  auto points = harness::lookahead_sweep(base, opts, train_m, dev_m, eval_m);
  double secs = seconds_since(t0);
  REQUIRE(points.size() == 4);

  double at_neg = points[0].eval_mean;
  double at_zero = points[1].eval_mean;
  double flat_lo = points[1].eval_mean, flat_hi = points[1].eval_mean;
  for (size_t i = 1; i < 4; ++i) {
    flat_lo = std::min(flat_lo, points[i].eval_mean);
    flat_hi = std::max(flat_hi, points[i].eval_mean);
  }
  double drop = at_zero - at_neg;
  double spread = flat_hi - flat_lo;

  bool pass = drop >= kLagDropDb && spread <= kLagFlatDb;
  report(8, pass, fmt("look-ahead: -100 ms lags 0 ms by %.2f dB (need >= 1), "
                      "0..200 ms spread %.2f dB (limit 1), %.0f s", drop, spread, secs));
  CHECK(drop >= kLagDropDb);
  CHECK(spread <= kLagFlatDb);
}

TEST_CASE("criterion 9: identical seeds reproduce checkpoints and CSVs bit for bit") {
  auto train_m = data::make_desk_manifest("train", 1, 3.0, 17);
  auto dev_m = data::make_desk_manifest("dev", 1, 3.0, 17);

  testutil::TempDir da("accept9a"), db("accept9b");
  auto oa = smoke_train_options(1);
  oa.out_dir = da.path();
  auto ob = smoke_train_options(1);
  ob.out_dir = db.path();
  auto ra = harness::train(oa, train_m, dev_m);
  auto rb = harness::train(ob, train_m, dev_m);

  bool best_same = testutil::read_text_file(da.file("best.ckpt")) ==
                   testutil::read_text_file(db.file("best.ckpt"));
  bool final_same = testutil::read_text_file(da.file("final.ckpt")) ==
                    testutil::read_text_file(db.file("final.ckpt"));
  bool csv_same = testutil::read_text_file(da.file("metrics.csv")) ==
                  testutil::read_text_file(db.file("metrics.csv"));
  bool nonempty = !testutil::read_text_file(da.file("best.ckpt")).empty();

  bool pass = !ra.failed && !rb.failed && best_same && final_same && csv_same && nonempty;
  report(9, pass, fmt("determinism: best/final checkpoints and metrics identical "
                      "across %.0f-step reruns", static_cast<double>(kTrainSteps)));
  CHECK_FALSE(ra.failed);
  CHECK_FALSE(rb.failed);
  CHECK(nonempty);
  CHECK(best_same);
  CHECK(final_same);
  CHECK(csv_same);
}
