#include <cmath>
#include <complex>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "maskstream/audio.hpp"
#include "maskstream/dsp/features.hpp"
#include "maskstream/dsp/stft.hpp"
#include "maskstream/rng.hpp"
#include "oracles.hpp"

using namespace maskstream;
using dsp::StftParams;

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

AudioBuffer tone(double freq, double seconds, int channels = 1, int sr = 16000) {
  AudioBuffer a;
  a.sample_rate = sr;
  size_t n = static_cast<size_t>(seconds * sr);
  a.samples.assign(channels, std::vector<double>(n));
  for (int c = 0; c < channels; ++c) {
    for (size_t i = 0; i < n; ++i) {
      a.samples[c][i] = 0.3 * std::sin(2.0 * kPi * freq * static_cast<double>(i) / sr + 0.2 * c);
    }
  }
  return a;
}

}  // namespace

TEST_CASE("stft params: defaults and validation") {
  StftParams p;
  CHECK(p.bins() == 257);
  CHECK(p.frames_per_second() == doctest::Approx(100.0));
  CHECK_NOTHROW(p.validate());

  StftParams bad = p;
  bad.hop = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = p;
  bad.hop = p.frame_len + 1;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = p;
  bad.fft_size = p.frame_len - 1;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = p;
  bad.sample_rate = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("hann window: periodic form") {
  auto w = dsp::hann_window(400);
  REQUIRE(w.size() == 400);
  CHECK(w[0] == doctest::Approx(0.0));
  CHECK(w[200] == doctest::Approx(1.0));
  for (int k = 1; k < 400; ++k) {
    CHECK(w[k] == doctest::Approx(w[400 - k]).epsilon(1e-12));
    CHECK(w[k] == doctest::Approx(0.5 - 0.5 * std::cos(2.0 * kPi * k / 400.0)).epsilon(1e-12));
  }
  // Periodic (not symmetric) window: w[1] != w[399] would fail above if the
  // denominator were N-1.
  CHECK(w[1] != doctest::Approx(0.0));
}

TEST_CASE("frame count: covers the signal, throws on empty") {
  StftParams p;
  CHECK_THROWS_AS(dsp::frame_count(0, p), std::invalid_argument);
  Rng rng(41);
  for (int it = 0; it < 200; ++it) {
    size_t len = static_cast<size_t>(rng.uniform_int(1, 20000));
    int m = dsp::frame_count(len, p);
    // Brute force: the smallest frame count whose last frame start reaches
    // every sample (frames are hop-spaced, frame_len wide, zero padded).
    size_t covered = static_cast<size_t>(m - 1) * p.hop + p.frame_len;
    CHECK(covered >= len);
    if (m > 1) {
      size_t covered_prev = static_cast<size_t>(m - 2) * p.hop + p.frame_len;
      CHECK(covered_prev < len);
    }
  }
  CHECK(dsp::frame_count(1, p) == 1);
  CHECK(dsp::frame_count(400, p) == 1);
  CHECK(dsp::frame_count(401, p) == 2);
  CHECK(dsp::frame_count(16000, p) == 99);
}

TEST_CASE("fft matches the quadratic transform and inverts exactly") {
  Rng rng(7);
  for (int n : {8, 512}) {
    std::vector<std::complex<double>> x(n);
    for (auto& v : x) v = {rng.normal(), rng.normal()};
    auto want = oracle::naive_dft(x, false);
    std::vector<std::complex<double>> got = x;
    dsp::fft_inplace(got.data(), n, false);
    for (int k = 0; k < n; ++k) {
      CHECK(std::abs(got[k] - want[k]) < 1e-9 * n);
    }
    dsp::fft_inplace(got.data(), n, true);
    for (int k = 0; k < n; ++k) {
      CHECK(std::abs(got[k] - x[k]) < 1e-12 * n);
    }
  }
}

TEST_CASE("stft: shape, layout, and linearity") {
  AudioBuffer a = testutil::noise_audio(11, 0.43, 2);
  AudioBuffer b = testutil::noise_audio(12, 0.43, 2);
  auto sa = dsp::stft(a);
  CHECK(sa.bins == 257);
  CHECK(sa.channels == 2);
  CHECK(sa.frames == dsp::frame_count(a.length(), sa.params));
  CHECK(sa.original_length == a.length());
  CHECK(sa.values.size() == static_cast<size_t>(sa.frames) * sa.bins * sa.channels);

  // at() agrees with frame() pointer layout: [t][f][c] row-major.
  CHECK(sa.at(3, 100, 1) == sa.frame(3)[100 * 2 + 1]);

  // Linearity.
  auto sb = dsp::stft(b);
  AudioBuffer mix = a;
  for (int c = 0; c < 2; ++c) {
    for (size_t i = 0; i < mix.samples[c].size(); ++i) {
      mix.samples[c][i] = 2.0 * a.samples[c][i] - 0.5 * b.samples[c][i];
    }
  }
  auto sm = dsp::stft(mix);
  double err = 0.0;
  for (size_t i = 0; i < sm.values.size(); ++i) {
    err = std::max(err, std::abs(sm.values[i] - (2.0 * sa.values[i] - 0.5 * sb.values[i])));
  }
  CHECK(err < 1e-9);

  // Channels are analyzed independently.
  AudioBuffer mono;
  mono.sample_rate = a.sample_rate;
  mono.samples = {a.samples[1]};
  auto s1 = dsp::stft(mono);
  double cherr = 0.0;
  for (int t = 0; t < sa.frames; ++t) {
    for (int f = 0; f < sa.bins; ++f) {
      cherr = std::max(cherr, std::abs(sa.at(t, f, 1) - s1.at(t, f, 0)));
    }
  }
  CHECK(cherr == 0.0);

  CHECK_THROWS_AS(dsp::stft(AudioBuffer{}), std::invalid_argument);
}

TEST_CASE("stft frame values match direct windowed DFT") {
  AudioBuffer a = testutil::noise_audio(21, 0.1, 1);
  StftParams p;
  auto s = dsp::stft(a, p);
  auto w = dsp::hann_window(p.frame_len);
  for (int t : {0, 3, s.frames - 1}) {
    std::vector<std::complex<double>> buf(p.fft_size, 0.0);
    for (int n = 0; n < p.frame_len; ++n) {
      size_t idx = static_cast<size_t>(t) * p.hop + n;
      double x = idx < a.length() ? a.samples[0][idx] : 0.0;
      buf[n] = x * w[n];
    }
    auto want = oracle::naive_dft(buf, false);
    for (int f = 0; f < s.bins; ++f) {
      CHECK(std::abs(s.at(t, f, 0) - want[f]) < 1e-8);
    }
  }
}

TEST_CASE("istft: round trip is near-exact and trims to the input length") {
  for (double seconds : {0.026, 0.1, 0.5, 1.0}) {
    AudioBuffer a = testutil::noise_audio(31 + static_cast<uint64_t>(seconds * 1000), seconds, 2);
    auto rec = dsp::istft(dsp::stft(a));
    REQUIRE(rec.length() == a.length());
    REQUIRE(rec.channels() == 2);
    // Sample 0 is unrecoverable by construction: the analysis window is
    // exactly zero there, so it never enters any frame.
    double peak = 0.0, err = 0.0;
    for (int c = 0; c < 2; ++c) {
      for (size_t i = 1; i < a.length(); ++i) {
        peak = std::max(peak, std::abs(a.samples[c][i]));
        err = std::max(err, std::abs(a.samples[c][i] - rec.samples[c][i]));
      }
    }
    CHECK(err < 1e-7 * peak);
    for (int c = 0; c < 2; ++c) CHECK(rec.samples[c][0] == 0.0);
  }
}

TEST_CASE("istft: signal shorter than one frame still reconstructs") {
  AudioBuffer a = testutil::noise_audio(77, 0.01, 1);  // 160 samples
  REQUIRE(a.length() == 160);
  auto rec = dsp::istft(dsp::stft(a));
  REQUIRE(rec.length() == 160);
  double err = 0.0;
  for (size_t i = 1; i < 160; ++i) err = std::max(err, std::abs(a.samples[0][i] - rec.samples[0][i]));
  CHECK(err < 1e-7);
}

TEST_CASE("power compression: bijection and magnitude law") {
  AudioBuffer a = tone(440.0, 0.2, 2);
  auto s = dsp::stft(a);
  auto c = dsp::power_compress(s, 0.3);
  for (size_t i = 0; i < s.values.size(); ++i) {
    double m = std::abs(s.values[i]);
    double mc = std::abs(c.values[i]);
    if (m > 1e-12) {
      CHECK(mc == doctest::Approx(std::pow(m, 0.3)).epsilon(1e-9));
      // Phase preserved.
      CHECK(std::arg(c.values[i]) == doctest::Approx(std::arg(s.values[i])).epsilon(1e-9));
    }
  }
  auto back = dsp::power_compress(c, 1.0 / 0.3);
  double err = 0.0, peak = 0.0;
  for (size_t i = 0; i < s.values.size(); ++i) {
    err = std::max(err, std::abs(back.values[i] - s.values[i]));
    peak = std::max(peak, std::abs(s.values[i]));
  }
  CHECK(err < 1e-6 * peak);
  CHECK_THROWS_AS(dsp::power_compress(s, 0.0), std::invalid_argument);
}

TEST_CASE("channel sum adds channels in order") {
  AudioBuffer a = testutil::noise_audio(55, 0.15, 2);
  auto s = dsp::stft(a);
  auto z = dsp::channel_sum(s);
  CHECK(z.channels == 1);
  CHECK(z.frames == s.frames);
  CHECK(z.original_length == s.original_length);
  for (int t = 0; t < s.frames; ++t) {
    for (int f = 0; f < s.bins; ++f) {
      CHECK(std::abs(z.at(t, f, 0) - (s.at(t, f, 0) + s.at(t, f, 1))) == 0.0);
    }
  }
}

TEST_CASE("magnitude features follow the compression power under scaling") {
  AudioBuffer a = testutil::noise_audio(61, 0.2, 2);
  AudioBuffer a4 = a;
  for (auto& ch : a4.samples) {
    for (auto& x : ch) x *= 4.0;
  }
  auto f1 = dsp::magnitude_features<double>(dsp::stft(a), 0.3);
  auto f4 = dsp::magnitude_features<double>(dsp::stft(a4), 0.3);
  const double want = std::pow(4.0, 0.3);
  for (size_t i = 0; i < f1.values.numel(); ++i) {
    if (f1.values.v[i] > 1e-6) {
      CHECK(f4.values.v[i] / f1.values.v[i] == doctest::Approx(want).epsilon(1e-6));
    }
  }
}

TEST_CASE("delta phase: principal range, zero first frame, scale invariance") {
  AudioBuffer a = testutil::noise_audio(62, 0.3, 2);
  auto s = dsp::stft(a);
  auto d = dsp::delta_phase<double>(s);
  REQUIRE(d.values.dim(0) == s.frames);
  for (int f = 0; f < s.bins; ++f) {
    for (int c = 0; c < 2; ++c) CHECK(d.values.at(0, f, c) == 0.0);
  }
  for (size_t i = 0; i < d.values.numel(); ++i) {
    CHECK(d.values.v[i] > -kPi - 1e-12);
    CHECK(d.values.v[i] <= kPi + 1e-12);
  }
  // Positive rescaling of the waveform leaves phase differences untouched.
  AudioBuffer a2 = a;
  for (auto& ch : a2.samples) {
    for (auto& x : ch) x *= 7.5;
  }
  auto d2 = dsp::delta_phase<double>(dsp::stft(a2));
  for (size_t i = 0; i < d.values.numel(); ++i) {
    CHECK(d2.values.v[i] == doctest::Approx(d.values.v[i]).epsilon(1e-9));
  }
  // Analytic check: a pure tone advances phase by 2*pi*f0*hop/sr per frame.
  // 1025 Hz advances 10.25 cycles per 10 ms hop -> principal value pi/2.
  AudioBuffer t1 = tone(1025.0, 0.2);
  auto dt = dsp::delta_phase<double>(dsp::stft(t1));
  double expect = std::remainder(2.0 * kPi * 1025.0 * 160.0 / 16000.0, 2.0 * kPi);
  CHECK(expect == doctest::Approx(kPi / 2).epsilon(1e-12));
  for (int t = 2; t < dt.values.dim(0) - 2; ++t) {
    CHECK(dt.values.at(t, 33, 0) == doctest::Approx(expect).epsilon(0.01));
  }
}

TEST_CASE("model features: layout matches magnitude + delta concatenation") {
  AudioBuffer a = testutil::noise_audio(63, 0.2, 2);
  auto s = dsp::stft(a);
  auto m = dsp::magnitude_features<double>(s, 0.3);
  auto d = dsp::delta_phase<double>(s);
  auto both = dsp::model_features<double>(s, 0.3, true);
  REQUIRE(both.rank() == 3);
  CHECK(both.dim(0) == s.frames);
  CHECK(both.dim(1) == s.bins);
  CHECK(both.dim(2) == 4);
  for (int t = 0; t < s.frames; ++t) {
    for (int f = 0; f < s.bins; ++f) {
      for (int c = 0; c < 2; ++c) {
        CHECK(both.at(t, f, c) == m.values.at(t, f, c));
        CHECK(both.at(t, f, 2 + c) == d.values.at(t, f, c));
      }
    }
  }
  auto mags_only = dsp::model_features<double>(s, 0.3, false);
  CHECK(mags_only.dim(2) == 2);
  for (size_t i = 0; i < mags_only.numel(); ++i) CHECK(mags_only.v[i] == m.values.v[i]);

  // concat utility mirrors the fused layout
  auto cat = dsp::concat_features(m, d);
  CHECK(cat.values.numel() == both.numel());
  for (size_t i = 0; i < cat.values.numel(); ++i) CHECK(cat.values.v[i] == both.v[i]);
}

TEST_CASE("wav io: float round trip is exact at float precision") {
  testutil::TempDir dir("wav");
  AudioBuffer a = testutil::noise_audio(71, 0.05, 2);
  write_wav(dir.file("x.wav"), a, WavEncoding::Float32);
  AudioBuffer b = read_wav(dir.file("x.wav"));
  REQUIRE(b.channels() == 2);
  REQUIRE(b.length() == a.length());
  CHECK(b.sample_rate == a.sample_rate);
  for (int c = 0; c < 2; ++c) {
    for (size_t i = 0; i < a.length(); ++i) {
      CHECK(b.samples[c][i] == static_cast<double>(static_cast<float>(a.samples[c][i])));
    }
  }

  write_wav(dir.file("p.wav"), a, WavEncoding::Pcm16);
  AudioBuffer p = read_wav(dir.file("p.wav"));
  double err = 0.0;
  for (size_t i = 0; i < a.length(); ++i) err = std::max(err, std::abs(p.samples[0][i] - a.samples[0][i]));
  CHECK(err < 1.0 / 32000.0);

  CHECK_THROWS(read_wav(dir.file("missing.wav")));
}
