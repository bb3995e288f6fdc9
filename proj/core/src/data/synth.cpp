#include "maskstream/data/synth.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "maskstream/rng.hpp"

namespace maskstream::data {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// Domain-separation tags so target/noise streams never collide even when the
// caller hands both the same seed.
constexpr uint64_t kTargetTag = 0x7a52'6745'7461'7267ULL;
constexpr uint64_t kNoiseTag = 0x6e6f'6973'6553'796eULL;

int sample_count(double duration_s, int sample_rate, const char* what) {
  if (!(duration_s > 0.0)) {
    throw std::invalid_argument(std::string(what) + ": duration must be positive");
  }
  if (sample_rate <= 0) {
    throw std::invalid_argument(std::string(what) + ": bad sample rate");
  }
  double n = std::llround(duration_s * sample_rate);
  if (n < 1) n = 1;
  return static_cast<int>(n);
}

double energy(const std::vector<double>& x) {
  double e = 0.0;
  for (double v : x) e += v * v;
  return e;
}

// Paul Kellet's economy pink-noise filter (three one-pole stages driven by the
// same white sample). Flat-ish 1/f down to a few Hz, cheap, state is three
// doubles.
struct Pink {
  double b0 = 0.0, b1 = 0.0, b2 = 0.0;
  double step(double white) {
    b0 = 0.99765 * b0 + white * 0.0990460;
    b1 = 0.96300 * b1 + white * 0.2965164;
    b2 = 0.57000 * b2 + white * 1.0526913;
    return b0 + b1 + b2 + white * 0.1848;
  }
};

}  // namespace

AudioBuffer synth_target(double duration_s, uint64_t seed, int sample_rate) {
  const int n = sample_count(duration_s, sample_rate, "synth_target");
  Rng rng(Rng::mix(seed, kTargetTag));

  // Fixed per-utterance vocal-tract resonances; energy stays well below 4 kHz.
  const double f1 = rng.uniform(300.0, 900.0), b1 = rng.uniform(80.0, 160.0);
  const double f2 = rng.uniform(900.0, 2200.0), b2 = rng.uniform(120.0, 240.0);
  const double f3 = rng.uniform(2200.0, 3400.0), b3 = rng.uniform(180.0, 320.0);
  const double am_rate = rng.uniform(2.0, 8.0);      // syllabic modulation
  const double am_phase = rng.uniform(0.0, kTwoPi);

  double f0 = rng.uniform(110.0, 260.0);
  double phase = rng.uniform(0.0, kTwoPi);

  // Voiced/silent gating with a ~30 ms one-pole ramp so segment edges are not
  // clicks. The clip always opens voiced so even short clips carry energy.
  bool voiced = true;
  double gate = 1.0;
  int seg_left = static_cast<int>(rng.uniform(0.25, 0.6) * sample_rate);
  const double gate_coeff = 0.002;

  const int block = sample_rate / 100;  // pitch/harmonic update every 10 ms
  std::vector<double> x(static_cast<size_t>(n), 0.0);
  std::vector<double> amp;
  for (int start = 0; start < n; start += block) {
    f0 = std::clamp(f0 + 2.5 * rng.normal(), 80.0, 300.0);
    const int nh =
        std::min(40, static_cast<int>(0.45 * sample_rate / f0));
    amp.assign(static_cast<size_t>(nh), 0.0);
    for (int h = 1; h <= nh; ++h) {
      const double fh = h * f0;
      auto lorentz = [fh](double fc, double bw) {
        const double d = (fh - fc) / bw;
        return 1.0 / (1.0 + d * d);
      };
      const double env = lorentz(f1, b1) + 0.7 * lorentz(f2, b2) + 0.4 * lorentz(f3, b3);
      amp[static_cast<size_t>(h - 1)] = env / std::sqrt(static_cast<double>(h));
    }
    const double dphi = kTwoPi * f0 / sample_rate;
    const int end = std::min(n, start + block);
    for (int i = start; i < end; ++i) {
      phase += dphi;
      if (phase > kTwoPi) phase -= kTwoPi;
      if (--seg_left <= 0) {
        voiced = !voiced;
        const double dur =
            voiced ? rng.uniform(0.2, 0.6) : rng.uniform(0.08, 0.3);
        seg_left = std::max(1, static_cast<int>(dur * sample_rate));
      }
      gate += ((voiced ? 1.0 : 0.0) - gate) * gate_coeff;
      double s = 0.0;
      for (int h = 1; h <= nh; ++h) {
        s += amp[static_cast<size_t>(h - 1)] * std::sin(h * phase);
      }
      const double t = static_cast<double>(i) / sample_rate;
      const double am = 0.55 + 0.45 * std::sin(kTwoPi * am_rate * t + am_phase);
      x[static_cast<size_t>(i)] = s * am * gate;
    }
  }

  double peak = 0.0;
  for (double v : x) peak = std::max(peak, std::abs(v));
  if (peak > 0.0) {
    const double g = 0.5 / peak;
    for (double& v : x) v *= g;
  }

  AudioBuffer out;
  out.sample_rate = sample_rate;
  out.samples = {x, x};  // broadside: identical on both mics
  return out;
}

AudioBuffer synth_noise(double duration_s, uint64_t seed, int variant,
                        int sample_rate) {
  const int n = sample_count(duration_s, sample_rate, "synth_noise");
  if (variant != 0 && variant != 1) {
    throw std::invalid_argument("synth_noise: variant must be 0 (train) or 1 (dev/eval)");
  }
  Rng rng(Rng::mix(Rng::mix(seed, kNoiseTag), static_cast<uint64_t>(variant)));

  // Shared/independent pink mix sets the inter-channel correlation of the
  // diffuse part exactly; the dev/eval variant draws from shifted ranges so
  // the two corpora differ in distribution, not just in seed.
  const double rho =
      variant == 0 ? rng.uniform(0.35, 0.80) : rng.uniform(0.25, 0.65);
  const double wa = std::sqrt(rho);
  const double wb = std::sqrt(1.0 - rho);

  struct Tone {
    double freq, amp, dphi;  // dphi: channel-1 phase offset
    double gate = 0.0;
    bool on = false;
    int seg_left = 1;
  };
  const int n_tones = static_cast<int>(rng.uniform_int(1, 3));
  std::vector<Tone> tones(static_cast<size_t>(n_tones));
  for (Tone& t : tones) {
    t.freq = variant == 0 ? rng.uniform(300.0, 5000.0) : rng.uniform(200.0, 6500.0);
    t.amp = rng.uniform(0.8, 2.0);
    t.dphi = rng.uniform(-0.7, 0.7);
    t.on = rng.coin();
    t.seg_left = std::max(1, static_cast<int>(rng.uniform(0.1, 0.5) * sample_rate));
  }

  // Slow shared level envelope; 0.56/1.0 keeps every window above half peak.
  const double env_rate = rng.uniform(0.08, 0.4);
  const double env_phase = rng.uniform(0.0, kTwoPi);

  Pink shared, ind0, ind1;
  std::vector<double> c0(static_cast<size_t>(n)), c1(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double ps = shared.step(rng.normal());
    const double p0 = ind0.step(rng.normal());
    const double p1 = ind1.step(rng.normal());
    const double t = static_cast<double>(i) / sample_rate;
    double tone0 = 0.0, tone1 = 0.0;
    for (Tone& tn : tones) {
      if (--tn.seg_left <= 0) {
        tn.on = !tn.on;
        tn.seg_left =
            std::max(1, static_cast<int>(rng.uniform(0.1, 0.5) * sample_rate));
      }
      tn.gate += ((tn.on ? 1.0 : 0.0) - tn.gate) * 0.005;
      const double th = kTwoPi * tn.freq * t;
      tone0 += tn.amp * tn.gate * std::sin(th);
      tone1 += tn.amp * tn.gate * std::sin(th + tn.dphi);
    }
    const double env = 0.78 + 0.22 * std::sin(kTwoPi * env_rate * t + env_phase);
    c0[static_cast<size_t>(i)] = env * (wa * ps + wb * p0 + tone0);
    c1[static_cast<size_t>(i)] = env * (wa * ps + wb * p1 + tone1);
  }

  // Common gain on both channels: fixes the level without touching the
  // correlation structure.
  const double rms = std::sqrt(energy(c0) / n);
  if (rms > 0.0) {
    const double g = 0.1 / rms;
    for (double& v : c0) v *= g;
    for (double& v : c1) v *= g;
  }

  AudioBuffer out;
  out.sample_rate = sample_rate;
  out.samples = {std::move(c0), std::move(c1)};
  return out;
}

MixResult mix_at_snr(const AudioBuffer& target, const AudioBuffer& noise,
                     double snr_db) {
  target.check_rectangular();
  noise.check_rectangular();
  if (target.channels() != 2 || noise.channels() != 2) {
    throw std::invalid_argument("mix_at_snr: target and noise must be 2-channel");
  }
  if (target.length() != noise.length()) {
    throw std::invalid_argument("mix_at_snr: length mismatch");
  }
  if (target.sample_rate != noise.sample_rate) {
    throw std::invalid_argument("mix_at_snr: sample rate mismatch");
  }
  const double et = energy(target.samples[0]);
  const double en = energy(noise.samples[0]);
  if (et <= 0.0 || en <= 0.0) {
    throw std::invalid_argument("mix_at_snr: zero-energy input");
  }
  // Exact on channel 0: et / (g^2 * en) == 10^(snr/10).
  const double g = std::sqrt(et / (en * std::pow(10.0, snr_db / 10.0)));

  const size_t len = target.length();
  MixResult r;
  r.noisy.sample_rate = target.sample_rate;
  r.clean.sample_rate = target.sample_rate;
  r.scaled_noise.sample_rate = target.sample_rate;
  r.noisy.samples.assign(2, std::vector<double>(len));
  r.scaled_noise.samples.assign(2, std::vector<double>(len));
  r.clean.samples.assign(1, std::vector<double>(len));
  for (int c = 0; c < 2; ++c) {
    for (size_t i = 0; i < len; ++i) {
      const double sn = g * noise.samples[static_cast<size_t>(c)][i];
      r.scaled_noise.samples[static_cast<size_t>(c)][i] = sn;
      r.noisy.samples[static_cast<size_t>(c)][i] =
          target.samples[static_cast<size_t>(c)][i] + sn;
    }
  }
  for (size_t i = 0; i < len; ++i) {
    r.clean.samples[0][i] = target.samples[0][i] + target.samples[1][i];
  }
  return r;
}

}  // namespace maskstream::data
