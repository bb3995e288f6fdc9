#include "maskstream/data/corpus.hpp"

#include <cmath>
#include <filesystem>
#include <stdexcept>

#include "maskstream/data/synth.hpp"

namespace maskstream::data {

void quantize_float32(AudioBuffer& a) {
  for (auto& ch : a.samples) {
    for (double& v : ch) v = static_cast<double>(static_cast<float>(v));
  }
}

UtterancePair synth_pair(const MixtureSpec& spec, int variant) {
  AudioBuffer target = synth_target(spec.duration_s, spec.target_seed);
  AudioBuffer noise = synth_noise(spec.duration_s, spec.noise_seed, variant);
  MixResult mix = mix_at_snr(target, noise, spec.snr_db);
  UtterancePair p;
  p.id = spec.id;
  p.noisy = std::move(mix.noisy);
  p.clean = std::move(mix.clean);
  p.input_snr_db = spec.snr_db;
  quantize_float32(p.noisy);
  quantize_float32(p.clean);
  return p;
}

UtterancePair load_pair(const MixtureSpec& spec, int variant,
                        const std::string& dir) {
  if (dir.empty()) return synth_pair(spec, variant);
  const std::string noisy_path = dir + "/" + spec.id + "_noisy.wav";
  const std::string clean_path = dir + "/" + spec.id + "_clean.wav";
  UtterancePair p;
  p.id = spec.id;
  p.noisy = read_wav(noisy_path);
  p.clean = read_wav(clean_path);
  p.input_snr_db = spec.snr_db;
  if (p.noisy.channels() != 2 || p.clean.channels() != 1) {
    throw std::runtime_error("unexpected channel layout for \"" + spec.id +
                             "\" in " + dir);
  }
  if (p.noisy.length() != p.clean.length()) {
    throw std::runtime_error("noisy/clean length mismatch for \"" + spec.id +
                             "\" in " + dir);
  }
  return p;
}

void build_corpus(const DatasetManifest& m, const std::string& dir) {
  validate_manifest(m);
  std::filesystem::create_directories(dir);
  const int variant = variant_for_split(m.split);
  for (const MixtureSpec& spec : m.entries) {
    UtterancePair p = synth_pair(spec, variant);
    write_wav(dir + "/" + spec.id + "_noisy.wav", p.noisy, WavEncoding::Float32);
    write_wav(dir + "/" + spec.id + "_clean.wav", p.clean, WavEncoding::Float32);
  }
}

std::vector<UtterancePair> chunk_fixed(const UtterancePair& p, double chunk_s) {
  if (!(chunk_s > 0.0)) throw std::invalid_argument("chunk_fixed: bad chunk length");
  const auto clen =
      static_cast<size_t>(std::llround(chunk_s * p.noisy.sample_rate));
  if (clen == 0) throw std::invalid_argument("chunk_fixed: bad chunk length");
  const size_t n = p.noisy.length() / clen;
  std::vector<UtterancePair> out;
  out.reserve(n);
  for (size_t k = 0; k < n; ++k) {
    UtterancePair c;
    c.id = p.id + "#" + std::to_string(k);
    c.input_snr_db = p.input_snr_db;
    c.noisy.sample_rate = p.noisy.sample_rate;
    c.clean.sample_rate = p.clean.sample_rate;
    const size_t lo = k * clen, hi = lo + clen;
    for (const auto& ch : p.noisy.samples) {
      c.noisy.samples.emplace_back(ch.begin() + static_cast<long>(lo),
                                   ch.begin() + static_cast<long>(hi));
    }
    for (const auto& ch : p.clean.samples) {
      c.clean.samples.emplace_back(ch.begin() + static_cast<long>(lo),
                                   ch.begin() + static_cast<long>(hi));
    }
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace maskstream::data
