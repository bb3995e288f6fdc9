#pragma once

#include <string>
#include <vector>

#include "maskstream/audio.hpp"
#include "maskstream/data/manifest.hpp"

namespace maskstream::data {

struct UtterancePair {
  std::string id;
  AudioBuffer noisy;  // 2 channels
  AudioBuffer clean;  // 1 channel
  double input_snr_db = 0.0;
};

// Rounds every sample to float32. Synthesized-in-memory audio and audio round-
// tripped through the float32 WAVs on disk are then bit-identical, so training
// and evaluation do not care which path produced a pair.
void quantize_float32(AudioBuffer& a);

// Synthesize one mixture from its manifest entry. `variant` as in synth_noise
// (use variant_for_split). Output is float32-quantized.
UtterancePair synth_pair(const MixtureSpec& spec, int variant);

// Load `<dir>/<id>_noisy.wav` / `<id>_clean.wav` if dir is non-empty (missing
// files are an error naming the path); otherwise synthesize on the fly.
UtterancePair load_pair(const MixtureSpec& spec, int variant,
                        const std::string& dir);

// Materialize every manifest entry under dir as `<id>_noisy.wav` and
// `<id>_clean.wav` (float32). Creates dir if needed. Deterministic, so
// re-running over an existing corpus rewrites identical files.
void build_corpus(const DatasetManifest& m, const std::string& dir);

// Split a pair into back-to-back chunks of exactly chunk_s seconds, dropping
// the remainder. Chunk k of utterance `u` gets id `u#k`.
std::vector<UtterancePair> chunk_fixed(const UtterancePair& p, double chunk_s);

}  // namespace maskstream::data
