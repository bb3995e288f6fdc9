#pragma once

#include <cstdint>

#include "maskstream/audio.hpp"

namespace maskstream::data {

// Bumped whenever the synthesis recipe changes in any sample-visible way, so a
// manifest pins the exact corpus it was written against.
inline constexpr int kGeneratorVersion = 1;

// Harmonic "speech-like" target: a pitch random walk (80-300 Hz) under fixed
// formant resonances, syllabic amplitude modulation in the 2-8 Hz range, and
// interspersed silences. The two channels are identical (broadside source on a
// two-mic array). Peak-normalized to 0.5. Same (duration, seed) -> identical
// samples.
AudioBuffer synth_target(double duration_s, uint64_t seed, int sample_rate = 16000);

// Two-channel interference: pink noise plus gated tonal components, mixed from
// shared and per-channel generators so the inter-channel correlation lands
// strictly inside (0.2, 0.9), with a slow shared level envelope that never
// drops below half of its peak. `variant` 0 draws parameters from the training
// ranges, 1 from the shifted dev/eval ranges.
AudioBuffer synth_noise(double duration_s, uint64_t seed, int variant,
                        int sample_rate = 16000);

struct MixResult {
  AudioBuffer noisy;         // target + scaled noise, 2 channels
  AudioBuffer clean;         // reference: sum of the target channels, 1 channel
  AudioBuffer scaled_noise;  // the noise actually added, 2 channels
};

// Scales `noise` so that on channel 0 the target-to-noise energy ratio is
// exactly `snr_db`, and mixes. The clean reference is the *sum* of the two
// identical target channels (the 2x gain a unit mask applies to a broadside
// source), so that a perfect mask reproduces it exactly.
MixResult mix_at_snr(const AudioBuffer& target, const AudioBuffer& noise,
                     double snr_db);

}  // namespace maskstream::data
