#pragma once

#include "maskstream/dsp/stft.hpp"
#include "maskstream/model/config.hpp"

namespace maskstream::model {

// Closed-form size/cost accounting, computable from the config alone (no
// weights needed). Matches Network::param_count() exactly.
struct ModelStats {
  long long param_count = 0;
  double ops_per_frame = 0.0;         // multiply-adds through the whole net
  double ops_per_audio_second = 0.0;  // ops_per_frame * frame rate
  int past_context_frames = 0;        // conv receptive field behind the output
  int future_context_frames = 0;      // ... and ahead of it (0 when causal)
  size_t latency_samples = 0;         // algorithmic, incl. look-ahead
  double latency_ms = 0.0;
};

ModelStats model_stats(const ModelConfig& cfg,
                       const dsp::StftParams& stft = dsp::StftParams());

}  // namespace maskstream::model
