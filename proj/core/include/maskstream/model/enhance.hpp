#pragma once

#include "maskstream/audio.hpp"
#include "maskstream/dsp/stft.hpp"
#include "maskstream/model/network.hpp"

namespace maskstream::model {

// Look-ahead shifts which network-output row masks which audio frame. With
// look_ahead_frames = k, the mask for frame t is the output at padded feature
// row t + max(k, 0): k > 0 appends k zero rows so the network runs k frames
// past the end, k < 0 prepends |k| zero rows so the state at row t has only
// seen features up to t + k.
int pad_rows_before(const ModelConfig& cfg);
int pad_rows_after(const ModelConfig& cfg);
int mask_row_offset(const ModelConfig& cfg);

template <typename T>
nn::Tensor<T> pad_feature_rows(const nn::Tensor<T>& feats, int before, int after);

// Feature extraction, forward pass, look-ahead alignment. Returns the mask
// aligned to audio frames, [frames][bins].
nn::TensorF compute_mask(const Network<float>& net, const dsp::ComplexSpectrogram& spec);

// Full offline pipeline: STFT, mask, mask times the channel-summed input,
// inverse STFT trimmed to the input length. bypass_mask skips the network
// (net may be null) and resynthesizes the channel sum directly.
AudioBuffer enhance_offline(const Network<float>* net, const AudioBuffer& noisy,
                            const dsp::StftParams& params, bool bypass_mask = false);

}  // namespace maskstream::model
