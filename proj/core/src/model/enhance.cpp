#include "maskstream/model/enhance.hpp"

#include <algorithm>
#include <stdexcept>

#include "maskstream/dsp/features.hpp"
#include "maskstream/model/loss.hpp"

namespace maskstream::model {

int pad_rows_before(const ModelConfig& cfg) { return std::max(-cfg.look_ahead_frames, 0); }

int pad_rows_after(const ModelConfig& cfg) { return std::max(cfg.look_ahead_frames, 0); }

int mask_row_offset(const ModelConfig& cfg) { return std::max(cfg.look_ahead_frames, 0); }

template <typename T>
nn::Tensor<T> pad_feature_rows(const nn::Tensor<T>& feats, int before, int after) {
  if (before < 0 || after < 0) throw std::invalid_argument("pad_feature_rows: negative pad");
  if (before == 0 && after == 0) return feats;
  std::vector<int> s = feats.shape;
  const int t_n = s[0];
  s[0] = t_n + before + after;
  nn::Tensor<T> out(s);
  const size_t row = t_n > 0 ? feats.numel() / t_n : 0;
  for (int t = 0; t < t_n; ++t) {
    std::copy(feats.row(t), feats.row(t) + row, out.row(before + t));
  }
  return out;
}

template nn::Tensor<float> pad_feature_rows<float>(const nn::Tensor<float>&, int, int);
template nn::Tensor<double> pad_feature_rows<double>(const nn::Tensor<double>&, int, int);

nn::TensorF compute_mask(const Network<float>& net, const dsp::ComplexSpectrogram& spec) {
  if (spec.channels != net.config.input_channels) {
    throw std::invalid_argument("enhance: input channel count does not match the model");
  }
  if (spec.bins != net.bins) {
    throw std::invalid_argument("enhance: bin count does not match the model");
  }
  nn::TensorF feats =
      dsp::model_features<float>(spec, net.config.compression_power, net.config.delta_phase);
  feats = pad_feature_rows(feats, pad_rows_before(net.config), pad_rows_after(net.config));
  nn::TensorF out = net.forward(feats, nullptr);
  const int off = mask_row_offset(net.config);
  nn::TensorF mask({spec.frames, spec.bins});
  for (int t = 0; t < spec.frames; ++t) {
    std::copy(out.row(t + off), out.row(t + off) + spec.bins, mask.row(t));
  }
  return mask;
}

AudioBuffer enhance_offline(const Network<float>* net, const AudioBuffer& noisy,
                            const dsp::StftParams& params, bool bypass_mask) {
  dsp::ComplexSpectrogram spec = dsp::stft(noisy, params);
  dsp::ComplexSpectrogram out;
  if (bypass_mask) {
    out = dsp::channel_sum(spec);
  } else {
    if (net == nullptr) {
      throw std::invalid_argument("enhance: a model is required unless the mask is bypassed");
    }
    out = apply_mask(compute_mask(*net, spec), spec);
  }
  return dsp::istft(out);
}

}  // namespace maskstream::model
