#pragma once

#include <complex>

#include "maskstream/dsp/stft.hpp"
#include "maskstream/nn/tensor.hpp"

namespace maskstream::dsp {

enum class FeatureKind { Magnitude, DeltaPhase, Concat };

template <typename T>
struct FeatureTensor {
  nn::Tensor<T> values;  // [frame][bin][feature channel]
  FeatureKind kind = FeatureKind::Magnitude;
};

// Writes one feature row for the frame whose complex bins are cur (layout
// [bin][channel]); prev is the previous frame or nullptr at stream start.
// Row layout: magnitudes for every input channel, then (optionally) the
// delta-phase for every input channel, f-major: out[f * C_feat + c].
template <typename T>
void feature_frame(const std::complex<double>* cur, const std::complex<double>* prev,
                   int bins, int channels, double power, bool with_delta, T* out);

template <typename T>
FeatureTensor<T> magnitude_features(const ComplexSpectrogram& spec, double power);

// Principal angle of S(t) * conj(S(t-1)) in (-pi, pi]; first frame is zero.
template <typename T>
FeatureTensor<T> delta_phase(const ComplexSpectrogram& spec);

template <typename T>
FeatureTensor<T> concat_features(const FeatureTensor<T>& a, const FeatureTensor<T>& b);

// Magnitude features, plus delta-phase channels when with_delta is set.
template <typename T>
nn::Tensor<T> model_features(const ComplexSpectrogram& spec, double power, bool with_delta);

}  // namespace maskstream::dsp
