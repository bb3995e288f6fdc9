#include "maskstream/dsp/features.hpp"

#include <cmath>
#include <stdexcept>

namespace maskstream::dsp {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
}

template <typename T>
void feature_frame(const std::complex<double>* cur, const std::complex<double>* prev,
                   int bins, int channels, double power, bool with_delta, T* out) {
  int cf = channels * (with_delta ? 2 : 1);
  for (int f = 0; f < bins; ++f) {
    for (int c = 0; c < channels; ++c) {
      double m = std::abs(cur[f * channels + c]);
      out[f * cf + c] = static_cast<T>(m > 0.0 ? std::pow(m, power) : 0.0);
    }
    if (with_delta) {
      for (int c = 0; c < channels; ++c) {
        double d = 0.0;
        if (prev != nullptr) {
          std::complex<double> r = cur[f * channels + c] * std::conj(prev[f * channels + c]);
          d = std::arg(r);
          if (d == -kPi) d = kPi;
        }
        out[f * cf + channels + c] = static_cast<T>(d);
      }
    }
  }
}

template <typename T>
FeatureTensor<T> magnitude_features(const ComplexSpectrogram& spec, double power) {
  if (power <= 0.0) throw std::invalid_argument("magnitude_features: power must be positive");
  FeatureTensor<T> out;
  out.kind = FeatureKind::Magnitude;
  out.values.resize({spec.frames, spec.bins, spec.channels});
  for (int t = 0; t < spec.frames; ++t) {
    feature_frame<T>(spec.frame(t), nullptr, spec.bins, spec.channels, power, false,
                     out.values.row(t));
  }
  return out;
}

template <typename T>
FeatureTensor<T> delta_phase(const ComplexSpectrogram& spec) {
  FeatureTensor<T> out;
  out.kind = FeatureKind::DeltaPhase;
  out.values.resize({spec.frames, spec.bins, spec.channels});
  for (int t = 0; t < spec.frames; ++t) {
    const std::complex<double>* prev = t > 0 ? spec.frame(t - 1) : nullptr;
    for (int f = 0; f < spec.bins; ++f) {
      for (int c = 0; c < spec.channels; ++c) {
        double d = 0.0;
        if (prev != nullptr) {
          std::complex<double> r = spec.at(t, f, c) * std::conj(prev[f * spec.channels + c]);
          d = std::arg(r);
          if (d == -kPi) d = kPi;
        }
        out.values.at(t, f, c) = static_cast<T>(d);
      }
    }
  }
  return out;
}

template <typename T>
FeatureTensor<T> concat_features(const FeatureTensor<T>& a, const FeatureTensor<T>& b) {
  if (a.values.rank() != 3 || b.values.rank() != 3 || a.values.dim(0) != b.values.dim(0) ||
      a.values.dim(1) != b.values.dim(1)) {
    throw std::invalid_argument("concat_features: mismatched frame/bin dimensions");
  }
  FeatureTensor<T> out;
  out.kind = FeatureKind::Concat;
  int t_n = a.values.dim(0), f_n = a.values.dim(1);
  int ca = a.values.dim(2), cb = b.values.dim(2);
  out.values.resize({t_n, f_n, ca + cb});
  for (int t = 0; t < t_n; ++t) {
    for (int f = 0; f < f_n; ++f) {
      for (int c = 0; c < ca; ++c) out.values.at(t, f, c) = a.values.at(t, f, c);
      for (int c = 0; c < cb; ++c) out.values.at(t, f, ca + c) = b.values.at(t, f, c);
    }
  }
  return out;
}

template <typename T>
nn::Tensor<T> model_features(const ComplexSpectrogram& spec, double power, bool with_delta) {
  if (power <= 0.0) throw std::invalid_argument("model_features: power must be positive");
  nn::Tensor<T> out({spec.frames, spec.bins, spec.channels * (with_delta ? 2 : 1)});
  for (int t = 0; t < spec.frames; ++t) {
    const std::complex<double>* prev = t > 0 ? spec.frame(t - 1) : nullptr;
    feature_frame<T>(spec.frame(t), prev, spec.bins, spec.channels, power, with_delta,
                     out.row(t));
  }
  return out;
}

template void feature_frame<float>(const std::complex<double>*, const std::complex<double>*,
                                   int, int, double, bool, float*);
template void feature_frame<double>(const std::complex<double>*, const std::complex<double>*,
                                    int, int, double, bool, double*);
template FeatureTensor<float> magnitude_features<float>(const ComplexSpectrogram&, double);
template FeatureTensor<double> magnitude_features<double>(const ComplexSpectrogram&, double);
template FeatureTensor<float> delta_phase<float>(const ComplexSpectrogram&);
template FeatureTensor<double> delta_phase<double>(const ComplexSpectrogram&);
template FeatureTensor<float> concat_features<float>(const FeatureTensor<float>&,
                                                     const FeatureTensor<float>&);
template FeatureTensor<double> concat_features<double>(const FeatureTensor<double>&,
                                                       const FeatureTensor<double>&);
template nn::Tensor<float> model_features<float>(const ComplexSpectrogram&, double, bool);
template nn::Tensor<double> model_features<double>(const ComplexSpectrogram&, double, bool);

}  // namespace maskstream::dsp
