#pragma once

#include <complex>
#include <vector>

#include "maskstream/dsp/stft.hpp"
#include "maskstream/nn/tensor.hpp"

namespace maskstream::model {

// Compressed-spectrum training loss between a single-channel enhanced
// spectrogram E and the clean reference C, summed over all t-f bins:
//   sum (|C|^p - |E|^p)^2 + lambda * sum |C^p - E^p|^2
// where X^p keeps the phase of X. The gradient takes the zero subgradient at
// zero magnitudes, where the compression is not differentiable.
double mask_loss(const dsp::ComplexSpectrogram& enhanced,
                 const dsp::ComplexSpectrogram& clean, double lambda, double power);

// Loss plus d loss / d enhanced as a complex grid g = dL/dRe(E) + i dL/dIm(E).
double mask_loss_grad(const dsp::ComplexSpectrogram& enhanced,
                      const dsp::ComplexSpectrogram& clean, double lambda, double power,
                      std::vector<std::complex<double>>* grad);

// enhanced = mask .* (sum over channels of noisy). mask is [frames][bins].
template <typename T>
dsp::ComplexSpectrogram apply_mask(const nn::Tensor<T>& mask,
                                   const dsp::ComplexSpectrogram& noisy);

// Chain rule through apply_mask: dL/dmask(t,f) = Re(g(t,f) * conj(Z(t,f)))
// where Z is the channel sum the mask multiplied.
template <typename T>
nn::Tensor<T> mask_grad(const std::vector<std::complex<double>>& grad_enhanced,
                        const dsp::ComplexSpectrogram& noisy_sum);

}  // namespace maskstream::model
