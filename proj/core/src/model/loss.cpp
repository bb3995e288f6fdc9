#include "maskstream/model/loss.hpp"

#include <cmath>
#include <stdexcept>

namespace maskstream::model {

namespace {

// Magnitudes below this take the zero subgradient; the m^(p-2) factors in the
// exact gradient blow up as m -> 0 for p < 1.
constexpr double kMagFloor = 1e-30;

void check_pair(const dsp::ComplexSpectrogram& e, const dsp::ComplexSpectrogram& c,
                double lambda, double power) {
  if (e.channels != 1 || c.channels != 1) {
    throw std::invalid_argument("loss: expects single-channel spectrograms");
  }
  if (e.frames != c.frames || e.bins != c.bins) {
    throw std::invalid_argument("loss: mismatched spectrogram dimensions");
  }
  if (lambda < 0.0 || lambda > 1.0) throw std::invalid_argument("loss: lambda must be in [0, 1]");
  if (power <= 0.0 || power > 1.0) throw std::invalid_argument("loss: power must be in (0, 1]");
}

}  // namespace

double mask_loss(const dsp::ComplexSpectrogram& enhanced,
                 const dsp::ComplexSpectrogram& clean, double lambda, double power) {
  return mask_loss_grad(enhanced, clean, lambda, power, nullptr);
}

double mask_loss_grad(const dsp::ComplexSpectrogram& enhanced,
                      const dsp::ComplexSpectrogram& clean, double lambda, double power,
                      std::vector<std::complex<double>>* grad) {
  check_pair(enhanced, clean, lambda, power);
  if (grad != nullptr) grad->assign(enhanced.values.size(), {0.0, 0.0});

  double loss = 0.0;
  const double p = power;
  for (size_t i = 0; i < enhanced.values.size(); ++i) {
    const std::complex<double> e = enhanced.values[i];
    const std::complex<double> c = clean.values[i];
    const double a = e.real(), b = e.imag();
    const double m = std::abs(e);
    const double mc = std::abs(c);
    const double mp = m > 0.0 ? std::pow(m, p) : 0.0;
    const double mcp = mc > 0.0 ? std::pow(mc, p) : 0.0;

    const double dmag = mcp - mp;
    loss += dmag * dmag;

    // Compressed complex values: X^p = |X|^(p-1) * X.
    const std::complex<double> ep = m > 0.0 ? e * std::pow(m, p - 1.0)
                                            : std::complex<double>(0.0, 0.0);
    const std::complex<double> cp = mc > 0.0 ? c * std::pow(mc, p - 1.0)
                                             : std::complex<double>(0.0, 0.0);
    const std::complex<double> d = ep - cp;
    loss += lambda * std::norm(d);

    if (grad == nullptr) continue;
    if (m < kMagFloor) continue;  // zero subgradient at the singularity

    // d(magnitude term): -2 p (|C|^p - |E|^p) m^(p-2) * (a, b)
    const double mp2 = std::pow(m, p - 2.0);
    double ga = -2.0 * p * dmag * mp2 * a;
    double gb = -2.0 * p * dmag * mp2 * b;

    // d(complex term): E^p = u*E with u = m^(p-1), du/da = (p-1) m^(p-3) a.
    const double u = std::pow(m, p - 1.0);
    const double w = (p - 1.0) * std::pow(m, p - 3.0);
    const double dre_da = u + w * a * a;
    const double dim_da = w * a * b;
    const double dre_db = w * a * b;
    const double dim_db = u + w * b * b;
    ga += 2.0 * lambda * (d.real() * dre_da + d.imag() * dim_da);
    gb += 2.0 * lambda * (d.real() * dre_db + d.imag() * dim_db);

    (*grad)[i] = {ga, gb};
  }
  return loss;
}

template <typename T>
dsp::ComplexSpectrogram apply_mask(const nn::Tensor<T>& mask,
                                   const dsp::ComplexSpectrogram& noisy) {
  if (mask.rank() != 2 || mask.dim(0) != noisy.frames || mask.dim(1) != noisy.bins) {
    throw std::invalid_argument("apply_mask: mask shape does not match spectrogram");
  }
  dsp::ComplexSpectrogram out = dsp::channel_sum(noisy);
  for (int t = 0; t < out.frames; ++t) {
    for (int f = 0; f < out.bins; ++f) {
      out.at(t, f, 0) *= static_cast<double>(mask.at(t, f));
    }
  }
  return out;
}

template <typename T>
nn::Tensor<T> mask_grad(const std::vector<std::complex<double>>& grad_enhanced,
                        const dsp::ComplexSpectrogram& noisy_sum) {
  if (noisy_sum.channels != 1 ||
      grad_enhanced.size() != noisy_sum.values.size()) {
    throw std::invalid_argument("mask_grad: mismatched inputs");
  }
  nn::Tensor<T> out({noisy_sum.frames, noisy_sum.bins});
  for (size_t i = 0; i < grad_enhanced.size(); ++i) {
    const std::complex<double>& g = grad_enhanced[i];
    const std::complex<double>& z = noisy_sum.values[i];
    out.v[i] = static_cast<T>(g.real() * z.real() + g.imag() * z.imag());
  }
  return out;
}

template dsp::ComplexSpectrogram apply_mask<float>(const nn::Tensor<float>&,
                                                   const dsp::ComplexSpectrogram&);
template dsp::ComplexSpectrogram apply_mask<double>(const nn::Tensor<double>&,
                                                    const dsp::ComplexSpectrogram&);
template nn::Tensor<float> mask_grad<float>(const std::vector<std::complex<double>>&,
                                            const dsp::ComplexSpectrogram&);
template nn::Tensor<double> mask_grad<double>(const std::vector<std::complex<double>>&,
                                              const dsp::ComplexSpectrogram&);

}  // namespace maskstream::model
