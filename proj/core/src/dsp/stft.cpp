#include "maskstream/dsp/stft.hpp"

#include <cmath>
#include <stdexcept>

namespace maskstream::dsp {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;

bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }
}  // namespace

void StftParams::validate() const {
  if (sample_rate <= 0) throw std::invalid_argument("stft: sample_rate must be positive");
  if (hop <= 0) throw std::invalid_argument("stft: hop must be positive");
  if (frame_len < 2) throw std::invalid_argument("stft: frame_len must be at least 2");
  if (hop > frame_len) throw std::invalid_argument("stft: hop must not exceed frame_len");
  if (fft_size < frame_len) throw std::invalid_argument("stft: fft_size must cover frame_len");
}

std::vector<double> hann_window(int frame_len) {
  if (frame_len < 2) throw std::invalid_argument("hann_window: frame_len must be at least 2");
  std::vector<double> w(frame_len);
  for (int n = 0; n < frame_len; ++n) {
    w[n] = 0.5 - 0.5 * std::cos(2.0 * kPi * n / frame_len);
  }
  return w;
}

int frame_count(size_t len, const StftParams& params) {
  if (len == 0) throw std::invalid_argument("frame_count: empty signal");
  size_t fl = static_cast<size_t>(params.frame_len);
  size_t over = len > fl ? len - fl : 0;
  size_t hop = static_cast<size_t>(params.hop);
  return static_cast<int>((over + hop - 1) / hop) + 1;
}

void fft_inplace(std::complex<double>* data, int n, bool inverse) {
  if (n <= 1) return;
  if (!is_pow2(n)) {
    // Direct transform fallback for odd sizes; exact, just slow.
    std::vector<std::complex<double>> out(n);
    double sign = inverse ? 1.0 : -1.0;
    for (int k = 0; k < n; ++k) {
      std::complex<double> acc(0.0, 0.0);
      for (int m = 0; m < n; ++m) {
        double ang = sign * 2.0 * kPi * k * m / n;
        acc += data[m] * std::complex<double>(std::cos(ang), std::sin(ang));
      }
      out[k] = acc;
    }
    for (int k = 0; k < n; ++k) data[k] = inverse ? out[k] / static_cast<double>(n) : out[k];
    return;
  }

  // bit reversal
  for (int i = 1, j = 0; i < n; ++i) {
    int bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(data[i], data[j]);
  }
  for (int len = 2; len <= n; len <<= 1) {
    double ang = 2.0 * kPi / len * (inverse ? 1.0 : -1.0);
    std::complex<double> wl(std::cos(ang), std::sin(ang));
    for (int i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (int j = 0; j < len / 2; ++j) {
        std::complex<double> u = data[i + j];
        std::complex<double> v = data[i + j + len / 2] * w;
        data[i + j] = u + v;
        data[i + j + len / 2] = u - v;
        w *= wl;
      }
    }
  }
  if (inverse) {
    double inv = 1.0 / n;
    for (int i = 0; i < n; ++i) data[i] *= inv;
  }
}

void analyze_frame(const double* x, const std::vector<double>& window, int fft_size,
                   std::complex<double>* out_bins) {
  int frame_len = static_cast<int>(window.size());
  std::vector<std::complex<double>> buf(fft_size, std::complex<double>(0.0, 0.0));
  for (int n = 0; n < frame_len; ++n) buf[n] = x[n] * window[n];
  fft_inplace(buf.data(), fft_size, false);
  int bins = fft_size / 2 + 1;
  for (int f = 0; f < bins; ++f) out_bins[f] = buf[f];
}

void synthesize_frame(const std::complex<double>* bins, const std::vector<double>& window,
                      int fft_size, double* out) {
  int frame_len = static_cast<int>(window.size());
  int nbins = fft_size / 2 + 1;
  std::vector<std::complex<double>> buf(fft_size);
  for (int f = 0; f < nbins; ++f) buf[f] = bins[f];
  for (int f = nbins; f < fft_size; ++f) buf[f] = std::conj(bins[fft_size - f]);
  fft_inplace(buf.data(), fft_size, true);
  for (int n = 0; n < frame_len; ++n) out[n] = buf[n].real() * window[n];
}

ComplexSpectrogram stft(const AudioBuffer& audio, const StftParams& params) {
  params.validate();
  audio.check_rectangular();
  if (audio.length() == 0) throw std::invalid_argument("stft: empty signal");
  if (audio.channels() < 1) throw std::invalid_argument("stft: no channels");

  ComplexSpectrogram spec;
  spec.params = params;
  spec.frames = frame_count(audio.length(), params);
  spec.bins = params.bins();
  spec.channels = audio.channels();
  spec.original_length = audio.length();
  spec.values.assign(static_cast<size_t>(spec.frames) * spec.bins * spec.channels,
                     std::complex<double>(0.0, 0.0));

  std::vector<double> window = hann_window(params.frame_len);
  std::vector<double> framebuf(params.frame_len);
  std::vector<std::complex<double>> binbuf(spec.bins);
  const size_t len = audio.length();

  for (int c = 0; c < spec.channels; ++c) {
    const std::vector<double>& x = audio.samples[c];
    for (int t = 0; t < spec.frames; ++t) {
      size_t start = static_cast<size_t>(t) * params.hop;
      for (int n = 0; n < params.frame_len; ++n) {
        size_t idx = start + n;
        framebuf[n] = idx < len ? x[idx] : 0.0;
      }
      analyze_frame(framebuf.data(), window, params.fft_size, binbuf.data());
      for (int f = 0; f < spec.bins; ++f) spec.at(t, f, c) = binbuf[f];
    }
  }
  return spec;
}

AudioBuffer istft(const ComplexSpectrogram& spec) {
  spec.params.validate();
  if (spec.frames <= 0 || spec.channels <= 0) {
    throw std::invalid_argument("istft: empty spectrogram");
  }
  const StftParams& p = spec.params;
  std::vector<double> window = hann_window(p.frame_len);
  size_t padded_len = static_cast<size_t>(spec.frames - 1) * p.hop + p.frame_len;
  size_t out_len = spec.original_length > 0 ? spec.original_length : padded_len;

  AudioBuffer out;
  out.sample_rate = p.sample_rate;
  out.samples.assign(spec.channels, {});

  std::vector<double> acc(padded_len), wsq(padded_len), frame(p.frame_len);
  std::vector<std::complex<double>> binbuf(spec.bins);
  for (int c = 0; c < spec.channels; ++c) {
    std::fill(acc.begin(), acc.end(), 0.0);
    std::fill(wsq.begin(), wsq.end(), 0.0);
    for (int t = 0; t < spec.frames; ++t) {
      for (int f = 0; f < spec.bins; ++f) binbuf[f] = spec.at(t, f, c);
      synthesize_frame(binbuf.data(), window, p.fft_size, frame.data());
      size_t start = static_cast<size_t>(t) * p.hop;
      for (int n = 0; n < p.frame_len; ++n) {
        acc[start + n] += frame[n];
        wsq[start + n] += window[n] * window[n];
      }
    }
    std::vector<double>& y = out.samples[c];
    y.resize(out_len);
    for (size_t i = 0; i < out_len; ++i) {
      y[i] = wsq[i] >= kWsqFloor ? acc[i] / wsq[i] : acc[i];
    }
  }
  return out;
}

ComplexSpectrogram power_compress(const ComplexSpectrogram& spec, double power) {
  if (power <= 0.0) throw std::invalid_argument("power_compress: power must be positive");
  ComplexSpectrogram out = spec;
  for (auto& v : out.values) {
    double m = std::abs(v);
    if (m > 0.0) {
      v *= std::pow(m, power - 1.0);
    } else {
      v = std::complex<double>(0.0, 0.0);
    }
  }
  return out;
}

ComplexSpectrogram channel_sum(const ComplexSpectrogram& spec) {
  ComplexSpectrogram out;
  out.params = spec.params;
  out.frames = spec.frames;
  out.bins = spec.bins;
  out.channels = 1;
  out.original_length = spec.original_length;
  out.values.assign(static_cast<size_t>(spec.frames) * spec.bins,
                    std::complex<double>(0.0, 0.0));
  for (int t = 0; t < spec.frames; ++t) {
    for (int f = 0; f < spec.bins; ++f) {
      std::complex<double> s(0.0, 0.0);
      for (int c = 0; c < spec.channels; ++c) s += spec.at(t, f, c);
      out.at(t, f, 0) = s;
    }
  }
  return out;
}

}  // namespace maskstream::dsp
