#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "maskstream/audio.hpp"

namespace maskstream::dsp {

// Overlap-add positions whose accumulated window-square energy falls below
// this pass through unnormalized.
inline constexpr double kWsqFloor = 1e-10;

struct StftParams {
  int sample_rate = 16000;
  int frame_len = 400;  // 25 ms
  int hop = 160;        // 10 ms
  int fft_size = 512;

  int bins() const { return fft_size / 2 + 1; }
  double frames_per_second() const {
    return static_cast<double>(sample_rate) / static_cast<double>(hop);
  }
  void validate() const;
};

// values[t][f][c], row-major. original_length lets istft trim the synthesis
// zero-padding back off.
struct ComplexSpectrogram {
  StftParams params;
  int frames = 0;
  int bins = 0;
  int channels = 0;
  size_t original_length = 0;
  std::vector<std::complex<double>> values;

  std::complex<double>& at(int t, int f, int c) {
    return values[(static_cast<size_t>(t) * bins + f) * channels + c];
  }
  const std::complex<double>& at(int t, int f, int c) const {
    return values[(static_cast<size_t>(t) * bins + f) * channels + c];
  }
  const std::complex<double>* frame(int t) const {
    return values.data() + static_cast<size_t>(t) * bins * channels;
  }
  std::complex<double>* frame(int t) {
    return values.data() + static_cast<size_t>(t) * bins * channels;
  }
};

// Periodic Hann, w[n] = 0.5 - 0.5 cos(2 pi n / frame_len).
std::vector<double> hann_window(int frame_len);

// Number of analysis frames covering len samples (end zero-padded).
int frame_count(size_t len, const StftParams& params);

// In-place complex transform, double precision. Radix-2 when n is a power of
// two, direct O(n^2) evaluation otherwise.
void fft_inplace(std::complex<double>* data, int n, bool inverse);

// One analysis frame: window, zero-pad to fft_size, forward transform, keep
// bins 0..fft_size/2. x must hold frame_len samples.
void analyze_frame(const double* x, const std::vector<double>& window, int fft_size,
                   std::complex<double>* out_bins);

// Inverse of analyze_frame up to windowing: rebuild the full spectrum from the
// half-spectrum, inverse transform, multiply by the synthesis (= analysis)
// window. out holds frame_len samples.
void synthesize_frame(const std::complex<double>* bins, const std::vector<double>& window,
                      int fft_size, double* out);

ComplexSpectrogram stft(const AudioBuffer& audio, const StftParams& params = {});

// Weighted overlap-add with window-square normalization; positions whose
// accumulated window energy is below 1e-10 pass through unnormalized. Output
// is trimmed to original_length.
AudioBuffer istft(const ComplexSpectrogram& spec);

// |S|^power with the phase kept. power must be > 0 (power 1/p inverts).
ComplexSpectrogram power_compress(const ComplexSpectrogram& spec, double power);

ComplexSpectrogram channel_sum(const ComplexSpectrogram& spec);

}  // namespace maskstream::dsp
