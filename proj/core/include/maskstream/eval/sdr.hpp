#pragma once

#include <string>
#include <vector>

#include "maskstream/audio.hpp"

namespace maskstream::eval {

struct SdrResult {
  std::string utterance_id;
  double input_snr_db = 0.0;
  double sdr_db = 0.0;
  bool capped = false;  // set when the ratio was clamped to +-100 dB
  int filter_len = 0;
  int trial = -1;  // optional trial tag for across-trial statistics
};

// 10 log10(||signal||^2 / ||noise||^2). Lengths must match; zero noise is an
// error.
double snr_db(const std::vector<double>& signal, const std::vector<double>& noise);
double snr_db(const AudioBuffer& signal, const AudioBuffer& noise);

// Source-to-distortion ratio: the estimate is projected onto the reference
// delayed by 0..filter_len-1 samples (least-squares FIR over the zero-padded
// extended support, so the normal equations are exactly Toeplitz; solved by
// Cholesky with a 1e-10-relative diagonal regularizer). SDR is the energy
// ratio of the projection to the residual, clamped to +-100 dB.
double sdr_value(const std::vector<double>& estimate, const std::vector<double>& reference,
                 int filter_len, bool* capped = nullptr);

SdrResult bss_sdr(const AudioBuffer& estimate, const AudioBuffer& reference,
                  int filter_len = 512);

}  // namespace maskstream::eval
