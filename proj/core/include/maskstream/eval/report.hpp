#pragma once

#include <array>
#include <vector>

#include "maskstream/eval/sdr.hpp"

namespace maskstream::eval {

inline constexpr std::array<double, 6> kSnrBuckets{-6.0, -3.0, 0.0, 3.0, 6.0, 9.0};

// Index into kSnrBuckets (tolerance 1e-6), or -1.
int snr_bucket_index(double snr_db);

struct SdrReport {
  std::array<double, 6> bucket_mean{};  // NaN where the bucket is empty
  std::array<int, 6> bucket_count{};
  double overall = 0.0;  // mean of the non-empty bucket means; NaN if none
  int trial_count = 0;
  double trial_std = 0.0;  // std of per-trial overall means; NaN without trials
};

// Buckets results by input_snr_db; a result outside the six buckets is an
// error. Trial statistics cover results carrying a trial tag >= 0.
SdrReport aggregate(const std::vector<SdrResult>& results);

}  // namespace maskstream::eval
