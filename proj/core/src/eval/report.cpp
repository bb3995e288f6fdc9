#include "maskstream/eval/report.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace maskstream::eval {

int snr_bucket_index(double snr_db) {
  for (size_t i = 0; i < kSnrBuckets.size(); ++i) {
    if (std::abs(snr_db - kSnrBuckets[i]) < 1e-6) return static_cast<int>(i);
  }
  return -1;
}

SdrReport aggregate(const std::vector<SdrResult>& results) {
  constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
  SdrReport rep;
  std::array<double, 6> sums{};
  for (const auto& r : results) {
    int b = snr_bucket_index(r.input_snr_db);
    if (b < 0) {
      throw std::invalid_argument("aggregate: input SNR is not one of the six buckets");
    }
    sums[b] += r.sdr_db;
    rep.bucket_count[b] += 1;
  }
  double total = 0.0;
  int present = 0;
  for (size_t i = 0; i < sums.size(); ++i) {
    if (rep.bucket_count[i] > 0) {
      rep.bucket_mean[i] = sums[i] / rep.bucket_count[i];
      total += rep.bucket_mean[i];
      ++present;
    } else {
      rep.bucket_mean[i] = kNan;
    }
  }
  rep.overall = present > 0 ? total / present : kNan;

  // Per-trial overall means, then their sample std.
  std::map<int, std::array<double, 6>> trial_sums;
  std::map<int, std::array<int, 6>> trial_counts;
  for (const auto& r : results) {
    if (r.trial < 0) continue;
    int b = snr_bucket_index(r.input_snr_db);
    trial_sums[r.trial][b] += r.sdr_db;
    trial_counts[r.trial][b] += 1;
  }
  std::vector<double> trial_overall;
  for (const auto& [trial, s] : trial_sums) {
    const auto& cnt = trial_counts[trial];
    double t = 0.0;
    int p = 0;
    for (size_t i = 0; i < s.size(); ++i) {
      if (cnt[i] > 0) {
        t += s[i] / cnt[i];
        ++p;
      }
    }
    if (p > 0) trial_overall.push_back(t / p);
  }
  rep.trial_count = static_cast<int>(trial_overall.size());
  if (rep.trial_count >= 2) {
    double mean = 0.0;
    for (double v : trial_overall) mean += v;
    mean /= rep.trial_count;
    double ss = 0.0;
    for (double v : trial_overall) ss += (v - mean) * (v - mean);
    rep.trial_std = std::sqrt(ss / (rep.trial_count - 1));
  } else if (rep.trial_count == 1) {
    rep.trial_std = 0.0;
  } else {
    rep.trial_std = kNan;
  }
  return rep;
}

}  // namespace maskstream::eval
