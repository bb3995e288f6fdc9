#include "maskstream/eval/sdr.hpp"

#include <cmath>
#include <stdexcept>

namespace maskstream::eval {

namespace {
constexpr double kSdrCapDb = 100.0;

double energy(const std::vector<double>& x) {
  double e = 0.0;
  for (double v : x) e += v * v;
  return e;
}

const std::vector<double>& mono(const AudioBuffer& a, const char* what) {
  if (a.channels() != 1) {
    throw std::invalid_argument(std::string(what) + " must be single-channel");
  }
  return a.samples[0];
}
}  // namespace

double snr_db(const std::vector<double>& signal, const std::vector<double>& noise) {
  if (signal.size() != noise.size()) {
    throw std::invalid_argument("snr_db: signal and noise lengths differ");
  }
  double en = energy(noise);
  if (en <= 0.0) throw std::invalid_argument("snr_db: zero noise");
  return 10.0 * std::log10(energy(signal) / en);
}

double snr_db(const AudioBuffer& signal, const AudioBuffer& noise) {
  return snr_db(mono(signal, "snr_db: signal"), mono(noise, "snr_db: noise"));
}

double sdr_value(const std::vector<double>& estimate, const std::vector<double>& reference,
                 int filter_len, bool* capped) {
  if (capped != nullptr) *capped = false;
  if (filter_len < 1) throw std::invalid_argument("bss_sdr: filter_len must be at least 1");
  const size_t n = reference.size();
  if (estimate.size() != n) {
    throw std::invalid_argument("bss_sdr: estimate and reference lengths differ");
  }
  if (n < static_cast<size_t>(filter_len)) {
    throw std::invalid_argument("bss_sdr: signals shorter than the projection filter");
  }
  const int L = filter_len;

  // Over the extended support every delay pair overlaps fully, so
  // G[i][j] = rho(|i-j|) and c[i] = sum_m ref[m] est[m+i].
  std::vector<double> rho(L, 0.0), c(L, 0.0);
  for (int tau = 0; tau < L; ++tau) {
    double a = 0.0, b = 0.0;
    const size_t m_end = n - static_cast<size_t>(tau);
    for (size_t m = 0; m < m_end; ++m) {
      a += reference[m] * reference[m + tau];
      b += reference[m] * estimate[m + tau];
    }
    rho[tau] = a;
    c[tau] = b;
  }
  if (rho[0] <= 0.0) throw std::invalid_argument("bss_sdr: zero reference");

  // Cholesky of the regularized Toeplitz Gram matrix, in-place lower triangle.
  const double reg = 1e-10 * rho[0];
  std::vector<double> g(static_cast<size_t>(L) * L);
  for (int i = 0; i < L; ++i) {
    for (int j = 0; j <= i; ++j) g[static_cast<size_t>(i) * L + j] = rho[i - j];
    g[static_cast<size_t>(i) * L + i] += reg;
  }
  for (int i = 0; i < L; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = g[static_cast<size_t>(i) * L + j];
      for (int k = 0; k < j; ++k) {
        s -= g[static_cast<size_t>(i) * L + k] * g[static_cast<size_t>(j) * L + k];
      }
      if (i == j) {
        if (s <= 0.0) throw std::runtime_error("bss_sdr: normal equations not positive definite");
        g[static_cast<size_t>(i) * L + i] = std::sqrt(s);
      } else {
        g[static_cast<size_t>(i) * L + j] = s / g[static_cast<size_t>(j) * L + j];
      }
    }
  }
  std::vector<double> h(L);
  for (int i = 0; i < L; ++i) {
    double s = c[i];
    for (int k = 0; k < i; ++k) s -= g[static_cast<size_t>(i) * L + k] * h[k];
    h[i] = s / g[static_cast<size_t>(i) * L + i];
  }
  for (int i = L - 1; i >= 0; --i) {
    double s = h[i];
    for (int k = i + 1; k < L; ++k) s -= g[static_cast<size_t>(k) * L + i] * h[k];
    h[i] = s / g[static_cast<size_t>(i) * L + i];
  }

  // Projection and residual energies from the unregularized Gram matrix.
  double st = 0.0;
  for (int i = 0; i < L; ++i) {
    double s = 0.0;
    for (int j = 0; j < L; ++j) s += h[j] * rho[std::abs(i - j)];
    st += h[i] * s;
  }
  double hc = 0.0;
  for (int i = 0; i < L; ++i) hc += h[i] * c[i];
  double dist = energy(estimate) - 2.0 * hc + st;

  if (st <= 0.0) {
    if (capped != nullptr) *capped = true;
    return -kSdrCapDb;
  }
  if (dist <= st * 1e-10) {
    if (capped != nullptr) *capped = true;
    return kSdrCapDb;
  }
  double sdr = 10.0 * std::log10(st / dist);
  if (sdr > kSdrCapDb) {
    sdr = kSdrCapDb;
    if (capped != nullptr) *capped = true;
  } else if (sdr < -kSdrCapDb) {
    sdr = -kSdrCapDb;
    if (capped != nullptr) *capped = true;
  }
  return sdr;
}

SdrResult bss_sdr(const AudioBuffer& estimate, const AudioBuffer& reference, int filter_len) {
  SdrResult r;
  r.filter_len = filter_len;
  r.sdr_db = sdr_value(mono(estimate, "bss_sdr: estimate"), mono(reference, "bss_sdr: reference"),
                       filter_len, &r.capped);
  return r;
}

}  // namespace maskstream::eval
