#include "maskstream/harness/evaluate.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "maskstream/model/enhance.hpp"

namespace maskstream::harness {

int eval_thread_count(int requested, size_t jobs) {
  int n = requested > 0 ? requested
                        : static_cast<int>(std::thread::hardware_concurrency());
  if (n < 1) n = 1;
  if (const char* cap = std::getenv("MASKSTREAM_THREADS")) {
    const int c = std::atoi(cap);
    if (c > 0 && c < n) n = c;
  }
  if (jobs > 0 && static_cast<size_t>(n) > jobs) n = static_cast<int>(jobs);
  return n;
}

std::vector<eval::SdrResult> evaluate_pairs(
    const model::Network<float>* net,
    const std::vector<data::UtterancePair>& pairs, const EvalOptions& opts) {
  if (net == nullptr && !opts.bypass_mask) {
    throw std::invalid_argument("evaluate: no network and no bypass");
  }
  std::vector<eval::SdrResult> results(pairs.size());

  std::atomic<size_t> next{0};
  std::mutex err_mutex;
  std::exception_ptr first_error;
  auto worker = [&]() {
    for (;;) {
      const size_t i = next.fetch_add(1);
      if (i >= pairs.size()) return;
      try {
        const data::UtterancePair& pair = pairs[i];
        AudioBuffer est = model::enhance_offline(net, pair.noisy,
                                                 dsp::StftParams(), opts.bypass_mask);
        eval::SdrResult r = eval::bss_sdr(est, pair.clean, opts.filter_len);
        r.utterance_id = pair.id;
        r.input_snr_db = pair.input_snr_db;
        results[i] = r;
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
        next.store(pairs.size());  // stop handing out work
        return;
      }
    }
  };

  const int n_threads = eval_thread_count(opts.threads, pairs.size());
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(n_threads));
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);
  return results;
}

std::vector<data::UtterancePair> load_manifest_pairs(
    const data::DatasetManifest& m, const std::string& data_dir) {
  data::validate_manifest(m);
  const int variant = data::variant_for_split(m.split);
  std::vector<data::UtterancePair> pairs;
  pairs.reserve(m.entries.size());
  for (const data::MixtureSpec& spec : m.entries) {
    pairs.push_back(data::load_pair(spec, variant, data_dir));
  }
  return pairs;
}

std::vector<eval::SdrResult> evaluate_model(const model::Network<float>* net,
                                            const data::DatasetManifest& m,
                                            const EvalOptions& opts) {
  return evaluate_pairs(net, load_manifest_pairs(m, opts.data_dir), opts);
}

double mean_sdr(const std::vector<eval::SdrResult>& results) {
  if (results.empty()) return std::nan("");
  double s = 0.0;
  for (const auto& r : results) s += r.sdr_db;
  return s / static_cast<double>(results.size());
}

void write_eval_csv(const std::string& path,
                    const std::vector<eval::SdrResult>& results) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write csv: " + path);
  write_eval_csv(out, results);
  if (!out) throw std::runtime_error("failed writing csv: " + path);
}

void write_eval_csv(std::ostream& out, const std::vector<eval::SdrResult>& results) {
  char buf[64];
  out << "utterance_id,input_snr_db,sdr_db\n";
  for (const auto& r : results) {
    std::snprintf(buf, sizeof(buf), "%.4f,%.4f", r.input_snr_db, r.sdr_db);
    out << r.utterance_id << ',' << buf << "\n";
  }
  // Summary block: one column per input SNR, plus the mean of bucket means.
  const eval::SdrReport rep = eval::aggregate(results);
  out << "\n";
  for (size_t b = 0; b < eval::kSnrBuckets.size(); ++b) {
    std::snprintf(buf, sizeof(buf), "sdr_%gdb,", eval::kSnrBuckets[b]);
    out << buf;
  }
  out << "avg\n";
  for (size_t b = 0; b < eval::kSnrBuckets.size(); ++b) {
    std::snprintf(buf, sizeof(buf), "%.4f,", rep.bucket_mean[b]);
    out << buf;
  }
  std::snprintf(buf, sizeof(buf), "%.4f", rep.overall);
  out << buf << "\n";
}

}  // namespace maskstream::harness
