#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "maskstream/data/corpus.hpp"
#include "maskstream/data/manifest.hpp"
#include "maskstream/eval/report.hpp"
#include "maskstream/eval/sdr.hpp"
#include "maskstream/model/network.hpp"

namespace maskstream::harness {

struct EvalOptions {
  std::string data_dir;     // non-empty: read WAVs, else synthesize on the fly
  int filter_len = 512;
  bool bypass_mask = false; // score the plain channel sum (the "noisy" baseline)
  int threads = 0;          // <=0: hardware concurrency; always capped by
                            // MASKSTREAM_THREADS
};

// Effective worker count: requested (or hardware) clamped to the
// MASKSTREAM_THREADS environment variable and to [1, jobs].
int eval_thread_count(int requested, size_t jobs);

// Enhance and score preloaded pairs. Results are indexed like the input and
// independent of the worker count. `net` may be null only with bypass_mask
// set.
std::vector<eval::SdrResult> evaluate_pairs(
    const model::Network<float>* net,
    const std::vector<data::UtterancePair>& pairs, const EvalOptions& opts = {});

// Load (or synthesize) every manifest entry, then evaluate_pairs.
std::vector<eval::SdrResult> evaluate_model(const model::Network<float>* net,
                                            const data::DatasetManifest& m,
                                            const EvalOptions& opts = {});

// All pairs of a manifest, in manifest order.
std::vector<data::UtterancePair> load_manifest_pairs(
    const data::DatasetManifest& m, const std::string& data_dir);

// Plain mean over utterances (the dev-selection score).
double mean_sdr(const std::vector<eval::SdrResult>& results);

// Per-utterance rows, then a blank-separated summary block: a second header
// with one column per input SNR plus `avg`, and one row of bucket means with
// the overall mean of means, mirroring how results tables are laid out.
void write_eval_csv(const std::string& path,
                    const std::vector<eval::SdrResult>& results);
void write_eval_csv(std::ostream& out, const std::vector<eval::SdrResult>& results);

}  // namespace maskstream::harness
