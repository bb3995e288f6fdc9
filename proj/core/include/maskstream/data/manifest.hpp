#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "maskstream/data/synth.hpp"

namespace maskstream::data {

struct MixtureSpec {
  std::string id;
  double duration_s = 0.0;
  uint64_t target_seed = 0;
  uint64_t noise_seed = 0;
  double snr_db = 0.0;
};

// Text manifest: `# key=value` header lines (split, generator_version,
// global_seed) followed by one `id,duration_s,target_seed,noise_seed,snr_db`
// row per utterance. A manifest plus the generator version pins a corpus
// exactly; no audio needs to ship with it.
struct DatasetManifest {
  std::string split;  // "train", "dev" or "eval"
  int generator_version = kGeneratorVersion;
  uint64_t global_seed = 0;
  std::vector<MixtureSpec> entries;
};

// 0 for the training split, 1 for dev/eval (shifted noise-parameter ranges).
int variant_for_split(const std::string& split);

// Throws std::runtime_error naming the problem: unknown split, duplicate ids,
// non-positive durations, input SNRs off the evaluation grid, or a manifest
// written by a different generator version.
void validate_manifest(const DatasetManifest& m);

DatasetManifest read_manifest(const std::string& path);
void write_manifest(const std::string& path, const DatasetManifest& m);

// Small deterministic manifest: `per_bucket` utterances at each of the six
// evaluation SNRs, seeds split-disjoint by hashing (global_seed, split, index).
DatasetManifest make_desk_manifest(const std::string& split, int per_bucket,
                                   double duration_s, uint64_t global_seed);

}  // namespace maskstream::data
