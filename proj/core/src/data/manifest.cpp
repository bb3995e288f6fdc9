#include "maskstream/data/manifest.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "maskstream/eval/report.hpp"
#include "maskstream/rng.hpp"

namespace maskstream::data {

namespace {

uint64_t fnv1a(const std::string& s) {
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

bool valid_split(const std::string& s) {
  return s == "train" || s == "dev" || s == "eval";
}

[[noreturn]] void bad_line(const std::string& path, int line,
                           const std::string& why) {
  throw std::runtime_error("manifest " + path + ":" + std::to_string(line) +
                           ": " + why);
}

}  // namespace

int variant_for_split(const std::string& split) {
  if (split == "train") return 0;
  if (split == "dev" || split == "eval") return 1;
  throw std::runtime_error("unknown split: " + split);
}

void validate_manifest(const DatasetManifest& m) {
  if (!valid_split(m.split)) {
    throw std::runtime_error("manifest: unknown split \"" + m.split + "\"");
  }
  if (m.generator_version != kGeneratorVersion) {
    throw std::runtime_error(
        "manifest: written by generator version " +
        std::to_string(m.generator_version) + ", this build is version " +
        std::to_string(kGeneratorVersion));
  }
  if (m.entries.empty()) {
    throw std::runtime_error("manifest: no entries");
  }
  std::unordered_set<std::string> seen;
  for (const MixtureSpec& e : m.entries) {
    if (e.id.empty()) throw std::runtime_error("manifest: empty utterance id");
    for (char c : e.id) {
      if (c == ',' || c == '/' || c == '\\' || c == ' ' || c == '\t') {
        throw std::runtime_error("manifest: id \"" + e.id +
                                 "\" contains a separator character");
      }
    }
    if (!seen.insert(e.id).second) {
      throw std::runtime_error("manifest: duplicate id \"" + e.id + "\"");
    }
    if (!(e.duration_s > 0.0)) {
      throw std::runtime_error("manifest: non-positive duration for \"" + e.id + "\"");
    }
    if (eval::snr_bucket_index(e.snr_db) < 0) {
      throw std::runtime_error("manifest: input SNR " + std::to_string(e.snr_db) +
                               " dB for \"" + e.id +
                               "\" is not on the evaluation grid");
    }
  }
}

DatasetManifest read_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open manifest: " + path);
  DatasetManifest m;
  m.generator_version = -1;  // must appear in the header
  bool have_split = false;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::string body = line.substr(1);
      size_t eq = body.find('=');
      if (eq == std::string::npos) continue;  // plain comment
      size_t ks = body.find_first_not_of(' ');
      std::string key = body.substr(ks, eq - ks);
      std::string val = body.substr(eq + 1);
      if (key == "split") {
        m.split = val;
        have_split = true;
      } else if (key == "generator_version") {
        m.generator_version = std::stoi(val);
      } else if (key == "global_seed") {
        m.global_seed = std::stoull(val);
      }
      // Unknown header keys are ignored so the format can grow.
      continue;
    }
    std::stringstream ss(line);
    std::string f[5];
    for (int i = 0; i < 5; ++i) {
      if (!std::getline(ss, f[i], ',')) {
        bad_line(path, lineno, "expected 5 comma-separated fields");
      }
    }
    std::string extra;
    if (std::getline(ss, extra, ',')) {
      bad_line(path, lineno, "expected 5 comma-separated fields");
    }
    MixtureSpec e;
    e.id = f[0];
    try {
      e.duration_s = std::stod(f[1]);
      e.target_seed = std::stoull(f[2]);
      e.noise_seed = std::stoull(f[3]);
      e.snr_db = std::stod(f[4]);
    } catch (const std::exception&) {
      bad_line(path, lineno, "malformed numeric field");
    }
    m.entries.push_back(std::move(e));
  }
  if (!have_split) throw std::runtime_error("manifest " + path + ": missing split header");
  if (m.generator_version < 0) {
    throw std::runtime_error("manifest " + path + ": missing generator_version header");
  }
  validate_manifest(m);
  return m;
}

void write_manifest(const std::string& path, const DatasetManifest& m) {
  validate_manifest(m);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write manifest: " + path);
  out << "# split=" << m.split << "\n";
  out << "# generator_version=" << m.generator_version << "\n";
  out << "# global_seed=" << m.global_seed << "\n";
  out << "# columns: id,duration_s,target_seed,noise_seed,snr_db\n";
  char buf[64];
  for (const MixtureSpec& e : m.entries) {
    std::snprintf(buf, sizeof(buf), "%.9g", e.duration_s);
    out << e.id << ',' << buf << ',' << e.target_seed << ',' << e.noise_seed;
    std::snprintf(buf, sizeof(buf), "%.9g", e.snr_db);
    out << ',' << buf << "\n";
  }
  if (!out) throw std::runtime_error("failed writing manifest: " + path);
}

DatasetManifest make_desk_manifest(const std::string& split, int per_bucket,
                                   double duration_s, uint64_t global_seed) {
  if (!valid_split(split)) throw std::runtime_error("unknown split: " + split);
  if (per_bucket < 1) throw std::runtime_error("per_bucket must be >= 1");
  DatasetManifest m;
  m.split = split;
  m.global_seed = global_seed;
  const uint64_t base = Rng::mix(global_seed, fnv1a(split));
  char id[64];
  uint64_t k = 0;
  for (int i = 0; i < per_bucket; ++i) {
    for (double snr : eval::kSnrBuckets) {
      MixtureSpec e;
      std::snprintf(id, sizeof(id), "%s_%03llu", split.c_str(),
                    static_cast<unsigned long long>(k));
      e.id = id;
      e.duration_s = duration_s;
      e.target_seed = Rng::mix(base, 2 * k);
      e.noise_seed = Rng::mix(base, 2 * k + 1);
      e.snr_db = snr;
      m.entries.push_back(std::move(e));
      ++k;
    }
  }
  validate_manifest(m);
  return m;
}

}  // namespace maskstream::data
