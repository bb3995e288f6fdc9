#pragma once

// Shared fixtures for the test binaries: temp directories, random audio,
// and paths into the checked-in configs/ directory.

#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "maskstream/audio.hpp"
#include "maskstream/rng.hpp"

namespace testutil {

// Directory of checked-in config/manifest files, exported by ctest.
inline std::string data_path(const std::string& name) {
  const char* base = std::getenv("MASKSTREAM_TEST_DATA");
  if (base == nullptr || *base == '\0') base = "configs";
  return std::string(base) + "/" + name;
}

// Unique scratch directory, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    namespace fs = std::filesystem;
    path_ = (fs::temp_directory_path() /
             ("maskstream_" + tag + "_" + std::to_string(++counter) + "_" +
              std::to_string(static_cast<unsigned>(::getpid()))))
                .string();
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::string& path() const { return path_; }
  std::string file(const std::string& name) const { return path_ + "/" + name; }

 private:
  std::string path_;
};

// Gaussian noise buffer; deterministic in the seed.
inline maskstream::AudioBuffer noise_audio(uint64_t seed, double seconds, int channels,
                                           int sample_rate = 16000, double rms = 0.1) {
  maskstream::Rng rng(seed);
  maskstream::AudioBuffer out;
  out.sample_rate = sample_rate;
  size_t n = static_cast<size_t>(seconds * sample_rate);
  out.samples.assign(channels, std::vector<double>(n));
  for (int c = 0; c < channels; ++c) {
    for (size_t i = 0; i < n; ++i) out.samples[c][i] = rms * rng.normal();
  }
  return out;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  size_t n = a.size() < b.size() ? a.size() : b.size();
  for (size_t i = 0; i < n; ++i) {
    double d = std::abs(a[i] - b[i]);
    if (d > m) m = d;
  }
  return m;
}

inline std::string read_text_file(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (f == nullptr) return {};
  std::string out;
  char buf[4096];
  size_t got;
  while ((got = std::fread(buf, 1, sizeof(buf), f)) > 0) out.append(buf, got);
  std::fclose(f);
  return out;
}

}  // namespace testutil
