#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace maskstream {

struct AudioBuffer {
  // samples[channel][n], nominally in [-1, 1]
  std::vector<std::vector<double>> samples;
  int sample_rate = 16000;

  int channels() const { return static_cast<int>(samples.size()); }
  size_t length() const { return samples.empty() ? 0 : samples[0].size(); }
  void check_rectangular() const;
};

enum class WavEncoding { Pcm16, Float32 };

// RIFF/WAVE reader for 16-bit PCM and 32-bit IEEE float, 1 or 2 channels.
// Sample rates other than 16 kHz are accepted with a warning on stderr; no
// resampling is performed.
AudioBuffer read_wav(const std::string& path);

void write_wav(const std::string& path, const AudioBuffer& audio,
               WavEncoding encoding = WavEncoding::Float32);

}  // namespace maskstream
