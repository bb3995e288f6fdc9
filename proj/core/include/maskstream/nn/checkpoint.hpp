#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "maskstream/nn/tensor.hpp"

namespace maskstream::nn {

// Checkpoint layout: 8-byte magic "MSKSTRM1", a little-endian uint64 manifest
// byte length, the UTF-8 manifest, then raw little-endian float32 tensor data.
// The manifest holds a [config] section (flat key = value lines) and a
// [tensors] section with one "name dim0xdim1x... byte_offset" line per tensor;
// offsets are relative to the start of the data section.
inline constexpr char kCheckpointMagic[8] = {'M', 'S', 'K', 'S', 'T', 'R', 'M', '1'};

struct CheckpointEntry {
  std::string name;
  std::vector<int> shape;
  uint64_t byte_offset = 0;

  size_t numel() const {
    size_t n = 1;
    for (int d : shape) n *= static_cast<size_t>(d);
    return n;
  }
};

struct Checkpoint {
  std::string config_text;
  std::vector<CheckpointEntry> entries;
  std::vector<float> data;

  const CheckpointEntry* find(const std::string& name) const;
  const float* tensor_data(const CheckpointEntry& e) const {
    return data.data() + e.byte_offset / sizeof(float);
  }
  long long total_params() const;
};

void save_checkpoint(const std::string& path, const std::string& config_text,
                     const std::vector<std::pair<std::string, const TensorF*>>& tensors);

// Rejects unknown magic and malformed manifests.
Checkpoint load_checkpoint(const std::string& path);

}  // namespace maskstream::nn
