#include "maskstream/nn/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace maskstream::nn {

const CheckpointEntry* Checkpoint::find(const std::string& name) const {
  for (const auto& e : entries) {
    if (e.name == name) return &e;
  }
  return nullptr;
}

long long Checkpoint::total_params() const {
  long long n = 0;
  for (const auto& e : entries) n += static_cast<long long>(e.numel());
  return n;
}

namespace {

std::string shape_to_string(const std::vector<int>& shape) {
  std::string out;
  for (size_t i = 0; i < shape.size(); ++i) {
    if (i > 0) out += 'x';
    out += std::to_string(shape[i]);
  }
  return out;
}

std::vector<int> shape_from_string(const std::string& s) {
  std::vector<int> shape;
  size_t pos = 0;
  while (pos < s.size()) {
    size_t next = s.find('x', pos);
    if (next == std::string::npos) next = s.size();
    shape.push_back(std::stoi(s.substr(pos, next - pos)));
    pos = next + 1;
  }
  return shape;
}

}  // namespace

void save_checkpoint(const std::string& path, const std::string& config_text,
                     const std::vector<std::pair<std::string, const TensorF*>>& tensors) {
  std::ostringstream manifest;
  manifest << "[config]\n" << config_text;
  if (!config_text.empty() && config_text.back() != '\n') manifest << '\n';
  manifest << "[tensors]\n";
  uint64_t offset = 0;
  for (const auto& [name, tensor] : tensors) {
    manifest << name << ' ' << shape_to_string(tensor->shape) << ' ' << offset << '\n';
    offset += tensor->numel() * sizeof(float);
  }
  std::string mtext = manifest.str();

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
  out.write(kCheckpointMagic, sizeof(kCheckpointMagic));
  uint64_t mlen = mtext.size();
  char lenbuf[8];
  for (int i = 0; i < 8; ++i) lenbuf[i] = static_cast<char>((mlen >> (8 * i)) & 0xff);
  out.write(lenbuf, 8);
  out.write(mtext.data(), static_cast<std::streamsize>(mtext.size()));
  for (const auto& [name, tensor] : tensors) {
    (void)name;
    static_assert(sizeof(float) == 4);
    out.write(reinterpret_cast<const char*>(tensor->v.data()),
              static_cast<std::streamsize>(tensor->numel() * sizeof(float)));
  }
  if (!out) throw std::runtime_error("failed writing checkpoint: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kCheckpointMagic, 8) != 0) {
    throw std::runtime_error("checkpoint has unknown magic: " + path);
  }
  char lenbuf[8];
  in.read(lenbuf, 8);
  if (!in) throw std::runtime_error("checkpoint truncated: " + path);
  uint64_t mlen = 0;
  for (int i = 0; i < 8; ++i) {
    mlen |= static_cast<uint64_t>(static_cast<unsigned char>(lenbuf[i])) << (8 * i);
  }
  std::string mtext(mlen, '\0');
  in.read(mtext.data(), static_cast<std::streamsize>(mlen));
  if (!in) throw std::runtime_error("checkpoint manifest truncated: " + path);

  Checkpoint ckpt;
  std::istringstream ms(mtext);
  std::string line;
  enum { None, Config, Tensors } section = None;
  while (std::getline(ms, line)) {
    if (line == "[config]") {
      section = Config;
      continue;
    }
    if (line == "[tensors]") {
      section = Tensors;
      continue;
    }
    if (section == Config) {
      ckpt.config_text += line;
      ckpt.config_text += '\n';
    } else if (section == Tensors) {
      if (line.empty()) continue;
      std::istringstream ls(line);
      CheckpointEntry e;
      std::string shape_str;
      if (!(ls >> e.name >> shape_str >> e.byte_offset)) {
        throw std::runtime_error("checkpoint manifest line malformed: " + line);
      }
      e.shape = shape_from_string(shape_str);
      ckpt.entries.push_back(std::move(e));
    } else if (!line.empty()) {
      throw std::runtime_error("checkpoint manifest preamble malformed: " + line);
    }
  }

  size_t total = 0;
  for (const auto& e : ckpt.entries) {
    if (e.byte_offset % sizeof(float) != 0) {
      throw std::runtime_error("checkpoint tensor offset misaligned: " + e.name);
    }
    total = std::max(total, static_cast<size_t>(e.byte_offset) / sizeof(float) + e.numel());
  }
  ckpt.data.resize(total);
  in.read(reinterpret_cast<char*>(ckpt.data.data()),
          static_cast<std::streamsize>(total * sizeof(float)));
  if (static_cast<size_t>(in.gcount()) != total * sizeof(float)) {
    throw std::runtime_error("checkpoint data truncated: " + path);
  }
  return ckpt;
}

}  // namespace maskstream::nn
