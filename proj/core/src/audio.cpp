#include "maskstream/audio.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace maskstream {

void AudioBuffer::check_rectangular() const {
  for (const auto& ch : samples) {
    if (ch.size() != length()) {
      throw std::invalid_argument("audio channels have unequal lengths");
    }
  }
}

namespace {

uint32_t read_u32(const uint8_t* p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}

uint16_t read_u16(const uint8_t* p) {
  return static_cast<uint16_t>(p[0] | (p[1] << 8));
}

void put_u32(std::string& out, uint32_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
  out.push_back(static_cast<char>((v >> 16) & 0xff));
  out.push_back(static_cast<char>((v >> 24) & 0xff));
}

void put_u16(std::string& out, uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
}

}  // namespace

AudioBuffer read_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open wav file: " + path);
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw std::runtime_error("not a RIFF/WAVE file: " + path);
  }

  uint16_t format = 0, num_channels = 0, bits = 0;
  uint32_t sample_rate = 0;
  const uint8_t* data = nullptr;
  size_t data_len = 0;
  bool have_fmt = false;

  size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const uint8_t* hdr = bytes.data() + pos;
    uint32_t chunk_len = read_u32(hdr + 4);
    const uint8_t* body = hdr + 8;
    if (pos + 8 + chunk_len > bytes.size()) {
      chunk_len = static_cast<uint32_t>(bytes.size() - pos - 8);
    }
    if (std::memcmp(hdr, "fmt ", 4) == 0 && chunk_len >= 16) {
      format = read_u16(body);
      num_channels = read_u16(body + 2);
      sample_rate = read_u32(body + 4);
      bits = read_u16(body + 14);
      have_fmt = true;
    } else if (std::memcmp(hdr, "data", 4) == 0) {
      data = body;
      data_len = chunk_len;
    }
    pos += 8 + chunk_len + (chunk_len & 1);
  }

  if (!have_fmt || data == nullptr) {
    throw std::runtime_error("wav file missing fmt or data chunk: " + path);
  }
  if (num_channels < 1 || num_channels > 2) {
    throw std::runtime_error("unsupported wav channel count " +
                             std::to_string(num_channels) + ": " + path);
  }
  bool pcm16 = (format == 1 && bits == 16);
  bool float32 = (format == 3 && bits == 32);
  if (!pcm16 && !float32) {
    throw std::runtime_error("unsupported wav encoding (want PCM16 or float32): " + path);
  }
  if (sample_rate != 16000) {
    std::fprintf(stderr, "warning: %s has sample rate %u, expected 16000; using as-is\n",
                 path.c_str(), sample_rate);
  }

  size_t bytes_per_sample = pcm16 ? 2 : 4;
  size_t n_frames = data_len / (bytes_per_sample * num_channels);

  AudioBuffer out;
  out.sample_rate = static_cast<int>(sample_rate);
  out.samples.assign(num_channels, std::vector<double>(n_frames));
  for (size_t i = 0; i < n_frames; ++i) {
    for (int c = 0; c < num_channels; ++c) {
      const uint8_t* p = data + (i * num_channels + c) * bytes_per_sample;
      if (pcm16) {
        int16_t s = static_cast<int16_t>(p[0] | (p[1] << 8));
        out.samples[c][i] = static_cast<double>(s) / 32768.0;
      } else {
        uint32_t u = read_u32(p);
        float f;
        std::memcpy(&f, &u, 4);
        out.samples[c][i] = static_cast<double>(f);
      }
    }
  }
  return out;
}

void write_wav(const std::string& path, const AudioBuffer& audio, WavEncoding encoding) {
  audio.check_rectangular();
  if (audio.channels() < 1 || audio.channels() > 2) {
    throw std::invalid_argument("write_wav supports 1 or 2 channels");
  }
  const uint16_t num_channels = static_cast<uint16_t>(audio.channels());
  const size_t n = audio.length();
  const bool pcm = encoding == WavEncoding::Pcm16;
  const uint16_t bits = pcm ? 16 : 32;
  const uint16_t block_align = static_cast<uint16_t>(num_channels * bits / 8);
  const uint32_t data_len = static_cast<uint32_t>(n * block_align);

  std::string out;
  out.reserve(64 + data_len);
  out.append("RIFF");
  const uint32_t fact_len = pcm ? 0 : 12;  // float wavs carry a fact chunk
  put_u32(out, 4 + 24 + fact_len + 8 + data_len);
  out.append("WAVE");
  out.append("fmt ");
  put_u32(out, 16);
  put_u16(out, pcm ? 1 : 3);
  put_u16(out, num_channels);
  put_u32(out, static_cast<uint32_t>(audio.sample_rate));
  put_u32(out, static_cast<uint32_t>(audio.sample_rate) * block_align);
  put_u16(out, block_align);
  put_u16(out, bits);
  if (!pcm) {
    out.append("fact");
    put_u32(out, 4);
    put_u32(out, static_cast<uint32_t>(n));
  }
  out.append("data");
  put_u32(out, data_len);

  for (size_t i = 0; i < n; ++i) {
    for (int c = 0; c < num_channels; ++c) {
      double v = audio.samples[c][i];
      if (pcm) {
        double scaled = std::lround(std::fmax(-1.0, std::fmin(1.0, v)) * 32767.0);
        put_u16(out, static_cast<uint16_t>(static_cast<int16_t>(scaled)));
      } else {
        float f = static_cast<float>(v);
        uint32_t u;
        std::memcpy(&u, &f, 4);
        put_u32(out, u);
      }
    }
  }

  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot write wav file: " + path);
  os.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!os) throw std::runtime_error("failed writing wav file: " + path);
}

}  // namespace maskstream
