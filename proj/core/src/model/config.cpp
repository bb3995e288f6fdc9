#include "maskstream/model/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace maskstream::model {

std::string to_string(ConvConfig c) {
  switch (c) {
    case ConvConfig::Small: return "small";
    case ConvConfig::Large: return "large";
    case ConvConfig::None: return "none";
  }
  return "none";
}

ConvConfig conv_config_from_string(const std::string& s) {
  if (s == "small") return ConvConfig::Small;
  if (s == "large") return ConvConfig::Large;
  if (s == "none") return ConvConfig::None;
  throw std::invalid_argument("unknown conv_config value: " + s);
}

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

bool parse_bool(const std::string& v, const std::string& key) {
  std::string s = v;
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (s == "true" || s == "yes" || s == "1") return true;
  if (s == "false" || s == "no" || s == "0") return false;
  throw std::invalid_argument("config: bad boolean for " + key + ": " + v);
}

int parse_int(const std::string& v, const std::string& key) {
  size_t used = 0;
  int out;
  try {
    out = std::stoi(v, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("config: bad integer for " + key + ": " + v);
  }
  if (used != v.size()) throw std::invalid_argument("config: bad integer for " + key + ": " + v);
  return out;
}

double parse_double(const std::string& v, const std::string& key) {
  size_t used = 0;
  double out;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("config: bad number for " + key + ": " + v);
  }
  if (used != v.size()) throw std::invalid_argument("config: bad number for " + key + ": " + v);
  return out;
}

}  // namespace

ModelConfig parse_model_config(const std::string& text) {
  ModelConfig cfg;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config: expected key = value, got: " + line);
    }
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (key == "conv_config") {
      cfg.conv_config = conv_config_from_string(val);
    } else if (key == "blstm_depth") {
      cfg.blstm_depth = parse_int(val, key);
    } else if (key == "blstm_width") {
      cfg.blstm_width = parse_int(val, key);
    } else if (key == "fc_depth") {
      cfg.fc_depth = parse_int(val, key);
    } else if (key == "fc_width") {
      cfg.fc_width = parse_int(val, key);
    } else if (key == "delta_phase") {
      cfg.delta_phase = parse_bool(val, key);
    } else if (key == "lambda") {
      cfg.lambda = parse_double(val, key);
    } else if (key == "learning_rate") {
      cfg.learning_rate = parse_double(val, key);
    } else if (key == "input_channels") {
      cfg.input_channels = parse_int(val, key);
    } else if (key == "causal") {
      cfg.causal = parse_bool(val, key);
    } else if (key == "look_ahead_frames") {
      cfg.look_ahead_frames = parse_int(val, key);
    } else if (key == "compression_power") {
      cfg.compression_power = parse_double(val, key);
    } else {
      throw std::invalid_argument("config: unknown key: " + key);
    }
  }
  return cfg;
}

ModelConfig load_model_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_model_config(ss.str());
}

std::string serialize_model_config(const ModelConfig& cfg) {
  std::ostringstream out;
  char buf[64];
  out << "conv_config = " << to_string(cfg.conv_config) << "\n";
  out << "blstm_depth = " << cfg.blstm_depth << "\n";
  out << "blstm_width = " << cfg.blstm_width << "\n";
  out << "fc_depth = " << cfg.fc_depth << "\n";
  out << "fc_width = " << cfg.fc_width << "\n";
  out << "delta_phase = " << (cfg.delta_phase ? "true" : "false") << "\n";
  std::snprintf(buf, sizeof(buf), "%.17g", cfg.lambda);
  out << "lambda = " << buf << "\n";
  std::snprintf(buf, sizeof(buf), "%.17g", cfg.learning_rate);
  out << "learning_rate = " << buf << "\n";
  out << "input_channels = " << cfg.input_channels << "\n";
  out << "causal = " << (cfg.causal ? "true" : "false") << "\n";
  out << "look_ahead_frames = " << cfg.look_ahead_frames << "\n";
  std::snprintf(buf, sizeof(buf), "%.17g", cfg.compression_power);
  out << "compression_power = " << buf << "\n";
  return out.str();
}

void save_model_config(const std::string& path, const ModelConfig& cfg) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write config: " + path);
  out << serialize_model_config(cfg);
}

void validate_model_config(const ModelConfig& cfg) {
  std::vector<std::string> bad;
  if (cfg.blstm_depth < 0 || cfg.blstm_depth > 5) bad.push_back("blstm_depth must be in [0, 5]");
  if (cfg.blstm_width < 8 || cfg.blstm_width > 1024) bad.push_back("blstm_width must be in [8, 1024]");
  if (cfg.fc_depth < 0 || cfg.fc_depth > 5) bad.push_back("fc_depth must be in [0, 5]");
  if (cfg.fc_width < 8 || cfg.fc_width > 1024) bad.push_back("fc_width must be in [8, 1024]");
  if (cfg.lambda < 0.0 || cfg.lambda > 1.0) bad.push_back("lambda must be in [0, 1]");
  if (cfg.learning_rate < 0.0) bad.push_back("learning_rate must be nonnegative");
  if (cfg.input_channels < 1 || cfg.input_channels > 2) bad.push_back("input_channels must be 1 or 2");
  if (!cfg.causal && cfg.look_ahead_frames != 0) {
    bad.push_back("look_ahead_frames must be 0 for non-causal models");
  }
  if (cfg.compression_power <= 0.0 || cfg.compression_power > 1.0) {
    bad.push_back("compression_power must be in (0, 1]");
  }
  if (!bad.empty()) {
    std::string msg = "invalid model config:";
    for (const std::string& s : bad) msg += "\n  - " + s;
    throw std::invalid_argument(msg);
  }
}

std::vector<nn::ConvLayerSpec> conv_stack(ConvConfig which, bool causal) {
  nn::PaddingMode pad = causal ? nn::PaddingMode::Causal : nn::PaddingMode::Centered;
  auto row = [pad](int filters, int tw, int fw, int td, int fd) {
    return nn::ConvLayerSpec{filters, tw, fw, td, fd, pad};
  };
  switch (which) {
    case ConvConfig::Small:
      return {
          row(32, 1, 7, 1, 1),  row(32, 7, 1, 1, 1), row(32, 5, 5, 1, 1),
          row(32, 5, 5, 2, 1),  row(32, 5, 5, 4, 1), row(32, 5, 5, 8, 1),
          row(32, 5, 5, 16, 1), row(8, 1, 1, 1, 1),
      };
    case ConvConfig::Large:
      return {
          row(32, 1, 7, 1, 1),   row(32, 7, 1, 1, 1),   row(32, 5, 5, 1, 1),
          row(32, 5, 5, 2, 1),   row(32, 5, 5, 4, 1),   row(32, 5, 5, 8, 1),
          row(32, 5, 5, 16, 1),  row(32, 5, 5, 32, 1),  row(32, 5, 5, 1, 1),
          row(32, 5, 5, 2, 2),   row(32, 5, 5, 4, 4),   row(32, 5, 5, 8, 8),
          row(32, 5, 5, 16, 16), row(32, 5, 5, 32, 32), row(8, 1, 1, 1, 1),
      };
    case ConvConfig::None:
      return {};
  }
  return {};
}

}  // namespace maskstream::model
