#include "maskstream/harness/search.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "maskstream/harness/train.hpp"
#include "maskstream/model/stats.hpp"

namespace maskstream::harness {

namespace {

constexpr uint64_t kSampleTag = 0x7361'6d70ULL;
constexpr uint64_t kTrialTag = 0x7472'6c73ULL;

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

int parse_int(const std::string& v, const std::string& key) {
  size_t used = 0;
  int out;
  try {
    out = std::stoi(v, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("space: bad integer for " + key + ": " + v);
  }
  if (used != v.size()) throw std::invalid_argument("space: bad integer for " + key + ": " + v);
  return out;
}

double parse_double(const std::string& v, const std::string& key) {
  size_t used = 0;
  double out;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("space: bad number for " + key + ": " + v);
  }
  if (used != v.size()) throw std::invalid_argument("space: bad number for " + key + ": " + v);
  return out;
}

void check_range(int lo, int hi, const char* what) {
  if (lo > hi) {
    throw std::invalid_argument(std::string("space: empty range for ") + what);
  }
}

}  // namespace

void validate_search_space(const SearchSpace& s) {
  if (s.conv_choices.empty()) {
    throw std::invalid_argument("space: no conv_configs to choose from");
  }
  check_range(s.blstm_depth_min, s.blstm_depth_max, "blstm_depth");
  check_range(s.blstm_width_min, s.blstm_width_max, "blstm_width");
  check_range(s.fc_depth_min, s.fc_depth_max, "fc_depth");
  check_range(s.fc_width_min, s.fc_width_max, "fc_width");
  check_range(s.input_channels_min, s.input_channels_max, "input_channels");
  if (s.blstm_depth_min < 0 || s.fc_depth_min < 0) {
    throw std::invalid_argument("space: negative depth");
  }
  if (s.blstm_width_min < 1 || s.fc_width_min < 1) {
    throw std::invalid_argument("space: width must be >= 1");
  }
  if (s.input_channels_min < 1 || s.input_channels_max > 2) {
    throw std::invalid_argument("space: input_channels must stay within 1..2");
  }
  if (s.delta_phase < 0 || s.delta_phase > 2) {
    throw std::invalid_argument("space: delta_phase must be 0, 1 or 2");
  }
  if (s.lambda_min > s.lambda_max || s.lambda_min < 0.0) {
    throw std::invalid_argument("space: bad lambda range");
  }
  if (!(s.learning_rate_min > 0.0) || s.learning_rate_min > s.learning_rate_max) {
    throw std::invalid_argument("space: bad learning_rate range");
  }
}

SearchSpace parse_search_space(const std::string& text) {
  SearchSpace s;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("space: expected key = value, got: " + line);
    }
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (key == "conv_configs") {
      s.conv_choices.clear();
      std::stringstream ss(val);
      std::string item;
      while (std::getline(ss, item, ',')) {
        s.conv_choices.push_back(model::conv_config_from_string(trim(item)));
      }
    } else if (key == "blstm_depth_min") {
      s.blstm_depth_min = parse_int(val, key);
    } else if (key == "blstm_depth_max") {
      s.blstm_depth_max = parse_int(val, key);
    } else if (key == "blstm_width_min") {
      s.blstm_width_min = parse_int(val, key);
    } else if (key == "blstm_width_max") {
      s.blstm_width_max = parse_int(val, key);
    } else if (key == "fc_depth_min") {
      s.fc_depth_min = parse_int(val, key);
    } else if (key == "fc_depth_max") {
      s.fc_depth_max = parse_int(val, key);
    } else if (key == "fc_width_min") {
      s.fc_width_min = parse_int(val, key);
    } else if (key == "fc_width_max") {
      s.fc_width_max = parse_int(val, key);
    } else if (key == "delta_phase") {
      if (val == "both") {
        s.delta_phase = 2;
      } else if (val == "on" || val == "true" || val == "yes" || val == "1") {
        s.delta_phase = 1;
      } else if (val == "off" || val == "false" || val == "no" || val == "0") {
        s.delta_phase = 0;
      } else {
        throw std::invalid_argument("space: bad delta_phase value: " + val);
      }
    } else if (key == "lambda_min") {
      s.lambda_min = parse_double(val, key);
    } else if (key == "lambda_max") {
      s.lambda_max = parse_double(val, key);
    } else if (key == "learning_rate_min") {
      s.learning_rate_min = parse_double(val, key);
    } else if (key == "learning_rate_max") {
      s.learning_rate_max = parse_double(val, key);
    } else if (key == "input_channels_min") {
      s.input_channels_min = parse_int(val, key);
    } else if (key == "input_channels_max") {
      s.input_channels_max = parse_int(val, key);
    } else {
      throw std::invalid_argument("space: unknown key: " + key);
    }
  }
  validate_search_space(s);
  return s;
}

SearchSpace load_search_space(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open space: " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return parse_search_space(text.str());
}

std::string serialize_search_space(const SearchSpace& s) {
  std::ostringstream out;
  out << "conv_configs = ";
  for (size_t i = 0; i < s.conv_choices.size(); ++i) {
    if (i > 0) out << ",";
    out << model::to_string(s.conv_choices[i]);
  }
  out << "\n";
  out << "blstm_depth_min = " << s.blstm_depth_min << "\n";
  out << "blstm_depth_max = " << s.blstm_depth_max << "\n";
  out << "blstm_width_min = " << s.blstm_width_min << "\n";
  out << "blstm_width_max = " << s.blstm_width_max << "\n";
  out << "fc_depth_min = " << s.fc_depth_min << "\n";
  out << "fc_depth_max = " << s.fc_depth_max << "\n";
  out << "fc_width_min = " << s.fc_width_min << "\n";
  out << "fc_width_max = " << s.fc_width_max << "\n";
  out << "delta_phase = " << (s.delta_phase == 2 ? "both" : s.delta_phase == 1 ? "on" : "off")
      << "\n";
  out << "lambda_min = " << s.lambda_min << "\n";
  out << "lambda_max = " << s.lambda_max << "\n";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", s.learning_rate_min);
  out << "learning_rate_min = " << buf << "\n";
  std::snprintf(buf, sizeof(buf), "%.9g", s.learning_rate_max);
  out << "learning_rate_max = " << buf << "\n";
  out << "input_channels_min = " << s.input_channels_min << "\n";
  out << "input_channels_max = " << s.input_channels_max << "\n";
  return out.str();
}

model::ModelConfig sample_config(const SearchSpace& s, Rng& rng) {
  validate_search_space(s);
  model::ModelConfig cfg;
  // Field order is part of the contract: one rng, nine draws, always in this
  // sequence, so seeds reproduce configs independently of what trains later.
  cfg.conv_config = s.conv_choices[static_cast<size_t>(
      rng.uniform_int(0, static_cast<int64_t>(s.conv_choices.size()) - 1))];
  cfg.blstm_depth = static_cast<int>(rng.uniform_int(s.blstm_depth_min, s.blstm_depth_max));
  cfg.blstm_width = static_cast<int>(rng.uniform_int(s.blstm_width_min, s.blstm_width_max));
  cfg.fc_depth = static_cast<int>(rng.uniform_int(s.fc_depth_min, s.fc_depth_max));
  cfg.fc_width = static_cast<int>(rng.uniform_int(s.fc_width_min, s.fc_width_max));
  cfg.delta_phase = s.delta_phase == 2 ? rng.coin() : s.delta_phase == 1;
  cfg.lambda = rng.uniform(s.lambda_min, s.lambda_max);
  cfg.learning_rate = rng.log_uniform(s.learning_rate_min, s.learning_rate_max);
  cfg.input_channels =
      static_cast<int>(rng.uniform_int(s.input_channels_min, s.input_channels_max));
  cfg.causal = false;
  cfg.look_ahead_frames = 0;
  model::validate_model_config(cfg);
  return cfg;
}

std::vector<SearchTrial> random_search(const SearchSpace& space,
                                       const SearchOptions& opts,
                                       const data::DatasetManifest& train_manifest,
                                       const data::DatasetManifest& dev_manifest) {
  if (opts.budget < 1) throw std::invalid_argument("search: budget must be >= 1");
  validate_search_space(space);

  Rng sampler(Rng::mix(opts.seed, kSampleTag));
  std::vector<SearchTrial> trials(static_cast<size_t>(opts.budget));
  for (int i = 0; i < opts.budget; ++i) {
    SearchTrial& t = trials[static_cast<size_t>(i)];
    t.index = i;
    t.config = sample_config(space, sampler);
    const model::ModelStats st = model::model_stats(t.config);
    t.param_count = st.param_count;
    t.ops_per_audio_second = st.ops_per_audio_second;
  }

  for (SearchTrial& t : trials) {
    TrainOptions topt;
    topt.config = t.config;
    topt.seed = Rng::mix(Rng::mix(opts.seed, kTrialTag), static_cast<uint64_t>(t.index));
    topt.max_steps = opts.per_trial_steps;
    topt.batch_size = opts.batch_size;
    topt.checkpoint_every = opts.checkpoint_every;
    topt.chunk_seconds = opts.chunk_seconds;
    topt.data_dir = opts.data_dir;
    topt.eval_threads = opts.eval_threads;
    topt.filter_len = opts.filter_len;
    const TrainRun run = train(topt, train_manifest, dev_manifest);
    t.failed = run.failed;
    t.best_dev_sdr = run.best_dev_sdr;
    t.best_step = run.best_step;
  }

  std::stable_sort(trials.begin(), trials.end(),
                   [](const SearchTrial& a, const SearchTrial& b) {
                     const bool va = !a.failed && std::isfinite(a.best_dev_sdr);
                     const bool vb = !b.failed && std::isfinite(b.best_dev_sdr);
                     if (va != vb) return va;
                     if (!va) return false;
                     return a.best_dev_sdr > b.best_dev_sdr;
                   });
  return trials;
}

void write_search_csv(const std::string& path, const std::vector<SearchTrial>& trials) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write csv: " + path);
  out << "trial,conv_config,blstm_depth,blstm_width,fc_depth,fc_width,delta_phase,"
         "lambda,learning_rate,input_channels,param_count,ops_per_audio_second,"
         "best_dev_sdr,best_step,failed\n";
  char buf[128];
  for (const SearchTrial& t : trials) {
    const model::ModelConfig& c = t.config;
    std::snprintf(buf, sizeof(buf), "%.6g,%.9g", c.lambda, c.learning_rate);
    out << t.index << ',' << model::to_string(c.conv_config) << ',' << c.blstm_depth
        << ',' << c.blstm_width << ',' << c.fc_depth << ',' << c.fc_width << ','
        << (c.delta_phase ? 1 : 0) << ',' << buf << ',' << c.input_channels << ','
        << t.param_count << ',';
    std::snprintf(buf, sizeof(buf), "%.9g,%.9g", t.ops_per_audio_second, t.best_dev_sdr);
    out << buf << ',' << t.best_step << ',' << (t.failed ? 1 : 0) << "\n";
  }
  if (!out) throw std::runtime_error("failed writing csv: " + path);
}

}  // namespace maskstream::harness
