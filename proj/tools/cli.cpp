#include "cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "maskstream/audio.hpp"
#include "maskstream/data/corpus.hpp"
#include "maskstream/data/manifest.hpp"
#include "maskstream/harness/evaluate.hpp"
#include "maskstream/harness/search.hpp"
#include "maskstream/harness/sweep.hpp"
#include "maskstream/harness/train.hpp"
#include "maskstream/model/enhance.hpp"
#include "maskstream/model/stats.hpp"
#include "maskstream/stream/engine.hpp"

namespace {

using namespace maskstream;

std::string check_look_ahead_ms(const std::string& s) {
  try {
    size_t used = 0;
    const int ms = std::stoi(s, &used);
    if (used != s.size()) return "not an integer: " + s;
    if (ms % 10 != 0) return "look-ahead must be a multiple of the 10 ms hop";
    if (ms < -100 || ms > 200) return "look-ahead must lie within -100..200 ms";
  } catch (const std::exception&) {
    return "not an integer: " + s;
  }
  return {};
}

bool looks_like_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  char magic[8] = {};
  in.read(magic, sizeof(magic));
  return in.gcount() == 8 && std::string(magic, 8) == "MSKSTRM1";
}

void print_config(std::ostream& out, const model::ModelConfig& cfg) {
  out << "conv_config: " << model::to_string(cfg.conv_config) << "\n";
  out << "blstm_depth: " << cfg.blstm_depth << "\n";
  out << "blstm_width: " << cfg.blstm_width << "\n";
  out << "fc_depth: " << cfg.fc_depth << "\n";
  out << "fc_width: " << cfg.fc_width << "\n";
  out << "delta_phase: " << (cfg.delta_phase ? "on" : "off") << "\n";
  out << "input_channels: " << cfg.input_channels << "\n";
  out << "causal: " << (cfg.causal ? "yes" : "no") << "\n";
  out << "look_ahead_frames: " << cfg.look_ahead_frames << "\n";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", cfg.lambda);
  out << "lambda: " << buf << "\n";
  std::snprintf(buf, sizeof(buf), "%.9g", cfg.learning_rate);
  out << "learning_rate: " << buf << "\n";
  std::snprintf(buf, sizeof(buf), "%.9g", cfg.compression_power);
  out << "compression_power: " << buf << "\n";
}

void print_stats(std::ostream& out, const model::ModelStats& st) {
  char buf[64];
  out << "param_count: " << st.param_count << "\n";
  std::snprintf(buf, sizeof(buf), "%.0f", st.ops_per_frame);
  out << "ops_per_frame: " << buf << "\n";
  std::snprintf(buf, sizeof(buf), "%.0f", st.ops_per_audio_second);
  out << "ops_per_audio_second: " << buf << "\n";
  out << "receptive_field_past_frames: " << st.past_context_frames << "\n";
  out << "receptive_field_future_frames: " << st.future_context_frames << "\n";
  std::snprintf(buf, sizeof(buf), "%.1f", st.latency_ms);
  out << "latency_ms: " << buf << "\n";
  out << "latency_samples: " << st.latency_samples << "\n";
}

struct GenDataArgs {
  std::string manifest, dir;
};

struct TrainArgs {
  std::string config, train_manifest, dev_manifest, out_dir, data_dir;
  int steps = 2000, batch = 4, checkpoint_every = 200, threads = 0, filter_len = 512;
  double chunk_seconds = 3.0;
  uint64_t seed = 0;
};

struct EnhanceArgs {
  std::string ckpt, in_wav, out_wav;
  int look_ahead_ms = 0;
  bool has_look_ahead = false;
  bool stream = false, bypass = false, report_latency = false;
};

struct EvaluateArgs {
  std::string ckpt, manifest, out_csv, data_dir;
  int threads = 0, filter_len = 512;
  bool bypass = false;
};

struct SweepArgs {
  std::string config, train_manifest, dev_manifest, eval_manifest, out_csv, data_dir;
  std::vector<int> look_ahead_ms;
  int trials = 2, steps = 300, batch = 2, checkpoint_every = 100, threads = 0;
  double chunk_seconds = 3.0;
  uint64_t seed = 0;
  bool identical_seeds = false;
};

struct SearchArgs {
  std::string space, train_manifest, dev_manifest, out_csv, data_dir;
  int budget = 8, steps = 200, batch = 4, checkpoint_every = 100, threads = 0;
  double chunk_seconds = 3.0;
  uint64_t seed = 0;
};

int run_gen_data(const GenDataArgs& a) {
  const data::DatasetManifest m = data::read_manifest(a.manifest);
  data::build_corpus(m, a.dir);
  std::cout << "wrote " << m.entries.size() << " noisy/clean pairs to " << a.dir << "\n";
  return 0;
}

int run_train(const TrainArgs& a) {
  harness::TrainOptions opts;
  opts.config = model::load_model_config(a.config);
  opts.seed = a.seed;
  opts.max_steps = a.steps;
  opts.batch_size = a.batch;
  opts.checkpoint_every = a.checkpoint_every;
  opts.chunk_seconds = a.chunk_seconds;
  opts.data_dir = a.data_dir;
  opts.out_dir = a.out_dir;
  opts.eval_threads = a.threads;
  opts.filter_len = a.filter_len;
  const data::DatasetManifest train_m = data::read_manifest(a.train_manifest);
  const data::DatasetManifest dev_m = data::read_manifest(a.dev_manifest);

  const harness::TrainRun run = harness::train(opts, train_m, dev_m);
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4f", run.baseline_dev_sdr);
  std::cout << "baseline_dev_sdr: " << buf << "\n";
  for (const harness::StepMetric& m : run.metrics) {
    if (!m.evaluated) continue;
    std::snprintf(buf, sizeof(buf), "step %d loss %.6g dev_sdr %.4f", m.step, m.loss,
                  m.dev_sdr);
    std::cout << buf << "\n";
  }
  if (run.failed) {
    std::cerr << "error: training diverged (non-finite loss) after step "
              << run.steps_completed << "; partial record written to " << a.out_dir
              << "\n";
    return 1;
  }
  std::snprintf(buf, sizeof(buf), "%.4f", run.best_dev_sdr);
  std::cout << "best: step " << run.best_step << " dev_sdr " << buf << "\n";
  std::cout << "wrote " << a.out_dir << "/best.ckpt, final.ckpt, metrics.csv\n";
  return 0;
}

int run_enhance(const EnhanceArgs& a) {
  AudioBuffer noisy = read_wav(a.in_wav);
  dsp::StftParams params;
  params.sample_rate = noisy.sample_rate;

  AudioBuffer out;
  model::ModelConfig cfg;  // defaults describe the identity path
  cfg.causal = true;
  cfg.look_ahead_frames = 0;
  if (a.bypass) {
    out = model::enhance_offline(nullptr, noisy, params, true);
  } else {
    model::NetworkF net = model::load_network(a.ckpt);
    if (a.has_look_ahead) net.config.look_ahead_frames = a.look_ahead_ms / 10;
    cfg = net.config;
    if (a.stream) {
      stream::StreamEngine engine(net, params);
      std::vector<double> enhanced;
      const size_t chunk = static_cast<size_t>(params.hop) * 10;
      for (size_t pos = 0; pos < noisy.length(); pos += chunk) {
        const size_t end = std::min(noisy.length(), pos + chunk);
        std::vector<std::vector<double>> piece;
        for (const auto& ch : noisy.samples) {
          piece.emplace_back(ch.begin() + static_cast<long>(pos),
                             ch.begin() + static_cast<long>(end));
        }
        const std::vector<double> got = engine.push(piece);
        enhanced.insert(enhanced.end(), got.begin(), got.end());
      }
      const std::vector<double> tail = engine.flush();
      enhanced.insert(enhanced.end(), tail.begin(), tail.end());
      out.sample_rate = noisy.sample_rate;
      out.samples = {std::move(enhanced)};
    } else {
      out = model::enhance_offline(&net, noisy, params, false);
    }
  }
  write_wav(a.out_wav, out, WavEncoding::Float32);
  if (a.report_latency) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.1f", stream::algorithmic_latency_ms(cfg, params));
    std::cout << "latency_ms: " << buf << "\n";
    std::cout << "latency_samples: " << stream::algorithmic_latency_samples(cfg, params)
              << "\n";
  }
  return 0;
}

int run_evaluate(const EvaluateArgs& a) {
  const data::DatasetManifest m = data::read_manifest(a.manifest);
  harness::EvalOptions opts;
  opts.data_dir = a.data_dir;
  opts.threads = a.threads;
  opts.filter_len = a.filter_len;
  opts.bypass_mask = a.bypass;

  std::vector<eval::SdrResult> results;
  if (a.bypass) {
    results = harness::evaluate_model(nullptr, m, opts);
  } else {
    const model::NetworkF net = model::load_network(a.ckpt);
    results = harness::evaluate_model(&net, m, opts);
  }
  if (a.out_csv.empty()) {
    harness::write_eval_csv(std::cout, results);
  } else {
    harness::write_eval_csv(a.out_csv, results);
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4f", harness::mean_sdr(results));
    std::cout << "mean_sdr: " << buf << "\n";
    std::cout << "wrote " << a.out_csv << "\n";
  }
  return 0;
}

int run_sweep(const SweepArgs& a) {
  harness::SweepOptions opts;
  opts.look_ahead_ms = a.look_ahead_ms.empty() ? std::vector<int>{-100, 0, 100, 200}
                                               : a.look_ahead_ms;
  opts.trials_per_point = a.trials;
  opts.distinct_trial_seeds = !a.identical_seeds;
  opts.seed = a.seed;
  opts.steps = a.steps;
  opts.batch_size = a.batch;
  opts.checkpoint_every = a.checkpoint_every;
  opts.chunk_seconds = a.chunk_seconds;
  opts.data_dir = a.data_dir;
  opts.eval_threads = a.threads;

  const model::ModelConfig base = model::load_model_config(a.config);
  const data::DatasetManifest train_m = data::read_manifest(a.train_manifest);
  const data::DatasetManifest dev_m = data::read_manifest(a.dev_manifest);
  const data::DatasetManifest eval_m = data::read_manifest(a.eval_manifest);
  const std::vector<harness::SweepPoint> points =
      harness::lookahead_sweep(base, opts, train_m, dev_m, eval_m);
  harness::write_sweep_csv(a.out_csv, points);
  char buf[128];
  for (const harness::SweepPoint& p : points) {
    std::snprintf(buf, sizeof(buf),
                  "look_ahead %d ms: dev %.4f +/- %.4f, eval %.4f +/- %.4f",
                  p.look_ahead_ms, p.dev_mean, p.dev_std, p.eval_mean, p.eval_std);
    std::cout << buf << "\n";
  }
  std::cout << "wrote " << a.out_csv << "\n";
  return 0;
}

int run_search(const SearchArgs& a) {
  harness::SearchOptions opts;
  opts.budget = a.budget;
  opts.per_trial_steps = a.steps;
  opts.batch_size = a.batch;
  opts.checkpoint_every = a.checkpoint_every;
  opts.chunk_seconds = a.chunk_seconds;
  opts.seed = a.seed;
  opts.data_dir = a.data_dir;
  opts.eval_threads = a.threads;

  const harness::SearchSpace space = harness::load_search_space(a.space);
  const data::DatasetManifest train_m = data::read_manifest(a.train_manifest);
  const data::DatasetManifest dev_m = data::read_manifest(a.dev_manifest);
  const std::vector<harness::SearchTrial> trials =
      harness::random_search(space, opts, train_m, dev_m);
  harness::write_search_csv(a.out_csv, trials);
  const harness::SearchTrial& top = trials.front();
  char buf[128];
  std::snprintf(buf, sizeof(buf), "best trial %d: dev_sdr %.4f, %lld params", top.index,
                top.best_dev_sdr, top.param_count);
  std::cout << buf << "\n";
  std::cout << "wrote " << a.out_csv << "\n";
  return 0;
}

int run_info(const std::string& path) {
  if (looks_like_checkpoint(path)) {
    const model::NetworkF net = model::load_network(path);
    print_config(std::cout, net.config);
    print_stats(std::cout, model::model_stats(net.config));
    std::cout << "param_count_checkpoint: " << net.param_count() << "\n";
  } else {
    const model::ModelConfig cfg = model::load_model_config(path);
    model::validate_model_config(cfg);
    print_config(std::cout, cfg);
    print_stats(std::cout, model::model_stats(cfg));
  }
  return 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"maskstream: two-channel mask-based speech enhancement"};
  app.require_subcommand(1);

  GenDataArgs gen;
  auto* gen_cmd = app.add_subcommand("gen-data", "Materialize a manifest as WAV files");
  gen_cmd->add_option("manifest", gen.manifest, "dataset manifest")
      ->required()
      ->check(CLI::ExistingFile);
  gen_cmd->add_option("dir", gen.dir, "output directory")->required();

  TrainArgs tr;
  auto* train_cmd = app.add_subcommand("train", "Train a model from a config file");
  train_cmd->add_option("config", tr.config, "model config file")
      ->required()
      ->check(CLI::ExistingFile);
  train_cmd->add_option("--train-manifest", tr.train_manifest, "training split manifest")
      ->required()
      ->check(CLI::ExistingFile);
  train_cmd->add_option("--dev-manifest", tr.dev_manifest, "dev split manifest")
      ->required()
      ->check(CLI::ExistingFile);
  train_cmd->add_option("--out", tr.out_dir, "output directory")->required();
  train_cmd->add_option("--steps", tr.steps, "training steps");
  train_cmd->add_option("--batch", tr.batch, "batch size");
  train_cmd->add_option("--checkpoint-every", tr.checkpoint_every, "dev-SDR cadence");
  train_cmd->add_option("--chunk-seconds", tr.chunk_seconds, "training chunk length");
  train_cmd->add_option("--seed", tr.seed, "run seed");
  train_cmd->add_option("--data-dir", tr.data_dir, "materialized corpus directory");
  train_cmd->add_option("--threads", tr.threads, "evaluation worker cap");
  train_cmd->add_option("--filter-len", tr.filter_len, "SDR projection filter taps");

  EnhanceArgs en;
  auto* enh_cmd = app.add_subcommand("enhance", "Denoise one WAV file");
  enh_cmd->add_option("ckpt", en.ckpt, "model checkpoint")->required();
  enh_cmd->add_option("in", en.in_wav, "input WAV (two channels)")
      ->required()
      ->check(CLI::ExistingFile);
  enh_cmd->add_option("out", en.out_wav, "output WAV")->required();
  auto* la = enh_cmd->add_option("--look-ahead-ms", en.look_ahead_ms,
                                 "override the model's look-ahead");
  la->check(CLI::Validator(check_look_ahead_ms, "LOOKAHEAD"));
  enh_cmd->add_flag("--stream", en.stream, "run the streaming engine");
  enh_cmd->add_flag("--bypass-mask", en.bypass,
                    "force a unit mask: emit the channel sum, no model needed");
  enh_cmd->add_flag("--report-latency", en.report_latency,
                    "print the algorithmic latency");

  EvaluateArgs ev;
  auto* eval_cmd = app.add_subcommand("evaluate", "Score a model over a manifest");
  eval_cmd->add_option("ckpt", ev.ckpt, "model checkpoint")->required();
  eval_cmd->add_option("manifest", ev.manifest, "dataset manifest")
      ->required()
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--out", ev.out_csv, "CSV path (default: stdout)");
  eval_cmd->add_option("--data-dir", ev.data_dir, "materialized corpus directory");
  eval_cmd->add_option("--threads", ev.threads, "evaluation worker cap");
  eval_cmd->add_option("--filter-len", ev.filter_len, "SDR projection filter taps");
  eval_cmd->add_flag("--bypass-mask", ev.bypass, "score the plain channel sum");

  SweepArgs sw;
  auto* sweep_cmd = app.add_subcommand("sweep", "Look-ahead sweep over causal models");
  sweep_cmd->add_option("config", sw.config, "base model config")
      ->required()
      ->check(CLI::ExistingFile);
  sweep_cmd
      ->add_option("--look-ahead-ms", sw.look_ahead_ms,
                   "points to sweep (default -100,0,100,200)")
      ->delimiter(',');
  sweep_cmd->add_option("--trials", sw.trials, "trials per point");
  sweep_cmd->add_option("--steps", sw.steps, "training steps per trial");
  sweep_cmd->add_option("--batch", sw.batch, "batch size");
  sweep_cmd->add_option("--checkpoint-every", sw.checkpoint_every, "dev-SDR cadence");
  sweep_cmd->add_option("--chunk-seconds", sw.chunk_seconds, "training chunk length");
  sweep_cmd->add_option("--seed", sw.seed, "sweep seed");
  sweep_cmd->add_flag("--identical-seeds", sw.identical_seeds,
                      "repeat the same seed for every trial");
  sweep_cmd->add_option("--train-manifest", sw.train_manifest, "training split")
      ->required()
      ->check(CLI::ExistingFile);
  sweep_cmd->add_option("--dev-manifest", sw.dev_manifest, "dev split")
      ->required()
      ->check(CLI::ExistingFile);
  sweep_cmd->add_option("--eval-manifest", sw.eval_manifest, "eval split")
      ->required()
      ->check(CLI::ExistingFile);
  sweep_cmd->add_option("--out", sw.out_csv, "CSV path")->required();
  sweep_cmd->add_option("--data-dir", sw.data_dir, "materialized corpus directory");
  sweep_cmd->add_option("--threads", sw.threads, "evaluation worker cap");

  SearchArgs se;
  auto* search_cmd = app.add_subcommand("search", "Random hyperparameter search");
  search_cmd->add_option("space", se.space, "search-space file")
      ->required()
      ->check(CLI::ExistingFile);
  search_cmd->add_option("--budget", se.budget, "number of trials");
  search_cmd->add_option("--steps", se.steps, "training steps per trial");
  search_cmd->add_option("--batch", se.batch, "batch size");
  search_cmd->add_option("--checkpoint-every", se.checkpoint_every, "dev-SDR cadence");
  search_cmd->add_option("--chunk-seconds", se.chunk_seconds, "training chunk length");
  search_cmd->add_option("--seed", se.seed, "search seed");
  search_cmd->add_option("--train-manifest", se.train_manifest, "training split")
      ->required()
      ->check(CLI::ExistingFile);
  search_cmd->add_option("--dev-manifest", se.dev_manifest, "dev split")
      ->required()
      ->check(CLI::ExistingFile);
  search_cmd->add_option("--out", se.out_csv, "CSV path")->required();
  search_cmd->add_option("--data-dir", se.data_dir, "materialized corpus directory");
  search_cmd->add_option("--threads", se.threads, "evaluation worker cap");

  std::string info_path;
  auto* info_cmd = app.add_subcommand("info", "Report size, cost and latency numbers");
  info_cmd->add_option("file", info_path, "model config or checkpoint")
      ->required()
      ->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    en.has_look_ahead = la->count() > 0;
    if (enh_cmd->parsed() && !en.bypass &&
        !std::filesystem::exists(std::filesystem::path(en.ckpt))) {
      std::cerr << "error: no such checkpoint: " << en.ckpt << "\n"
                << "Run with --help for more information.\n";
      return 2;
    }
    if (eval_cmd->parsed() && !ev.bypass &&
        !std::filesystem::exists(std::filesystem::path(ev.ckpt))) {
      std::cerr << "error: no such checkpoint: " << ev.ckpt << "\n"
                << "Run with --help for more information.\n";
      return 2;
    }
    if (gen_cmd->parsed()) return run_gen_data(gen);
    if (train_cmd->parsed()) return run_train(tr);
    if (enh_cmd->parsed()) return run_enhance(en);
    if (eval_cmd->parsed()) return run_evaluate(ev);
    if (sweep_cmd->parsed()) return run_sweep(sw);
    if (search_cmd->parsed()) return run_search(se);
    if (info_cmd->parsed()) return run_info(info_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
