#include "maskstream/stream/engine.hpp"

#include <algorithm>
#include <stdexcept>

#include "maskstream/dsp/features.hpp"
#include "maskstream/model/enhance.hpp"

namespace maskstream::stream {

StreamEngine::StreamEngine(const model::Network<float>& net, const dsp::StftParams& params)
    : net_(&net), params_(params) {
  params_.validate();
  if (!net.config.causal) {
    throw std::invalid_argument("stream: only causal models can run incrementally");
  }
  if (net.bins != params_.bins()) {
    throw std::invalid_argument("stream: model bin count does not match the transform");
  }
  bins_ = params_.bins();
  channels_ = net.config.input_channels;
  window_ = dsp::hann_window(params_.frame_len);
  off_ = model::mask_row_offset(net.config);
  pad_after_ = model::pad_rows_after(net.config);
  feat_row_elems_ = static_cast<size_t>(bins_) * net.feat_channels;

  conv_states_.reserve(net.convs.size());
  for (const auto& layer : net.convs) {
    if (layer.spec.padding != nn::PaddingMode::Causal) {
      throw std::invalid_argument("stream: model has a non-causal conv layer");
    }
    ConvState cs;
    cs.layer = &layer;
    cs.ring_rows = layer.t_extent() + 1;
    cs.row_elems = static_cast<size_t>(bins_) * layer.in_channels;
    cs.ring.assign(static_cast<size_t>(cs.ring_rows) * cs.row_elems, 0.0f);
    cs.out_row.assign(static_cast<size_t>(bins_) * layer.spec.filters, 0.0f);
    conv_states_.push_back(std::move(cs));
  }
  lstm_states_.reserve(net.lstms.size());
  for (const auto& block : net.lstms) {
    LstmState ls;
    ls.block = &block;
    ls.h.assign(block.spec.width, 0.0f);
    ls.c.assign(block.spec.width, 0.0f);
    ls.acts.assign(4 * static_cast<size_t>(block.spec.width), 0.0f);
    ls.pre.assign(4 * static_cast<size_t>(block.spec.width), 0.0f);
    ls.out_row.assign(block.out_dim(), 0.0f);
    lstm_states_.push_back(std::move(ls));
  }
  fc_states_.reserve(net.fcs.size());
  for (const auto& layer : net.fcs) {
    fc_states_.push_back({&layer, std::vector<float>(layer.spec.width, 0.0f)});
  }
  mask_row_.assign(bins_, 0.0f);
  buf_.assign(channels_, {});
  prev_spec_.assign(static_cast<size_t>(bins_) * channels_, std::complex<double>(0.0, 0.0));
  cur_spec_.assign(static_cast<size_t>(bins_) * channels_, std::complex<double>(0.0, 0.0));

  // Negative look-ahead starts the network ahead of the audio on zero rows.
  const int pad_before = model::pad_rows_before(net.config);
  if (pad_before > 0) {
    std::vector<float> zero_row(feat_row_elems_, 0.0f);
    for (int j = 0; j < pad_before; ++j) {
      advance_network(zero_row.data());
      mask_queue_.emplace_back(mask_row_);
    }
  }
}

void StreamEngine::advance_network(const float* feat_row) {
  const long long r = rows_fed_++;
  const float* cur = feat_row;
  for (auto& cs : conv_states_) {
    std::copy(cur, cur + cs.row_elems,
              cs.ring.begin() + static_cast<size_t>(r % cs.ring_rows) * cs.row_elems);
    const auto& layer = *cs.layer;
    const int e = layer.t_extent();
    auto fetch = [&](int kt) -> const float* {
      long long ti = r + static_cast<long long>(kt) * layer.spec.t_dilation - e;
      if (ti < 0) return nullptr;
      return cs.ring.data() + static_cast<size_t>(ti % cs.ring_rows) * cs.row_elems;
    };
    layer.forward_frame(fetch, bins_, cs.out_row.data());
    cur = cs.out_row.data();
  }
  for (auto& ls : lstm_states_) {
    const auto& block = *ls.block;
    block.fwd.step(cur, ls.h.data(), ls.c.data(), ls.h.data(), ls.c.data(), ls.acts.data(),
                   ls.pre.data());
    std::copy(ls.h.begin(), ls.h.end(), ls.out_row.begin());
    if (block.spec.residual) {
      if (block.has_proj) {
        const int od = block.out_dim();
        for (int d = 0; d < block.in_dim; ++d) {
          const float xv = cur[d];
          const float* pr = block.proj_w.row(d);
          for (int j = 0; j < od; ++j) ls.out_row[j] += xv * pr[j];
        }
      } else {
        for (int d = 0; d < block.in_dim; ++d) ls.out_row[d] += cur[d];
      }
    }
    cur = ls.out_row.data();
  }
  for (auto& fs : fc_states_) {
    fs.layer->forward_frame(cur, fs.out_row.data());
    cur = fs.out_row.data();
  }
  net_->head.forward_frame(cur, mask_row_.data());
}

std::vector<double> StreamEngine::push(const std::vector<std::vector<double>>& chunk) {
  if (finished_) throw std::logic_error("stream: push after flush");
  if (static_cast<int>(chunk.size()) != channels_) {
    throw std::invalid_argument("stream: chunk channel count does not match the model");
  }
  const size_t n = chunk[0].size();
  for (const auto& c : chunk) {
    if (c.size() != n) throw std::invalid_argument("stream: ragged chunk");
  }
  for (int c = 0; c < channels_; ++c) {
    buf_[c].insert(buf_[c].end(), chunk[c].begin(), chunk[c].end());
  }
  total_pushed_ += n;

  std::vector<double> out;
  const size_t frame_len = static_cast<size_t>(params_.frame_len);
  const size_t hop = static_cast<size_t>(params_.hop);
  while (buf_start_ + buf_[0].size() >= static_cast<size_t>(next_frame_) * hop + frame_len) {
    process_frame(out);
    // Samples before the next frame's start are no longer needed as input.
    size_t keep_from = static_cast<size_t>(next_frame_) * hop;
    size_t drop = keep_from - buf_start_;
    for (auto& b : buf_) b.erase(b.begin(), b.begin() + drop);
    buf_start_ = keep_from;
  }
  return out;
}

void StreamEngine::process_frame(std::vector<double>& out) {
  const long long t = next_frame_++;
  const size_t start = static_cast<size_t>(t) * params_.hop - buf_start_;
  std::vector<double> framebuf(params_.frame_len);
  std::vector<std::complex<double>> binbuf(bins_);
  for (int c = 0; c < channels_; ++c) {
    const std::vector<double>& x = buf_[c];
    for (int n = 0; n < params_.frame_len; ++n) framebuf[n] = x[start + n];
    dsp::analyze_frame(framebuf.data(), window_, params_.fft_size, binbuf.data());
    for (int f = 0; f < bins_; ++f) cur_spec_[static_cast<size_t>(f) * channels_ + c] = binbuf[f];
  }

  std::vector<std::complex<double>> z(bins_);
  for (int f = 0; f < bins_; ++f) {
    std::complex<double> s(0.0, 0.0);
    for (int c = 0; c < channels_; ++c) s += cur_spec_[static_cast<size_t>(f) * channels_ + c];
    z[f] = s;
  }
  z_queue_.push_back(std::move(z));

  std::vector<float> feat_row(feat_row_elems_);
  dsp::feature_frame<float>(cur_spec_.data(), have_prev_ ? prev_spec_.data() : nullptr, bins_,
                            channels_, net_->config.compression_power, net_->config.delta_phase,
                            feat_row.data());
  prev_spec_.swap(cur_spec_);
  have_prev_ = true;

  advance_network(feat_row.data());
  if (rows_fed_ - 1 - off_ >= 0) mask_queue_.emplace_back(mask_row_);

  drain(out);
}

void StreamEngine::drain(std::vector<double>& out) {
  const size_t frame_len = static_cast<size_t>(params_.frame_len);
  const size_t hop = static_cast<size_t>(params_.hop);
  std::vector<std::complex<double>> enhanced(bins_);
  std::vector<double> frame(frame_len);
  while (!mask_queue_.empty() && !z_queue_.empty()) {
    const std::vector<float>& mask = mask_queue_.front();
    const std::vector<std::complex<double>>& z = z_queue_.front();
    for (int f = 0; f < bins_; ++f) enhanced[f] = z[f] * static_cast<double>(mask[f]);
    dsp::synthesize_frame(enhanced.data(), window_, params_.fft_size, frame.data());

    const size_t fstart = static_cast<size_t>(synth_count_) * hop;
    const size_t need = fstart + frame_len - emit_pos_;
    while (acc_.size() < need) {
      acc_.push_back(0.0);
      wsq_.push_back(0.0);
    }
    const size_t base = fstart - emit_pos_;
    for (size_t n = 0; n < frame_len; ++n) {
      acc_[base + n] += frame[n];
      wsq_[base + n] += window_[n] * window_[n];
    }
    mask_queue_.pop_front();
    z_queue_.pop_front();
    ++synth_count_;
    emit_up_to(static_cast<size_t>(synth_count_) * hop, out);
  }
}

void StreamEngine::emit_up_to(size_t pos, std::vector<double>& out) {
  if (flushing_ && pos > total_pushed_) pos = total_pushed_;
  while (emit_pos_ < pos && !acc_.empty()) {
    double a = acc_.front();
    double w = wsq_.front();
    acc_.pop_front();
    wsq_.pop_front();
    out.push_back(w >= dsp::kWsqFloor ? a / w : a);
    ++emit_pos_;
  }
}

std::vector<double> StreamEngine::flush() {
  if (finished_) throw std::logic_error("stream: flush after flush");
  finished_ = true;
  flushing_ = true;

  std::vector<double> out;
  if (total_pushed_ == 0) {
    buf_.assign(channels_, {});
    mask_queue_.clear();
    z_queue_.clear();
    return out;
  }
  const int total_frames = dsp::frame_count(total_pushed_, params_);
  if (next_frame_ < total_frames) {
    // The offline transform zero-pads the tail; complete the remaining frames
    // the same way.
    size_t need_len =
        static_cast<size_t>(total_frames - 1) * params_.hop + params_.frame_len - buf_start_;
    for (auto& b : buf_) {
      if (b.size() < need_len) b.resize(need_len, 0.0);
    }
    while (next_frame_ < total_frames) process_frame(out);
  }
  if (pad_after_ > 0) {
    std::vector<float> zero_row(feat_row_elems_, 0.0f);
    for (int j = 0; j < pad_after_; ++j) {
      advance_network(zero_row.data());
      if (rows_fed_ - 1 - off_ >= 0) mask_queue_.emplace_back(mask_row_);
    }
    drain(out);
  }
  emit_up_to(total_pushed_, out);
  buf_.assign(channels_, {});
  acc_.clear();
  wsq_.clear();
  mask_queue_.clear();
  z_queue_.clear();
  return out;
}

size_t algorithmic_latency_samples(const model::ModelConfig& cfg, const dsp::StftParams& params) {
  return static_cast<size_t>(params.frame_len - params.hop) +
         static_cast<size_t>(std::max(cfg.look_ahead_frames, 0)) * params.hop +
         static_cast<size_t>(params.hop);
}

double algorithmic_latency_ms(const model::ModelConfig& cfg, const dsp::StftParams& params) {
  return 1000.0 * static_cast<double>(algorithmic_latency_samples(cfg, params)) /
         params.sample_rate;
}

size_t StreamEngine::algorithmic_latency_samples() const {
  return stream::algorithmic_latency_samples(net_->config, params_);
}

double StreamEngine::algorithmic_latency_ms() const {
  return stream::algorithmic_latency_ms(net_->config, params_);
}

size_t StreamEngine::state_bytes() const {
  size_t b = 0;
  for (const auto& cs : conv_states_) b += (cs.ring.size() + cs.out_row.size()) * sizeof(float);
  for (const auto& ls : lstm_states_) {
    b += (ls.h.size() + ls.c.size() + ls.acts.size() + ls.pre.size() + ls.out_row.size()) *
         sizeof(float);
  }
  for (const auto& fs : fc_states_) b += fs.out_row.size() * sizeof(float);
  b += mask_row_.size() * sizeof(float);
  b += (prev_spec_.size() + cur_spec_.size()) * sizeof(std::complex<double>);
  for (const auto& z : z_queue_) b += z.size() * sizeof(std::complex<double>);
  for (const auto& m : mask_queue_) b += m.size() * sizeof(float);
  for (const auto& c : buf_) b += c.size() * sizeof(double);
  b += (acc_.size() + wsq_.size()) * sizeof(double);
  return b;
}

}  // namespace maskstream::stream
