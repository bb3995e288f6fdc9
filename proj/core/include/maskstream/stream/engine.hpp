#pragma once

#include <complex>
#include <cstddef>
#include <deque>
#include <vector>

#include "maskstream/dsp/stft.hpp"
#include "maskstream/model/network.hpp"

namespace maskstream::stream {

// Input samples that must be consumed before a given output sample is final:
// (frame_len - hop) to fill the first analysis frame, the positive look-ahead
// in hops, plus one hop of overlap-add finalization. Negative look-ahead does
// not reduce the framing latency.
size_t algorithmic_latency_samples(const model::ModelConfig& cfg, const dsp::StftParams& params);
double algorithmic_latency_ms(const model::ModelConfig& cfg, const dsp::StftParams& params);

// Frame-by-frame enhancement with the same arithmetic as the offline path:
// feeding any chunking of a signal through push() and then flush() yields
// bit-for-bit the samples enhance_offline produces. Requires a causal model.
// The engine borrows the network; the caller keeps it alive.
class StreamEngine {
 public:
  StreamEngine(const model::Network<float>& net, const dsp::StftParams& params = {});

  // Appends a chunk ([channels][n], any n >= 0) and returns whatever enhanced
  // samples became final.
  std::vector<double> push(const std::vector<std::vector<double>>& chunk);

  // Ends the stream and returns the remaining samples; the concatenated
  // output has exactly as many samples as were pushed. No further calls are
  // allowed afterwards.
  std::vector<double> flush();

  // Input samples that must be seen before output sample 0 can be produced:
  // one analysis frame plus the mask look-ahead.
  size_t algorithmic_latency_samples() const;
  double algorithmic_latency_ms() const;

  // Live per-stream state (buffers, recurrent state, queues); excludes the
  // network weights.
  size_t state_bytes() const;

  size_t samples_pushed() const { return total_pushed_; }
  bool finished() const { return finished_; }

 private:
  struct ConvState {
    const nn::Conv2d<float>* layer = nullptr;
    int ring_rows = 0;
    size_t row_elems = 0;
    std::vector<float> ring;
    std::vector<float> out_row;
  };
  struct LstmState {
    const nn::LstmBlock<float>* block = nullptr;
    std::vector<float> h, c, acts, pre, out_row;
  };
  struct FcState {
    const nn::Dense<float>* layer = nullptr;
    std::vector<float> out_row;
  };

  // Runs one padded feature row through the network; result in mask_row_.
  void advance_network(const float* feat_row);
  void process_frame(std::vector<double>& out);
  void drain(std::vector<double>& out);
  void emit_up_to(size_t pos, std::vector<double>& out);

  const model::Network<float>* net_ = nullptr;
  dsp::StftParams params_;
  std::vector<double> window_;
  int bins_ = 0;
  int channels_ = 0;
  int off_ = 0;        // network-output row of the mask for audio frame 0
  int pad_after_ = 0;  // trailing zero feature rows fed at flush
  size_t feat_row_elems_ = 0;

  std::vector<ConvState> conv_states_;
  std::vector<LstmState> lstm_states_;
  std::vector<FcState> fc_states_;
  std::vector<float> mask_row_;
  long long rows_fed_ = 0;

  std::vector<std::vector<double>> buf_;  // unconsumed input, per channel
  size_t buf_start_ = 0;                  // global position of buf_[c][0]
  size_t total_pushed_ = 0;
  long long next_frame_ = 0;

  std::vector<std::complex<double>> prev_spec_, cur_spec_;  // [f][c]
  bool have_prev_ = false;

  std::deque<std::vector<std::complex<double>>> z_queue_;  // channel sums
  std::deque<std::vector<float>> mask_queue_;
  long long synth_count_ = 0;

  std::deque<double> acc_, wsq_;  // overlap-add tail from emit_pos_ on
  size_t emit_pos_ = 0;

  bool flushing_ = false;
  bool finished_ = false;
};

}  // namespace maskstream::stream
