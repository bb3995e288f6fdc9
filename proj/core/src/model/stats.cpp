#include "maskstream/model/stats.hpp"

#include "maskstream/nn/accounting.hpp"
#include "maskstream/stream/engine.hpp"

namespace maskstream::model {

ModelStats model_stats(const ModelConfig& cfg, const dsp::StftParams& stft) {
  validate_model_config(cfg);
  const int bins = stft.fft_size / 2 + 1;
  ModelStats st;

  const auto stack = conv_stack(cfg.conv_config, cfg.causal);
  int ch = cfg.feature_channels();
  for (const auto& spec : stack) {
    st.param_count += nn::conv_params(spec, ch);
    st.ops_per_frame += nn::conv_ops_per_frame(spec, ch, bins);
    ch = spec.filters;
  }
  auto [past, fut] = nn::conv_stack_receptive_field(stack);
  st.past_context_frames = past;
  st.future_context_frames = fut;

  int dim = bins * ch;  // flatten is free
  const int dirs = cfg.causal ? 1 : 2;
  for (int i = 0; i < cfg.blstm_depth; ++i) {
    const int out_dim = cfg.blstm_width * dirs;
    st.param_count += dirs * nn::lstm_dir_params(dim, cfg.blstm_width);
    st.ops_per_frame += dirs * nn::lstm_dir_ops_per_frame(dim, cfg.blstm_width);
    if (dim != out_dim) {  // residual projection, no bias
      st.param_count += static_cast<long long>(dim) * out_dim;
      st.ops_per_frame += static_cast<double>(dim) * out_dim;
    }
    dim = out_dim;
  }
  for (int i = 0; i < cfg.fc_depth; ++i) {
    st.param_count += nn::dense_params(dim, cfg.fc_width);
    st.ops_per_frame += nn::dense_ops_per_frame(dim, cfg.fc_width);
    dim = cfg.fc_width;
  }
  st.param_count += nn::dense_params(dim, bins);
  st.ops_per_frame += nn::dense_ops_per_frame(dim, bins);

  const double frame_rate =
      static_cast<double>(stft.sample_rate) / static_cast<double>(stft.hop);
  st.ops_per_audio_second = st.ops_per_frame * frame_rate;
  st.latency_samples = stream::algorithmic_latency_samples(cfg, stft);
  st.latency_ms = stream::algorithmic_latency_ms(cfg, stft);
  return st;
}

}  // namespace maskstream::model
