#include "maskstream/nn/accounting.hpp"

namespace maskstream::nn {

long long conv_params(const ConvLayerSpec& s, int in_channels) {
  return static_cast<long long>(s.t_width) * s.f_width * in_channels * s.filters + s.filters;
}

long long lstm_dir_params(int in_dim, int width) {
  long long w = width;
  return 4 * (w * (in_dim + w) + w);
}

long long dense_params(int in_dim, int width) {
  return static_cast<long long>(in_dim) * width + width;
}

double conv_ops_per_frame(const ConvLayerSpec& s, int in_channels, int bins) {
  return static_cast<double>(bins) * in_channels * s.filters * s.t_width * s.f_width;
}

double lstm_dir_ops_per_frame(int in_dim, int width) {
  return static_cast<double>(lstm_dir_params(in_dim, width));
}

double dense_ops_per_frame(int in_dim, int width) {
  return static_cast<double>(dense_params(in_dim, width));
}

std::pair<int, int> conv_layer_context(const ConvLayerSpec& s) {
  int e = (s.t_width - 1) * s.t_dilation;
  if (s.padding == PaddingMode::Causal) return {e, 0};
  int before = e - e / 2;
  return {before, e - before};
}

std::pair<int, int> conv_stack_receptive_field(const std::vector<ConvLayerSpec>& stack) {
  int past = 0, future = 0;
  for (const auto& s : stack) {
    auto [p, f] = conv_layer_context(s);
    past += p;
    future += f;
  }
  return {past, future};
}

}  // namespace maskstream::nn
