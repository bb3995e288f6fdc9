#pragma once

#include <utility>
#include <vector>

#include "maskstream/nn/layers.hpp"

namespace maskstream::nn {

// Parameter counts.
long long conv_params(const ConvLayerSpec& s, int in_channels);
long long lstm_dir_params(int in_dim, int width);  // 4 * (W * (D + W) + W)
long long dense_params(int in_dim, int width);     // D * W + W

// Multiply-add counts per frame. The conv count follows
// F * C_in * C_out * t_width * f_width; dense counts D * W + W; one LSTM
// direction counts 4 * (W * (D + W) + W); a residual projection counts
// D * out_dim.
double conv_ops_per_frame(const ConvLayerSpec& s, int in_channels, int bins);
double lstm_dir_ops_per_frame(int in_dim, int width);
double dense_ops_per_frame(int in_dim, int width);

// Frames of context on each side of the output frame (past, future).
std::pair<int, int> conv_layer_context(const ConvLayerSpec& s);
std::pair<int, int> conv_stack_receptive_field(const std::vector<ConvLayerSpec>& stack);

}  // namespace maskstream::nn
