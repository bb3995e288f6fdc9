#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "maskstream/model/config.hpp"
#include "maskstream/nn/conv2d.hpp"
#include "maskstream/nn/dense.hpp"
#include "maskstream/nn/lstm.hpp"
#include "maskstream/nn/tensor.hpp"

namespace maskstream::model {

// Mask-predicting network: conv stack over [frame][bin][channel] features,
// frequency-major flatten, recurrent layers with residual bypass
// (bidirectional unless causal), ReLU dense layers, sigmoid mask head.
template <typename T>
struct Network {
  ModelConfig config;
  int bins = 257;
  int feat_channels = 0;
  std::vector<nn::Conv2d<T>> convs;
  std::vector<nn::LstmBlock<T>> lstms;
  std::vector<nn::Dense<T>> fcs;
  nn::Dense<T> head;

  struct Trace {
    nn::Tensor<T> input;
    std::vector<nn::Tensor<T>> conv_out;
    nn::Tensor<T> flat;
    std::vector<nn::Tensor<T>> lstm_out;
    std::vector<typename nn::LstmBlock<T>::Cache> lstm_cache;
    std::vector<nn::Tensor<T>> fc_out;
    nn::Tensor<T> mask;
  };

  static Network build(const ModelConfig& cfg, uint64_t seed, int bins = 257);

  int flat_dim() const;

  // features: [T][bins][feat_channels] -> mask [T][bins] in (0, 1). trace may
  // be null for inference.
  nn::Tensor<T> forward(const nn::Tensor<T>& features, Trace* trace) const;

  // Accumulates parameter gradients; returns d loss / d features.
  nn::Tensor<T> backward(const Trace& trace, const nn::Tensor<T>& gmask);

  std::vector<nn::ParamRef<T>> param_refs();
  void zero_grads();
  long long param_count() const;
};

using NetworkF = Network<float>;
using NetworkD = Network<double>;

void save_network(const std::string& path, Network<float>& net);
Network<float> load_network(const std::string& path);

}  // namespace maskstream::model
