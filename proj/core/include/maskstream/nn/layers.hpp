#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "maskstream/nn/tensor.hpp"

namespace maskstream::nn {

enum class PaddingMode { Centered, Causal };

struct ConvLayerSpec {
  int filters = 0;
  int t_width = 1;
  int f_width = 1;
  int t_dilation = 1;
  int f_dilation = 1;
  PaddingMode padding = PaddingMode::Centered;
};

struct RecurrentLayerSpec {
  int width = 0;
  bool bidirectional = true;
  bool residual = true;
};

enum class Activation { Relu, Sigmoid };

struct DenseLayerSpec {
  int width = 0;
  Activation activation = Activation::Relu;
};

template <typename T>
struct ParamRef {
  std::string name;
  Tensor<T>* value;
  Tensor<T>* grad;
};

template <typename T>
inline T sigmoid(T x) {
  return T(1) / (T(1) + std::exp(-x));
}

}  // namespace maskstream::nn
