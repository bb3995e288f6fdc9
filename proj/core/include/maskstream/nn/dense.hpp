#pragma once

#include <stdexcept>

#include "maskstream/nn/layers.hpp"
#include "maskstream/rng.hpp"

namespace maskstream::nn {

template <typename T>
struct Dense {
  DenseLayerSpec spec;
  int in_dim = 0;
  Tensor<T> w;  // [in_dim][width]
  Tensor<T> b;  // [width]
  Tensor<T> gw, gb;

  void init(const DenseLayerSpec& s, int d, Rng& rng) {
    if (s.width <= 0 || d <= 0) throw std::invalid_argument("dense: nonpositive dimension");
    spec = s;
    in_dim = d;
    w.resize({d, s.width});
    b.resize({s.width});
    gw.resize(w.shape);
    gb.resize(b.shape);
    double limit = std::sqrt(6.0 / (d + s.width));
    for (auto& x : w.v) x = static_cast<T>(rng.uniform(-limit, limit));
  }

  void forward_frame(const T* x, T* y) const {
    const int w_n = spec.width;
    for (int j = 0; j < w_n; ++j) y[j] = b.at(j);
    for (int d = 0; d < in_dim; ++d) {
      const T xv = x[d];
      const T* wr = w.row(d);
      for (int j = 0; j < w_n; ++j) y[j] += xv * wr[j];
    }
    if (spec.activation == Activation::Relu) {
      for (int j = 0; j < w_n; ++j) {
        if (y[j] < T(0)) y[j] = T(0);
      }
    } else {
      for (int j = 0; j < w_n; ++j) y[j] = sigmoid(y[j]);
    }
  }

  Tensor<T> forward(const Tensor<T>& x) const {
    if (x.rank() != 2 || x.dim(1) != in_dim) {
      throw std::invalid_argument("dense: input width mismatch");
    }
    Tensor<T> y({x.dim(0), spec.width});
    for (int t = 0; t < x.dim(0); ++t) forward_frame(x.row(t), y.row(t));
    return y;
  }

  Tensor<T> backward(const Tensor<T>& x, const Tensor<T>& y, const Tensor<T>& gy) {
    const int t_n = x.dim(0), w_n = spec.width;
    Tensor<T> gx(x.shape);
    std::vector<T> da(w_n);
    for (int t = 0; t < t_n; ++t) {
      const T* yt = y.row(t);
      const T* gyt = gy.row(t);
      if (spec.activation == Activation::Relu) {
        for (int j = 0; j < w_n; ++j) da[j] = yt[j] > T(0) ? gyt[j] : T(0);
      } else {
        for (int j = 0; j < w_n; ++j) da[j] = gyt[j] * yt[j] * (T(1) - yt[j]);
      }
      for (int j = 0; j < w_n; ++j) gb.at(j) += da[j];
      const T* xt = x.row(t);
      T* gxt = gx.row(t);
      for (int d = 0; d < in_dim; ++d) {
        const T* wr = w.row(d);
        T* gwr = gw.row(d);
        const T xv = xt[d];
        T acc = T(0);
        for (int j = 0; j < w_n; ++j) {
          gwr[j] += xv * da[j];
          acc += wr[j] * da[j];
        }
        gxt[d] = acc;
      }
    }
    return gx;
  }

  void zero_grads() {
    gw.zero();
    gb.zero();
  }

  void collect(const std::string& prefix, std::vector<ParamRef<T>>& out) {
    out.push_back({prefix + ".w", &w, &gw});
    out.push_back({prefix + ".b", &b, &gb});
  }
};

}  // namespace maskstream::nn
