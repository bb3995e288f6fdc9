#pragma once

#include <stdexcept>

#include "maskstream/nn/layers.hpp"
#include "maskstream/rng.hpp"

namespace maskstream::nn {

// Dilated 2-D convolution over [frame][bin][channel] tensors with same-size
// output and a ReLU after the bias. Time padding is causal or centered
// (left-biased when the extent is odd); frequency padding is centered.
template <typename T>
struct Conv2d {
  ConvLayerSpec spec;
  int in_channels = 0;
  Tensor<T> w;  // [t_width][f_width][ci][co]
  Tensor<T> b;  // [co]
  Tensor<T> gw, gb;

  int t_extent() const { return (spec.t_width - 1) * spec.t_dilation; }
  int f_extent() const { return (spec.f_width - 1) * spec.f_dilation; }
  int pad_before_t() const {
    int e = t_extent();
    return spec.padding == PaddingMode::Causal ? e : e - e / 2;
  }
  int pad_before_f() const {
    int e = f_extent();
    return e - e / 2;
  }

  void init(const ConvLayerSpec& s, int ci, Rng& rng) {
    if (s.filters <= 0 || s.t_width <= 0 || s.f_width <= 0 || s.t_dilation <= 0 ||
        s.f_dilation <= 0 || ci <= 0) {
      throw std::invalid_argument("conv2d: nonpositive layer dimension");
    }
    spec = s;
    in_channels = ci;
    w.resize({s.t_width, s.f_width, ci, s.filters});
    b.resize({s.filters});
    gw.resize(w.shape);
    gb.resize(b.shape);
    double fan_in = static_cast<double>(s.t_width) * s.f_width * ci;
    double fan_out = static_cast<double>(s.t_width) * s.f_width * s.filters;
    double limit = std::sqrt(6.0 / (fan_in + fan_out));
    for (auto& x : w.v) x = static_cast<T>(rng.uniform(-limit, limit));
  }

  // One output frame. fetch(kt) returns the input frame ([F][ci]) feeding tap
  // kt, or nullptr for zero padding. The tap accumulation order is fixed so
  // the streaming path reproduces the offline path bit for bit.
  template <typename Fetch>
  void forward_frame(Fetch&& fetch, int f_n, T* out) const {
    const int co_n = spec.filters;
    for (int f = 0; f < f_n; ++f) {
      T* out_fc = out + static_cast<size_t>(f) * co_n;
      for (int co = 0; co < co_n; ++co) out_fc[co] = b.at(co);
    }
    const int pf = pad_before_f();
    for (int kt = 0; kt < spec.t_width; ++kt) {
      const T* in_t = fetch(kt);
      if (in_t == nullptr) continue;
      for (int f = 0; f < f_n; ++f) {
        T* out_fc = out + static_cast<size_t>(f) * co_n;
        for (int kf = 0; kf < spec.f_width; ++kf) {
          int fi = f + kf * spec.f_dilation - pf;
          if (fi < 0 || fi >= f_n) continue;
          const T* in_fc = in_t + static_cast<size_t>(fi) * in_channels;
          const T* wp = w.data() + ((static_cast<size_t>(kt) * spec.f_width + kf) *
                                    in_channels) * co_n;
          for (int ci = 0; ci < in_channels; ++ci) {
            const T x = in_fc[ci];
            const T* wr = wp + static_cast<size_t>(ci) * co_n;
            for (int co = 0; co < co_n; ++co) out_fc[co] += x * wr[co];
          }
        }
      }
    }
    const size_t n = static_cast<size_t>(f_n) * co_n;
    for (size_t i = 0; i < n; ++i) {
      if (out[i] < T(0)) out[i] = T(0);
    }
  }

  // x: [T][F][ci] -> [T][F][filters]
  Tensor<T> forward(const Tensor<T>& x) const {
    if (x.rank() != 3 || x.dim(2) != in_channels) {
      throw std::invalid_argument("conv2d: input channel mismatch");
    }
    const int t_n = x.dim(0), f_n = x.dim(1);
    Tensor<T> y({t_n, f_n, spec.filters});
    const int pt = pad_before_t();
    for (int t = 0; t < t_n; ++t) {
      auto fetch = [&](int kt) -> const T* {
        int ti = t + kt * spec.t_dilation - pt;
        return (ti < 0 || ti >= t_n) ? nullptr : x.row(ti);
      };
      forward_frame(fetch, f_n, y.row(t));
    }
    return y;
  }

  // Accumulates gw/gb and returns the input gradient. y is the forward output
  // (post-ReLU), used to gate the activation.
  Tensor<T> backward(const Tensor<T>& x, const Tensor<T>& y, const Tensor<T>& gy) {
    const int t_n = x.dim(0), f_n = x.dim(1), co_n = spec.filters;
    Tensor<T> gx(x.shape);
    const int pt = pad_before_t(), pf = pad_before_f();
    std::vector<T> g(static_cast<size_t>(f_n) * co_n);
    for (int t = 0; t < t_n; ++t) {
      const T* yt = y.row(t);
      const T* gyt = gy.row(t);
      for (size_t i = 0; i < g.size(); ++i) g[i] = yt[i] > T(0) ? gyt[i] : T(0);
      for (int f = 0; f < f_n; ++f) {
        const T* gfc = g.data() + static_cast<size_t>(f) * co_n;
        for (int co = 0; co < co_n; ++co) gb.at(co) += gfc[co];
      }
      for (int kt = 0; kt < spec.t_width; ++kt) {
        int ti = t + kt * spec.t_dilation - pt;
        if (ti < 0 || ti >= t_n) continue;
        const T* xt = x.row(ti);
        T* gxt = gx.row(ti);
        for (int f = 0; f < f_n; ++f) {
          const T* gfc = g.data() + static_cast<size_t>(f) * co_n;
          for (int kf = 0; kf < spec.f_width; ++kf) {
            int fi = f + kf * spec.f_dilation - pf;
            if (fi < 0 || fi >= f_n) continue;
            const T* x_fc = xt + static_cast<size_t>(fi) * in_channels;
            T* gx_fc = gxt + static_cast<size_t>(fi) * in_channels;
            T* gwp = gw.data() + ((static_cast<size_t>(kt) * spec.f_width + kf) *
                                  in_channels) * co_n;
            const T* wp = w.data() + ((static_cast<size_t>(kt) * spec.f_width + kf) *
                                      in_channels) * co_n;
            for (int ci = 0; ci < in_channels; ++ci) {
              const T xv = x_fc[ci];
              T* gwr = gwp + static_cast<size_t>(ci) * co_n;
              const T* wr = wp + static_cast<size_t>(ci) * co_n;
              T acc = T(0);
              for (int co = 0; co < co_n; ++co) {
                gwr[co] += xv * gfc[co];
                acc += wr[co] * gfc[co];
              }
              gx_fc[ci] += acc;
            }
          }
        }
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
