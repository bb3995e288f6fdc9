#pragma once

#include <stdexcept>

#include "maskstream/nn/layers.hpp"
#include "maskstream/rng.hpp"

namespace maskstream::nn {

// One direction of an LSTM. Gate order in the packed 4W dimension: input,
// forget, candidate, output. Forget-gate bias starts at 1.
template <typename T>
struct LstmDir {
  int in_dim = 0;
  int width = 0;
  Tensor<T> wx;  // [in_dim][4W]
  Tensor<T> wh;  // [W][4W]
  Tensor<T> b;   // [4W]
  Tensor<T> gwx, gwh, gb;

  void init(int d, int w_n, Rng& rng) {
    in_dim = d;
    width = w_n;
    wx.resize({d, 4 * w_n});
    wh.resize({w_n, 4 * w_n});
    b.resize({4 * w_n});
    gwx.resize(wx.shape);
    gwh.resize(wh.shape);
    gb.resize(b.shape);
    double limit = 1.0 / std::sqrt(static_cast<double>(w_n));
    for (auto& x : wx.v) x = static_cast<T>(rng.uniform(-limit, limit));
    for (auto& x : wh.v) x = static_cast<T>(rng.uniform(-limit, limit));
    for (int k = 0; k < w_n; ++k) b.at(w_n + k) = T(1);
  }

  // acts stores post-activation gates [i f g o] for backward; pre is a 4W
  // scratch buffer supplied by the caller.
  void step(const T* x, const T* h_prev, const T* c_prev, T* h_out, T* c_out, T* acts,
            T* pre) const {
    const int w_n = width;
    const int g_n = 4 * w_n;
    for (int j = 0; j < g_n; ++j) pre[j] = b.at(j);
    for (int d = 0; d < in_dim; ++d) {
      const T xv = x[d];
      const T* wr = wx.row(d);
      for (int j = 0; j < g_n; ++j) pre[j] += xv * wr[j];
    }
    for (int k = 0; k < w_n; ++k) {
      const T hv = h_prev[k];
      const T* wr = wh.row(k);
      for (int j = 0; j < g_n; ++j) pre[j] += hv * wr[j];
    }
    for (int k = 0; k < w_n; ++k) {
      T gi = sigmoid(pre[k]);
      T gf = sigmoid(pre[w_n + k]);
      T gg = std::tanh(pre[2 * w_n + k]);
      T go = sigmoid(pre[3 * w_n + k]);
      T c = gf * c_prev[k] + gi * gg;
      c_out[k] = c;
      h_out[k] = go * std::tanh(c);
      acts[k] = gi;
      acts[w_n + k] = gf;
      acts[2 * w_n + k] = gg;
      acts[3 * w_n + k] = go;
    }
  }

  void zero_grads() {
    gwx.zero();
    gwh.zero();
    gb.zero();
  }
};

// Recurrent layer with optional backward direction and a residual bypass
// (identity when shapes agree, otherwise a learned projection without bias).
template <typename T>
struct LstmBlock {
  RecurrentLayerSpec spec;
  int in_dim = 0;
  LstmDir<T> fwd, bwd;
  Tensor<T> proj_w, gproj_w;  // [in_dim][out_dim]
  bool has_proj = false;

  int out_dim() const { return spec.width * (spec.bidirectional ? 2 : 1); }

  void init(const RecurrentLayerSpec& s, int d, Rng& rng) {
    if (s.width <= 0 || d <= 0) throw std::invalid_argument("lstm: nonpositive dimension");
    spec = s;
    in_dim = d;
    fwd.init(d, s.width, rng);
    if (s.bidirectional) bwd.init(d, s.width, rng);
    has_proj = spec.residual && in_dim != out_dim();
    if (has_proj) {
      proj_w.resize({in_dim, out_dim()});
      gproj_w.resize(proj_w.shape);
      double limit = std::sqrt(6.0 / (in_dim + out_dim()));
      for (auto& x : proj_w.v) x = static_cast<T>(rng.uniform(-limit, limit));
    }
  }

  struct Cache {
    Tensor<T> acts_f, c_f, h_f;  // [T][4W] / [T][W] / [T][W]
    Tensor<T> acts_b, c_b, h_b;
  };

  Tensor<T> forward(const Tensor<T>& x, Cache* cache) const {
    if (x.rank() != 2 || x.dim(1) != in_dim) {
      throw std::invalid_argument("lstm: input width mismatch");
    }
    const int t_n = x.dim(0), w_n = spec.width;
    Tensor<T> out({t_n, out_dim()});
    Cache local;
    Cache& cc = cache != nullptr ? *cache : local;
    cc.acts_f.resize({t_n, 4 * w_n});
    cc.c_f.resize({t_n, w_n});
    cc.h_f.resize({t_n, w_n});
    std::vector<T> h0(w_n, T(0)), c0(w_n, T(0)), pre(4 * w_n);
    for (int t = 0; t < t_n; ++t) {
      const T* hp = t > 0 ? cc.h_f.row(t - 1) : h0.data();
      const T* cp = t > 0 ? cc.c_f.row(t - 1) : c0.data();
      fwd.step(x.row(t), hp, cp, cc.h_f.row(t), cc.c_f.row(t), cc.acts_f.row(t), pre.data());
      T* o = out.row(t);
      const T* h = cc.h_f.row(t);
      for (int k = 0; k < w_n; ++k) o[k] = h[k];
    }
    if (spec.bidirectional) {
      cc.acts_b.resize({t_n, 4 * w_n});
      cc.c_b.resize({t_n, w_n});
      cc.h_b.resize({t_n, w_n});
      for (int t = t_n - 1; t >= 0; --t) {
        const T* hp = t < t_n - 1 ? cc.h_b.row(t + 1) : h0.data();
        const T* cp = t < t_n - 1 ? cc.c_b.row(t + 1) : c0.data();
        bwd.step(x.row(t), hp, cp, cc.h_b.row(t), cc.c_b.row(t), cc.acts_b.row(t),
                 pre.data());
        T* o = out.row(t) + w_n;
        const T* h = cc.h_b.row(t);
        for (int k = 0; k < w_n; ++k) o[k] = h[k];
      }
    }
    if (spec.residual) {
      if (has_proj) {
        const int od = out_dim();
        for (int t = 0; t < t_n; ++t) {
          const T* xt = x.row(t);
          T* o = out.row(t);
          for (int d = 0; d < in_dim; ++d) {
            const T xv = xt[d];
            const T* pr = proj_w.row(d);
            for (int j = 0; j < od; ++j) o[j] += xv * pr[j];
          }
        }
      } else {
        for (int t = 0; t < t_n; ++t) {
          const T* xt = x.row(t);
          T* o = out.row(t);
          for (int d = 0; d < in_dim; ++d) o[d] += xt[d];
        }
      }
    }
    return out;
  }

  Tensor<T> backward(const Tensor<T>& x, const Cache& cc, const Tensor<T>& gy) {
    const int t_n = x.dim(0), w_n = spec.width, od = out_dim();
    Tensor<T> gx(x.shape);
    if (spec.residual) {
      if (has_proj) {
        for (int t = 0; t < t_n; ++t) {
          const T* gyt = gy.row(t);
          const T* xt = x.row(t);
          T* gxt = gx.row(t);
          for (int d = 0; d < in_dim; ++d) {
            const T* pr = proj_w.row(d);
            T* gpr = gproj_w.row(d);
            T acc = T(0);
            for (int j = 0; j < od; ++j) {
              gpr[j] += xt[d] * gyt[j];
              acc += pr[j] * gyt[j];
            }
            gxt[d] += acc;
          }
        }
      } else {
        for (int t = 0; t < t_n; ++t) {
          const T* gyt = gy.row(t);
          T* gxt = gx.row(t);
          for (int d = 0; d < in_dim; ++d) gxt[d] += gyt[d];
        }
      }
    }
    backward_dir(fwd, x, cc.acts_f, cc.c_f, cc.h_f, gy, 0, false, gx);
    if (spec.bidirectional) {
      backward_dir(bwd, x, cc.acts_b, cc.c_b, cc.h_b, gy, w_n, true, gx);
    }
    return gx;
  }

  void zero_grads() {
    fwd.zero_grads();
    if (spec.bidirectional) bwd.zero_grads();
    if (has_proj) gproj_w.zero();
  }

  void collect(const std::string& prefix, std::vector<ParamRef<T>>& out) {
    out.push_back({prefix + ".fwd.wx", &fwd.wx, &fwd.gwx});
    out.push_back({prefix + ".fwd.wh", &fwd.wh, &fwd.gwh});
    out.push_back({prefix + ".fwd.b", &fwd.b, &fwd.gb});
    if (spec.bidirectional) {
      out.push_back({prefix + ".bwd.wx", &bwd.wx, &bwd.gwx});
      out.push_back({prefix + ".bwd.wh", &bwd.wh, &bwd.gwh});
      out.push_back({prefix + ".bwd.b", &bwd.b, &bwd.gb});
    }
    if (has_proj) out.push_back({prefix + ".proj.w", &proj_w, &gproj_w});
  }

 private:
  // Standard BPTT for one direction. reversed=true walks time forward (the
  // reverse of that direction's processing order).
  void backward_dir(LstmDir<T>& dir, const Tensor<T>& x, const Tensor<T>& acts,
                    const Tensor<T>& c, const Tensor<T>& h, const Tensor<T>& gy,
                    int out_col, bool reversed, Tensor<T>& gx) {
    const int t_n = x.dim(0), w_n = dir.width, g_n = 4 * w_n;
    std::vector<T> dh_carry(w_n, T(0)), dc_carry(w_n, T(0)), da(g_n), zeros(w_n, T(0));
    for (int step = t_n - 1; step >= 0; --step) {
      int t = reversed ? t_n - 1 - step : step;
      int t_prev = reversed ? t + 1 : t - 1;
      bool has_prev = reversed ? (t_prev <= t_n - 1) : (t_prev >= 0);
      const T* c_prev = has_prev ? c.row(t_prev) : zeros.data();
      const T* h_prev = has_prev ? h.row(t_prev) : zeros.data();
      const T* a = acts.row(t);
      const T* ct = c.row(t);
      const T* gyt = gy.row(t) + out_col;
      for (int k = 0; k < w_n; ++k) {
        T gi = a[k], gf = a[w_n + k], gg = a[2 * w_n + k], go = a[3 * w_n + k];
        T tc = std::tanh(ct[k]);
        T dh = gyt[k] + dh_carry[k];
        T dob = dh * tc;
        T dc = dh * go * (T(1) - tc * tc) + dc_carry[k];
        T di = dc * gg;
        T dg = dc * gi;
        T df = dc * c_prev[k];
        dc_carry[k] = dc * gf;
        da[k] = di * gi * (T(1) - gi);
        da[w_n + k] = df * gf * (T(1) - gf);
        da[2 * w_n + k] = dg * (T(1) - gg * gg);
        da[3 * w_n + k] = dob * go * (T(1) - go);
      }
      for (int j = 0; j < g_n; ++j) dir.gb.at(j) += da[j];
      const T* xt = x.row(t);
      T* gxt = gx.row(t);
      for (int d = 0; d < dir.in_dim; ++d) {
        const T* wr = dir.wx.row(d);
        T* gwr = dir.gwx.row(d);
        const T xv = xt[d];
        T acc = T(0);
        for (int j = 0; j < g_n; ++j) {
          gwr[j] += xv * da[j];
          acc += wr[j] * da[j];
        }
        gxt[d] += acc;
      }
      for (int k = 0; k < w_n; ++k) {
        const T* wr = dir.wh.row(k);
        T* gwr = dir.gwh.row(k);
        const T hv = h_prev[k];
        T acc = T(0);
        for (int j = 0; j < g_n; ++j) {
          gwr[j] += hv * da[j];
          acc += wr[j] * da[j];
        }
        dh_carry[k] = acc;
      }
      if (!has_prev) continue;
      // dh_carry/dc_carry feed the previous step; nothing else to do here.
    }
  }
};

}  // namespace maskstream::nn
