#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace maskstream::nn {

// Dense row-major tensor, rank 1-4. The scalar type doubles as the precision
// mode: float for the production path, double for gradient checking.
template <typename T>
struct Tensor {
  std::vector<int> shape;
  std::vector<T> v;

  Tensor() = default;
  explicit Tensor(std::vector<int> s) { resize(std::move(s)); }

  void resize(std::vector<int> s) {
    size_t n = 1;
    for (int d : s) {
      if (d < 0) throw std::invalid_argument("tensor: negative dimension");
      n *= static_cast<size_t>(d);
    }
    shape = std::move(s);
    v.assign(n, T(0));
  }

  int rank() const { return static_cast<int>(shape.size()); }
  int dim(int i) const { return shape[static_cast<size_t>(i)]; }
  size_t numel() const { return v.size(); }
  T* data() { return v.data(); }
  const T* data() const { return v.data(); }
  void zero() { std::fill(v.begin(), v.end(), T(0)); }

  T& at(int i) { return v[static_cast<size_t>(i)]; }
  const T& at(int i) const { return v[static_cast<size_t>(i)]; }
  T& at(int i, int j) { return v[static_cast<size_t>(i) * dim(1) + j]; }
  const T& at(int i, int j) const { return v[static_cast<size_t>(i) * dim(1) + j]; }
  T& at(int i, int j, int k) {
    return v[(static_cast<size_t>(i) * dim(1) + j) * dim(2) + k];
  }
  const T& at(int i, int j, int k) const {
    return v[(static_cast<size_t>(i) * dim(1) + j) * dim(2) + k];
  }
  T& at(int i, int j, int k, int l) {
    return v[((static_cast<size_t>(i) * dim(1) + j) * dim(2) + k) * dim(3) + l];
  }
  const T& at(int i, int j, int k, int l) const {
    return v[((static_cast<size_t>(i) * dim(1) + j) * dim(2) + k) * dim(3) + l];
  }

  // Row pointer treating the first dimension as rows.
  T* row(int i) { return v.data() + static_cast<size_t>(i) * (v.size() / dim(0)); }
  const T* row(int i) const {
    return v.data() + static_cast<size_t>(i) * (v.size() / dim(0));
  }

  // Same storage, new shape; element count must match.
  Tensor<T> reshaped(std::vector<int> s) const {
    Tensor<T> out;
    size_t n = 1;
    for (int d : s) n *= static_cast<size_t>(d);
    if (n != v.size()) throw std::invalid_argument("tensor: reshape changes element count");
    out.shape = std::move(s);
    out.v = v;
    return out;
  }

  bool has_nonfinite() const {
    for (T x : v) {
      if (!std::isfinite(static_cast<double>(x))) return true;
    }
    return false;
  }
};

using TensorF = Tensor<float>;
using TensorD = Tensor<double>;

}  // namespace maskstream::nn
