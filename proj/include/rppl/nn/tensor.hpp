#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include "rppl/errors.hpp"

namespace rppl::nn {

/// Dense row-major tensor. The shipped arithmetic type is float; the double
/// instantiation exists so tests can run the identical code path at higher
/// precision (finite-difference gradient checks).
template <class T>
struct TensorT {
  std::vector<int> shape;
  std::vector<T> v;

  TensorT() = default;
  explicit TensorT(std::vector<int> s) : shape(std::move(s)) {
    v.assign(numel_of(shape), T(0));
  }
  TensorT(std::vector<int> s, std::vector<T> values) : shape(std::move(s)), v(std::move(values)) {
    if (v.size() != numel_of(shape)) throw DomainError("tensor value count does not match shape");
  }

  static size_t numel_of(const std::vector<int>& s) {
    size_t n = 1;
    for (int d : s) {
      if (d < 0) throw DomainError("negative tensor dimension");
      n *= static_cast<size_t>(d);
    }
    return n;
  }

  size_t numel() const { return v.size(); }
  T* data() { return v.data(); }
  const T* data() const { return v.data(); }

  T& operator[](size_t i) { return v[i]; }
  const T& operator[](size_t i) const { return v[i]; }

  // [C,H,W] accessor
  T& at3(int c, int h, int w) {
    return v[(static_cast<size_t>(c) * shape[1] + h) * shape[2] + w];
  }
  const T& at3(int c, int h, int w) const {
    return v[(static_cast<size_t>(c) * shape[1] + h) * shape[2] + w];
  }

  bool same_shape(const TensorT& o) const { return shape == o.shape; }

  bool all_finite() const {
    for (const T& x : v)
      if (!std::isfinite(static_cast<double>(x))) return false;
    return true;
  }

  template <class U>
  TensorT<U> cast() const {
    TensorT<U> out(shape);
    for (size_t i = 0; i < v.size(); ++i) out.v[i] = static_cast<U>(v[i]);
    return out;
  }
};

using Tensor = TensorT<float>;

}  // namespace rppl::nn
