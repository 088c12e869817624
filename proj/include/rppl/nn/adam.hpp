#pragma once

#include <cmath>
#include <vector>

#include "rppl/nn/model.hpp"

namespace rppl::nn {

/// Adaptive-moment optimizer state: one first/second moment tensor per
/// parameter tensor, in the parameter declaration order.
template <class T>
struct AdamStateT {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  long step_count = 0;
  std::vector<TensorT<T>> m;
  std::vector<TensorT<T>> v;

  static AdamStateT make(const ParamsT<T>& params, double lr) {
    AdamStateT st;
    st.learning_rate = lr;
    st.m.reserve(params.tensors.size());
    st.v.reserve(params.tensors.size());
    for (const auto& [name, t] : params.tensors) {
      st.m.emplace_back(t.shape);
      st.v.emplace_back(t.shape);
    }
    return st;
  }
};

using AdamState = AdamStateT<float>;

/// One bias-corrected update. grads must parallel params.tensors.
template <class T>
void adam_step(ParamsT<T>& params, const std::vector<TensorT<T>>& grads, AdamStateT<T>& st) {
  if (grads.size() != params.tensors.size() || st.m.size() != params.tensors.size())
    throw DomainError("adam_step: parameter/gradient/state count mismatch");
  st.step_count += 1;
  const double c1 = 1.0 - std::pow(st.beta1, static_cast<double>(st.step_count));
  const double c2 = 1.0 - std::pow(st.beta2, static_cast<double>(st.step_count));

  for (size_t i = 0; i < params.tensors.size(); ++i) {
    TensorT<T>& theta = params.tensors[i].second;
    const TensorT<T>& g = grads[i];
    if (!g.same_shape(theta)) throw DomainError("adam_step: gradient shape mismatch");
    TensorT<T>& m = st.m[i];
    TensorT<T>& v = st.v[i];
    for (size_t k = 0; k < theta.numel(); ++k) {
      const double gk = static_cast<double>(g[k]);
      const double mk = st.beta1 * static_cast<double>(m[k]) + (1.0 - st.beta1) * gk;
      const double vk = st.beta2 * static_cast<double>(v[k]) + (1.0 - st.beta2) * gk * gk;
      m[k] = static_cast<T>(mk);
      v[k] = static_cast<T>(vk);
      const double step = st.learning_rate * (mk / c1) / (std::sqrt(vk / c2) + st.epsilon);
      theta[k] = static_cast<T>(static_cast<double>(theta[k]) - step);
    }
  }
}

}  // namespace rppl::nn
