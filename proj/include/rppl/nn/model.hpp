#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rppl/nn/tape.hpp"

namespace rppl::nn {

struct ConvBlockConfig {
  int out_channels = 0;
  int kernel_h = 3;
  int kernel_w = 3;
  int stride = 1;
  int pad = 1;

  bool operator==(const ConvBlockConfig&) const = default;
};

/// Architecture of the path loss regressor: conv blocks (each conv -> ReLU
/// -> 2x2 max pool), global average pooling, an optional dense stack and a
/// single linear output mapped affinely to [out_lo_db, out_hi_db].
struct ModelConfig {
  int in_channels = 4;
  int in_height = 256;  // L
  int in_width = 64;    // W
  std::vector<ConvBlockConfig> blocks = {{16}, {32}, {64}, {64}};
  std::vector<int> dense_hidden = {};
  double out_lo_db = 40.0;
  double out_hi_db = 180.0;

  /// Throws ConfigError when the layer shapes do not chain.
  void validate() const;

  /// Default architecture for a given input size.
  static ModelConfig defaults(int height, int width);

  bool operator==(const ModelConfig&) const = default;
};

struct InitRecord {
  std::string scheme = "fan_in_uniform";
  std::uint64_t seed = 0;

  bool operator==(const InitRecord&) const = default;
};

template <class T>
struct ParamsT {
  std::vector<std::pair<std::string, TensorT<T>>> tensors;  // fixed order
  InitRecord init;

  TensorT<T>* find(std::string_view name) {
    for (auto& [n, t] : tensors)
      if (n == name) return &t;
    return nullptr;
  }
  const TensorT<T>* find(std::string_view name) const {
    return const_cast<ParamsT*>(this)->find(name);
  }

  size_t total_values() const {
    size_t n = 0;
    for (const auto& [name, t] : tensors) n += t.numel();
    return n;
  }

  template <class U>
  ParamsT<U> cast() const {
    ParamsT<U> out;
    out.init = init;
    out.tensors.reserve(tensors.size());
    for (const auto& [name, t] : tensors) out.tensors.emplace_back(name, t.template cast<U>());
    return out;
  }
};

using ModelParams = ParamsT<float>;

/// Fan-in-scaled uniform init (weights and biases in +-1/sqrt(fan_in)),
/// filled in declaration order from a single derived stream.
ModelParams init_params(const ModelConfig& cfg, std::uint64_t seed);

/// The regressor. Parameters are owned by the model; training code mutates
/// them through params(). All compute is single threaded and deterministic;
/// callers provide any batch-level parallelism.
template <class T>
class CnnModelT {
 public:
  CnnModelT(ModelConfig cfg, ParamsT<T> params) : cfg_(std::move(cfg)), params_(std::move(params)) {
    cfg_.validate();
    check_params_match();
  }

  const ModelConfig& config() const { return cfg_; }
  ParamsT<T>& params() { return params_; }
  const ParamsT<T>& params() const { return params_; }

  /// Stages 0..n_blocks-1 are the conv blocks; stage n_blocks is the head
  /// (GAP + dense stack + output scaling).
  int num_stages() const { return static_cast<int>(cfg_.blocks.size()) + 1; }

  /// Activation entering stage k: runs blocks [0, k) on the input.
  TensorT<T> stage_input(int k, const TensorT<T>& input) const {
    TensorT<T> x = input;
    for (int i = 0; i < k; ++i) x = run_block(i, x);
    return x;
  }

  /// Finish the forward pass from the activation entering stage k.
  T predict_from(int k, const TensorT<T>& staged) const {
    TensorT<T> x = staged;
    for (int i = k; i < static_cast<int>(cfg_.blocks.size()); ++i) x = run_block(i, x);
    x = global_avg_pool_forward(x);
    for (size_t d = 0; d < cfg_.dense_hidden.size(); ++d) {
      x = dense_forward(x, tensor(dense_name(d, "weight")), tensor(dense_name(d, "bias")));
      x = relu_forward(x);
    }
    x = dense_forward(x, tensor("out.weight"), tensor("out.bias"));
    const T z = x[0];
    const T out = static_cast<T>(out_mid()) + static_cast<T>(out_half()) * z;
    if (!std::isfinite(static_cast<double>(out))) throw DomainError("non-finite model prediction");
    return out;
  }

  /// Predicted path loss in dB for a (C,H,W) input.
  T predict(const TensorT<T>& input) const { return predict_from(0, input); }

  /// Differentiable forward pass; returns the scalar dB prediction node.
  typename TapeT<T>::Var forward(TapeT<T>& tape, typename TapeT<T>::Var input) const {
    auto x = input;
    for (size_t i = 0; i < cfg_.blocks.size(); ++i) {
      auto w = tape.param(&tensor(conv_name(i, "weight")));
      auto b = tape.param(&tensor(conv_name(i, "bias")));
      x = tape.maxpool2(tape.relu(tape.conv2d(x, w, b, cfg_.blocks[i].stride, cfg_.blocks[i].pad)));
    }
    x = tape.global_avg_pool(x);
    for (size_t d = 0; d < cfg_.dense_hidden.size(); ++d) {
      auto w = tape.param(&tensor(dense_name(d, "weight")));
      auto b = tape.param(&tensor(dense_name(d, "bias")));
      x = tape.relu(tape.dense(x, w, b));
    }
    x = tape.dense(x, tape.param(&tensor("out.weight")), tape.param(&tensor("out.bias")));
    return tape.affine(x, static_cast<T>(out_half()), static_cast<T>(out_mid()));
  }

  double out_mid() const { return 0.5 * (cfg_.out_lo_db + cfg_.out_hi_db); }
  double out_half() const { return 0.5 * (cfg_.out_hi_db - cfg_.out_lo_db); }

  static std::string conv_name(size_t i, const char* kind) {
    return "conv" + std::to_string(i) + "." + kind;
  }
  static std::string dense_name(size_t i, const char* kind) {
    return "dense" + std::to_string(i) + "." + kind;
  }

 private:
  const TensorT<T>& tensor(const std::string& name) const {
    const TensorT<T>* t = params_.find(name);
    if (!t) throw ConfigError("model parameter '" + name + "' missing");
    return *t;
  }

  TensorT<T> run_block(int i, const TensorT<T>& x) const {
    const auto& blk = cfg_.blocks[i];
    TensorT<T> y = conv2d_forward(x, tensor(conv_name(i, "weight")), tensor(conv_name(i, "bias")),
                                  blk.stride, blk.pad);
    y = relu_forward(y);
    return maxpool2_forward(y);
  }

  void check_params_match() const;

  ModelConfig cfg_;
  ParamsT<T> params_;
};

using CnnModel = CnnModelT<float>;

/// Expected parameter shapes for a config, in declaration order.
std::vector<std::pair<std::string, std::vector<int>>> parameter_shapes(const ModelConfig& cfg);

template <class T>
void CnnModelT<T>::check_params_match() const {
  const auto expected = parameter_shapes(cfg_);
  if (expected.size() != params_.tensors.size())
    throw ConfigError("parameter count does not match model config");
  for (size_t i = 0; i < expected.size(); ++i) {
    if (params_.tensors[i].first != expected[i].first ||
        params_.tensors[i].second.shape != expected[i].second)
      throw ConfigError("parameter '" + params_.tensors[i].first +
                        "' does not match the shape required by the model config");
  }
}

}  // namespace rppl::nn
