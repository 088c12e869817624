#include "rppl/nn/model.hpp"

#include <cmath>

#include "rppl/rng.hpp"

namespace rppl::nn {

void ModelConfig::validate() const {
  if (in_channels < 1 || in_height < 1 || in_width < 1)
    throw ConfigError("model input shape must be positive");
  if (blocks.empty()) throw ConfigError("model needs at least one conv block");
  int h = in_height, w = in_width;
  for (size_t i = 0; i < blocks.size(); ++i) {
    const auto& b = blocks[i];
    if (b.out_channels < 1 || b.kernel_h < 1 || b.kernel_w < 1 || b.stride < 1 || b.pad < 0)
      throw ConfigError("conv block " + std::to_string(i) + " has invalid fields");
    h = conv_out_dim(h, b.kernel_h, b.stride, b.pad);
    w = conv_out_dim(w, b.kernel_w, b.stride, b.pad);
    if (h < 2 || w < 2)
      throw ConfigError("conv block " + std::to_string(i) + " output too small to pool (" +
                        std::to_string(h) + "x" + std::to_string(w) + ")");
    h /= 2;
    w /= 2;
  }
  for (int d : dense_hidden)
    if (d < 1) throw ConfigError("dense widths must be positive");
  if (!(out_lo_db < out_hi_db)) throw ConfigError("output range must satisfy lo < hi");
}

ModelConfig ModelConfig::defaults(int height, int width) {
  ModelConfig cfg;
  cfg.in_height = height;
  cfg.in_width = width;
  return cfg;
}

std::vector<std::pair<std::string, std::vector<int>>> parameter_shapes(const ModelConfig& cfg) {
  std::vector<std::pair<std::string, std::vector<int>>> out;
  int channels = cfg.in_channels;
  for (size_t i = 0; i < cfg.blocks.size(); ++i) {
    const auto& b = cfg.blocks[i];
    out.emplace_back(CnnModel::conv_name(i, "weight"),
                     std::vector<int>{b.out_channels, channels, b.kernel_h, b.kernel_w});
    out.emplace_back(CnnModel::conv_name(i, "bias"), std::vector<int>{b.out_channels});
    channels = b.out_channels;
  }
  int features = channels;  // after global average pooling
  for (size_t d = 0; d < cfg.dense_hidden.size(); ++d) {
    out.emplace_back(CnnModel::dense_name(d, "weight"), std::vector<int>{cfg.dense_hidden[d], features});
    out.emplace_back(CnnModel::dense_name(d, "bias"), std::vector<int>{cfg.dense_hidden[d]});
    features = cfg.dense_hidden[d];
  }
  out.emplace_back("out.weight", std::vector<int>{1, features});
  out.emplace_back("out.bias", std::vector<int>{1});
  return out;
}

ModelParams init_params(const ModelConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  ModelParams params;
  params.init = InitRecord{"fan_in_uniform", seed};
  Rng rng(derive_seed(seed, "init"));

  for (const auto& [name, shape] : parameter_shapes(cfg)) {
    Tensor t(shape);
    // fan-in: product of all dims but the first (bias reuses its weight's
    // fan-in via the preceding tensor; recompute from shape instead)
    size_t fan_in = 1;
    if (shape.size() > 1) {
      for (size_t d = 1; d < shape.size(); ++d) fan_in *= static_cast<size_t>(shape[d]);
    } else {
      // bias tensors follow their weight in the list
      const auto& w = params.tensors.back().second;
      fan_in = w.numel() / static_cast<size_t>(w.shape[0]);
    }
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (auto& x : t.v) x = static_cast<float>(rng.uniform(-bound, bound));
    params.tensors.emplace_back(name, std::move(t));
  }
  return params;
}

}  // namespace rppl::nn
