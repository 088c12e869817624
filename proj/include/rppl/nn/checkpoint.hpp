#pragma once

#include <iosfwd>
#include <string>

#include "rppl/nn/model.hpp"

namespace rppl::nn {

struct Checkpoint {
  ModelConfig config;
  ModelParams params;
};

/// Model checkpoint file ("RPNN"): little-endian magic, u16 version, a
/// length-prefixed JSON blob (model config + init record), then per-layer
/// named f32 tensors (name, dims, data). Round-trips bit-exactly.
void save_checkpoint(const Checkpoint& ckpt, std::ostream& out);
void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(std::istream& in);
Checkpoint load_checkpoint_file(const std::string& path);

/// JSON (de)serialization for ModelConfig, shared by checkpoints and
/// experiment configs.
std::string model_config_to_json(const ModelConfig& cfg, const InitRecord& init);
void model_config_from_json(const std::string& text, ModelConfig& cfg, InitRecord& init);

}  // namespace rppl::nn
