#include "rppl/nn/checkpoint.hpp"

#include <json.hpp>

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

static_assert(std::endian::native == std::endian::little,
              "checkpoint files are little-endian; big-endian hosts are unsupported");

namespace rppl::nn {

using nlohmann::json;

namespace {

constexpr char kMagic[4] = {'R', 'P', 'N', 'N'};
constexpr std::uint16_t kVersion = 1;

template <class T>
void write_raw(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T read_raw(std::istream& in) {
  T v;
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw ParseError("truncated checkpoint");
  return v;
}

json block_to_json(const ConvBlockConfig& b) {
  return json{{"out_channels", b.out_channels},
              {"kernel_h", b.kernel_h},
              {"kernel_w", b.kernel_w},
              {"stride", b.stride},
              {"pad", b.pad}};
}

ConvBlockConfig block_from_json(const json& j) {
  ConvBlockConfig b;
  j.at("out_channels").get_to(b.out_channels);
  b.kernel_h = j.value("kernel_h", 3);
  b.kernel_w = j.value("kernel_w", 3);
  b.stride = j.value("stride", 1);
  b.pad = j.value("pad", 1);
  return b;
}

}  // namespace

std::string model_config_to_json(const ModelConfig& cfg, const InitRecord& init) {
  json j;
  j["in_channels"] = cfg.in_channels;
  j["in_height"] = cfg.in_height;
  j["in_width"] = cfg.in_width;
  j["blocks"] = json::array();
  for (const auto& b : cfg.blocks) j["blocks"].push_back(block_to_json(b));
  j["dense_hidden"] = cfg.dense_hidden;
  j["out_lo_db"] = cfg.out_lo_db;
  j["out_hi_db"] = cfg.out_hi_db;
  j["init"] = {{"scheme", init.scheme}, {"seed", init.seed}};
  return j.dump();
}

void model_config_from_json(const std::string& text, ModelConfig& cfg, InitRecord& init) {
  json j;
  try {
    j = json::parse(text);
    cfg.in_channels = j.at("in_channels").get<int>();
    cfg.in_height = j.at("in_height").get<int>();
    cfg.in_width = j.at("in_width").get<int>();
    cfg.blocks.clear();
    for (const auto& b : j.at("blocks")) cfg.blocks.push_back(block_from_json(b));
    cfg.dense_hidden = j.value("dense_hidden", std::vector<int>{});
    cfg.out_lo_db = j.value("out_lo_db", 40.0);
    cfg.out_hi_db = j.value("out_hi_db", 180.0);
    if (j.contains("init")) {
      init.scheme = j["init"].value("scheme", "fan_in_uniform");
      init.seed = j["init"].value("seed", std::uint64_t{0});
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad model config JSON: ") + e.what());
  }
}

void save_checkpoint(const Checkpoint& ckpt, std::ostream& out) {
  out.write(kMagic, 4);
  write_raw(out, kVersion);
  const std::string blob = model_config_to_json(ckpt.config, ckpt.params.init);
  write_raw(out, static_cast<std::uint32_t>(blob.size()));
  out.write(blob.data(), static_cast<std::streamsize>(blob.size()));

  write_raw(out, static_cast<std::uint32_t>(ckpt.params.tensors.size()));
  for (const auto& [name, t] : ckpt.params.tensors) {
    write_raw(out, static_cast<std::uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    write_raw(out, static_cast<std::uint32_t>(t.shape.size()));
    for (int d : t.shape) write_raw(out, static_cast<std::uint32_t>(d));
    out.write(reinterpret_cast<const char*>(t.data()),
              static_cast<std::streamsize>(t.numel() * sizeof(float)));
  }
}

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write checkpoint: " + path);
  save_checkpoint(ckpt, out);
  if (!out) throw ParseError("short write to checkpoint: " + path);
}

Checkpoint load_checkpoint(std::istream& in) {
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw ParseError("not a checkpoint file (bad magic)");
  const auto version = read_raw<std::uint16_t>(in);
  if (version != kVersion)
    throw ParseError("unsupported checkpoint version " + std::to_string(version));

  Checkpoint ckpt;
  const auto blob_len = read_raw<std::uint32_t>(in);
  std::string blob(blob_len, '\0');
  in.read(blob.data(), blob_len);
  if (!in) throw ParseError("truncated checkpoint config");
  model_config_from_json(blob, ckpt.config, ckpt.params.init);

  const auto n_tensors = read_raw<std::uint32_t>(in);
  for (std::uint32_t i = 0; i < n_tensors; ++i) {
    const auto name_len = read_raw<std::uint32_t>(in);
    std::string name(name_len, '\0');
    in.read(name.data(), name_len);
    const auto ndim = read_raw<std::uint32_t>(in);
    if (ndim > 8) throw ParseError("implausible tensor rank in checkpoint");
    std::vector<int> shape(ndim);
    for (auto& d : shape) d = static_cast<int>(read_raw<std::uint32_t>(in));
    Tensor t(shape);
    in.read(reinterpret_cast<char*>(t.data()),
            static_cast<std::streamsize>(t.numel() * sizeof(float)));
    if (!in) throw ParseError("truncated tensor '" + name + "' in checkpoint");
    ckpt.params.tensors.emplace_back(std::move(name), std::move(t));
  }
  return ckpt;
}

Checkpoint load_checkpoint_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open checkpoint: " + path);
  return load_checkpoint(in);
}

}  // namespace rppl::nn
