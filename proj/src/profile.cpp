#include "rppl/profile.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>

#include "rppl/json_io.hpp"

static_assert(std::endian::native == std::endian::little,
              "profile files are little-endian; big-endian hosts are unsupported");

namespace rppl {

void ProfileConfig::validate() const {
  if (length_samples < 2) throw ConfigError("length_samples must be >= 2");
  if (transverse_samples < 1) throw ConfigError("transverse_samples must be >= 1");
  if (transverse_halfwidth < 0) throw ConfigError("transverse_halfwidth must be >= 0 (0 = auto)");
  if (!(h_max > 0)) throw ConfigError("h_max must be > 0");
  if (!(d_max > 0)) throw ConfigError("d_max must be > 0");
  if (!(f_min_mhz > 0) || !(f_min_mhz < f_max_mhz))
    throw ConfigError("frequency bounds must satisfy 0 < f_min < f_max");
}

double ProfileConfig::resolved_halfwidth(double dsm_cell_size) const {
  if (transverse_halfwidth > 0) return transverse_halfwidth;
  return (transverse_samples / 2.0) * dsm_cell_size;
}

const char* to_string(Orientation o) {
  return o == Orientation::identity ? "identity" : "reflected";
}

Orientation orientation_from_string(const std::string& s) {
  if (s == "identity") return Orientation::identity;
  if (s == "reflected") return Orientation::reflected;
  throw ParseError("unknown orientation '" + s + "'");
}

double transverse_offset(int j, int transverse_samples, double halfwidth) {
  if (transverse_samples == 1) return 0.0;
  double center = (transverse_samples - 1) / 2.0;
  return (j - center) / center * halfwidth;
}

RawPatch extract_patch(const RasterGrid& dsm, const RasterGrid& dtm, const LinkRecord& link,
                       const ProfileConfig& cfg) {
  cfg.validate();
  link.validate();
  const double dist = link.horizontal_distance();
  if (!(dist > 0)) throw DomainError("link has zero horizontal length");

  const int L = cfg.length_samples;
  const int W = cfg.transverse_samples;
  const double ux = (link.rx_x - link.tx_x) / dist;
  const double uy = (link.rx_y - link.tx_y) / dist;
  // Transverse axis: the link direction rotated +90 degrees.
  const double nx = -uy;
  const double ny = ux;
  const double hw = cfg.resolved_halfwidth(dsm.cell_size);

  RawPatch patch;
  patch.length_samples = L;
  patch.transverse_samples = W;
  patch.halfwidth = hw;
  patch.surface.resize(static_cast<size_t>(L) * W);
  patch.terrain.resize(L);

  for (int i = 0; i < L; ++i) {
    const double along = i * dist / (L - 1);
    const double ax = link.tx_x + ux * along;
    const double ay = link.tx_y + uy * along;
    patch.terrain[i] = sample_bilinear(dtm, ax, ay);
    for (int j = 0; j < W; ++j) {
      const double t = transverse_offset(j, W, hw);
      patch.surface[static_cast<size_t>(i) * W + j] = sample_bilinear(dsm, ax + nx * t, ay + ny * t);
    }
  }
  return patch;
}

std::vector<double> build_direct_path(const std::vector<double>& terrain, const LinkRecord& link,
                                      const ProfileConfig& cfg, int transverse_samples) {
  const int L = cfg.length_samples;
  const int W = transverse_samples;
  if (terrain.size() != static_cast<size_t>(L))
    throw DomainError("terrain length does not match length_samples");
  for (double h : terrain) {
    if (!std::isfinite(h)) throw DomainError("non-finite terrain height");
  }
  const double a = terrain.front() + link.tx_height_agl;
  const double b = terrain.back() + link.rx_height_agl;
  std::vector<double> out(static_cast<size_t>(L) * W);
  for (int i = 0; i < L; ++i) {
    const double v = a + (b - a) * (static_cast<double>(i) / (L - 1));
    std::fill_n(out.begin() + static_cast<size_t>(i) * W, W, v);
  }
  return out;
}

std::vector<double> build_distance_channel(const LinkRecord& link, int length_samples,
                                           int transverse_samples, double halfwidth) {
  const int L = length_samples;
  const int W = transverse_samples;
  const double dist = link.horizontal_distance();
  std::vector<double> out(static_cast<size_t>(L) * W);
  for (int i = 0; i < L; ++i) {
    const double along = i * dist / (L - 1);
    for (int j = 0; j < W; ++j) {
      const double t = transverse_offset(j, W, halfwidth);
      out[static_cast<size_t>(i) * W + j] = std::sqrt(along * along + t * t);
    }
  }
  return out;
}

double frequency_channel_value(double frequency_mhz, const ProfileConfig& cfg) {
  if (!(frequency_mhz >= cfg.f_min_mhz && frequency_mhz <= cfg.f_max_mhz))
    throw DomainError("frequency " + format_double(frequency_mhz) + " MHz outside [" +
                      format_double(cfg.f_min_mhz) + ", " + format_double(cfg.f_max_mhz) + "]");
  return (std::log10(frequency_mhz) - std::log10(cfg.f_min_mhz)) /
         (std::log10(cfg.f_max_mhz) - std::log10(cfg.f_min_mhz));
}

PathProfileTensor assemble_profile(const RawPatch& patch, const LinkRecord& link,
                                   const ProfileConfig& cfg) {
  const int L = patch.length_samples;
  const int W = patch.transverse_samples;
  if (L != cfg.length_samples || W != cfg.transverse_samples)
    throw DomainError("patch shape does not match profile config");

  const double terrain_min = *std::min_element(patch.terrain.begin(), patch.terrain.end());
  const std::vector<double> direct = build_direct_path(patch.terrain, link, cfg, W);
  const std::vector<double> distance = build_distance_channel(link, L, W, patch.halfwidth);
  const double freq = frequency_channel_value(link.frequency_mhz, cfg);

  PathProfileTensor tensor;
  tensor.length_samples = L;
  tensor.transverse_samples = W;
  tensor.values.resize(static_cast<size_t>(kNumChannels) * L * W);
  tensor.link = link;
  tensor.orientation = Orientation::identity;
  tensor.config = cfg;
  tensor.config.transverse_halfwidth = patch.halfwidth;

  std::uint32_t clamped = 0;
  auto norm01 = [&clamped](double v) -> float {
    if (v < 0.0) {
      ++clamped;
      return 0.0f;
    }
    if (v > 1.0) {
      ++clamped;
      return 1.0f;
    }
    return static_cast<float>(v);
  };

  const size_t plane = static_cast<size_t>(L) * W;
  for (size_t k = 0; k < plane; ++k) {
    tensor.values[tensor.channel_offset(kChannelDirectPath) + k] =
        norm01((direct[k] - terrain_min) / cfg.h_max);
    tensor.values[tensor.channel_offset(kChannelDistance) + k] = norm01(distance[k] / cfg.d_max);
    tensor.values[tensor.channel_offset(kChannelSurface) + k] =
        norm01((patch.surface[k] - terrain_min) / cfg.h_max);
    tensor.values[tensor.channel_offset(kChannelFrequency) + k] = static_cast<float>(freq);
  }
  tensor.clamped = clamped;
  return tensor;
}

PathProfileTensor extract_profile(const RasterGrid& dsm, const RasterGrid& dtm,
                                  const LinkRecord& link, const ProfileConfig& cfg) {
  return assemble_profile(extract_patch(dsm, dtm, link, cfg), link, cfg);
}

namespace {

constexpr char kMagic[4] = {'R', 'P', 'P', 'L'};
constexpr std::uint16_t kVersion = 1;

template <class T>
void write_raw(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T read_raw(std::istream& in) {
  T v;
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw ParseError("truncated profile file");
  return v;
}

}  // namespace

void save_profile(const PathProfileTensor& tensor, std::ostream& out) {
  out.write(kMagic, 4);
  write_raw(out, kVersion);
  write_raw(out, static_cast<std::uint32_t>(kNumChannels));
  write_raw(out, static_cast<std::uint32_t>(tensor.length_samples));
  write_raw(out, static_cast<std::uint32_t>(tensor.transverse_samples));
  out.write(reinterpret_cast<const char*>(tensor.values.data()),
            static_cast<std::streamsize>(tensor.values.size() * sizeof(float)));

  json meta = {{"link", tensor.link},
               {"orientation", to_string(tensor.orientation)},
               {"profile_config", tensor.config},
               {"clamped", tensor.clamped}};
  const std::string blob = meta.dump();
  write_raw(out, static_cast<std::uint32_t>(blob.size()));
  out.write(blob.data(), static_cast<std::streamsize>(blob.size()));
}

void save_profile(const PathProfileTensor& tensor, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write profile file: " + path);
  save_profile(tensor, out);
  if (!out) throw ParseError("short write to profile file: " + path);
}

PathProfileTensor load_profile(std::istream& in) {
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw ParseError("not a profile file (bad magic)");
  const auto version = read_raw<std::uint16_t>(in);
  if (version != kVersion)
    throw ParseError("unsupported profile file version " + std::to_string(version));
  const auto channels = read_raw<std::uint32_t>(in);
  const auto length = read_raw<std::uint32_t>(in);
  const auto width = read_raw<std::uint32_t>(in);
  if (channels != kNumChannels) throw ParseError("profile file must have 4 channels");
  if (length < 2 || width < 1 || length > (1u << 20) || width > (1u << 20))
    throw ParseError("implausible profile dimensions");

  PathProfileTensor tensor;
  tensor.length_samples = static_cast<int>(length);
  tensor.transverse_samples = static_cast<int>(width);
  tensor.values.resize(static_cast<size_t>(channels) * length * width);
  in.read(reinterpret_cast<char*>(tensor.values.data()),
          static_cast<std::streamsize>(tensor.values.size() * sizeof(float)));
  if (!in) throw ParseError("truncated profile values");

  const auto blob_len = read_raw<std::uint32_t>(in);
  std::string blob(blob_len, '\0');
  in.read(blob.data(), blob_len);
  if (!in) throw ParseError("truncated profile metadata");
  json meta;
  try {
    meta = json::parse(blob);
    tensor.link = meta.at("link").get<LinkRecord>();
    tensor.orientation = orientation_from_string(meta.at("orientation").get<std::string>());
    tensor.config = meta.at("profile_config").get<ProfileConfig>();
    tensor.clamped = meta.value("clamped", 0u);
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad profile metadata: ") + e.what());
  }
  return tensor;
}

PathProfileTensor load_profile_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open profile file: " + path);
  return load_profile(in);
}

}  // namespace rppl
