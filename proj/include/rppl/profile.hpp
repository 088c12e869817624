#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "rppl/links.hpp"
#include "rppl/raster.hpp"

namespace rppl {

/// Geometry and normalization constants for path profile extraction. The
/// normalization constants are experiment-level decisions; they are embedded
/// in every profile file and experiment report so results stay reproducible.
struct ProfileConfig {
  int length_samples = 256;         // L, samples along the link (Tx at index 0)
  int transverse_samples = 64;      // W, samples across the link
  double transverse_halfwidth = 0;  // meters; 0 = auto ((W / 2) * DSM cell_size)
  double h_max = 200.0;             // meters; ceiling for height channels
  double d_max = 5000.0;            // meters; ceiling for the distance channel
  double f_min_mhz = 449.0;
  double f_max_mhz = 5850.0;

  void validate() const;
  double resolved_halfwidth(double dsm_cell_size) const;

  bool operator==(const ProfileConfig&) const = default;
};

enum class Orientation { identity, reflected };

const char* to_string(Orientation o);
Orientation orientation_from_string(const std::string& s);

/// DSM patch swept along the link plus the bare-terrain profile on the axis,
/// both in meters ASL. surface is L x W row-major; terrain has length L.
/// Column j sits at transverse offset
///   t_j = (j - (W-1)/2) / ((W-1)/2) * halfwidth   (t_0 = -halfwidth,
/// t_{W-1} = +halfwidth; a zero-offset center column exists only for odd W).
struct RawPatch {
  int length_samples = 0;
  int transverse_samples = 0;
  double halfwidth = 0.0;  // resolved, meters
  std::vector<double> surface;
  std::vector<double> terrain;

  double surface_at(int i, int j) const {
    return surface[static_cast<size_t>(i) * transverse_samples + j];
  }
};

/// The 4 x L x W normalized model input. Channel order: 0 = direct path,
/// 1 = distance from Tx, 2 = surface, 3 = frequency. All values lie in
/// [0, 1]; `clamped` counts values that hit the clamp on assembly.
struct PathProfileTensor {
  int length_samples = 0;
  int transverse_samples = 0;
  std::vector<float> values;  // 4 * L * W, channel-major
  LinkRecord link;
  Orientation orientation = Orientation::identity;
  ProfileConfig config;  // with transverse_halfwidth resolved to meters
  std::uint32_t clamped = 0;

  float at(int c, int i, int j) const {
    return values[(static_cast<size_t>(c) * length_samples + i) * transverse_samples + j];
  }
  float& at(int c, int i, int j) {
    return values[(static_cast<size_t>(c) * length_samples + i) * transverse_samples + j];
  }
  size_t channel_offset(int c) const {
    return static_cast<size_t>(c) * length_samples * transverse_samples;
  }
};

inline constexpr int kChannelDirectPath = 0;
inline constexpr int kChannelDistance = 1;
inline constexpr int kChannelSurface = 2;
inline constexpr int kChannelFrequency = 3;
inline constexpr int kNumChannels = 4;

/// Transverse offset of column j in meters (see RawPatch).
double transverse_offset(int j, int transverse_samples, double halfwidth);

/// Sample the DSM over the swept rectangle and the DTM along the axis.
/// Throws DomainError when the link has zero horizontal length or any sample
/// leaves the raster extent / hits nodata.
RawPatch extract_patch(const RasterGrid& dsm, const RasterGrid& dtm, const LinkRecord& link,
                       const ProfileConfig& cfg);

/// Straight line between the antenna tips: endpoint heights are
/// terrain[0] + tx_h and terrain[L-1] + rx_h, linear in i and constant
/// across j. Returns L x W meters ASL.
std::vector<double> build_direct_path(const std::vector<double>& terrain, const LinkRecord& link,
                                      const ProfileConfig& cfg, int transverse_samples);

/// Horizontal distance from the Tx ground point to each pixel's ground
/// point: sqrt((i * D / (L-1))^2 + t_j^2). Returns L x W meters.
std::vector<double> build_distance_channel(const LinkRecord& link, int length_samples,
                                           int transverse_samples, double halfwidth);

/// Constant channel: (log10 f - log10 f_min) / (log10 f_max - log10 f_min).
/// Throws DomainError for out-of-band frequencies.
double frequency_channel_value(double frequency_mhz, const ProfileConfig& cfg);

/// Normalize and stack the four channels. Heights are taken relative to the
/// minimum terrain height of the patch, divided by h_max and clamped to
/// [0, 1]; distance is divided by d_max and clamped.
PathProfileTensor assemble_profile(const RawPatch& patch, const LinkRecord& link,
                                   const ProfileConfig& cfg);

/// extract_patch + assemble_profile.
PathProfileTensor extract_profile(const RasterGrid& dsm, const RasterGrid& dtm,
                                  const LinkRecord& link, const ProfileConfig& cfg);

/// Profile tensor file ("RPPL"): little-endian magic, u16 version, u32 dims
/// (4, L, W), f32 values row-major, then a length-prefixed UTF-8 JSON blob
/// with the link, orientation and profile config. Round-trips bit-exactly.
void save_profile(const PathProfileTensor& tensor, std::ostream& out);
void save_profile(const PathProfileTensor& tensor, const std::string& path);
PathProfileTensor load_profile(std::istream& in);
PathProfileTensor load_profile_file(const std::string& path);

}  // namespace rppl
