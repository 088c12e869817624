#pragma once

#include <string>
#include <vector>

#include "rppl/profile.hpp"
#include "rppl/rng.hpp"
#include "rppl/synthetic.hpp"

namespace rppl::testing {

inline RasterGrid flat_grid(int n, double cell, double height, double x0 = 0.0, double y0 = 0.0) {
  RasterGrid g;
  g.n_cols = n;
  g.n_rows = n;
  g.x_origin = x0;
  g.y_origin = y0;
  g.cell_size = cell;
  g.heights.assign(static_cast<size_t>(n) * n, height);
  return g;
}

inline LinkRecord make_link(double tx_x, double tx_y, double rx_x, double rx_y, double tx_h = 17.0,
                            double rx_h = 1.5, double freq = 3602.0, double pl = 120.0,
                            const std::string& region = "r0", const std::string& band = "3602") {
  LinkRecord rec;
  rec.tx_x = tx_x;
  rec.tx_y = tx_y;
  rec.rx_x = rx_x;
  rec.rx_y = rx_y;
  rec.tx_height_agl = tx_h;
  rec.rx_height_agl = rx_h;
  rec.frequency_mhz = freq;
  rec.path_loss_db = pl;
  rec.region_id = region;
  rec.band_id = band;
  return rec;
}

inline SceneParams small_scene_params(std::uint64_t seed) {
  SceneParams p;
  p.extent_m = 640.0;
  p.cell_size_m = 4.0;
  p.terrain_amplitude_m = 10.0;
  p.terrain_correlation_m = 150.0;
  p.building_density_per_km2 = 250.0;
  p.tree_density_per_km2 = 120.0;
  p.seed = seed;
  return p;
}

inline ProfileConfig small_profile_config(int length = 32, int width = 9) {
  ProfileConfig cfg;
  cfg.length_samples = length;
  cfg.transverse_samples = width;
  cfg.d_max = 2000.0;
  return cfg;
}

/// Profiles extracted from procedurally generated scenes; spans several
/// regions when asked so grouping logic gets exercised.
inline std::vector<PathProfileTensor> random_profiles(int count, std::uint64_t seed,
                                                      const ProfileConfig& cfg,
                                                      int regions = 1) {
  std::vector<PathProfileTensor> out;
  out.reserve(count);
  for (int r = 0; r < regions; ++r) {
    Scene scene = generate_scene(small_scene_params(derive_seed(seed, "scene", r)),
                                 "r" + std::to_string(r));
    ScenarioParams sc;
    sc.links_per_region = count / regions + (r < count % regions ? 1 : 0);
    sc.min_length_m = 100.0;
    sc.max_length_m = 420.0;
    sc.placement_margin_m = 60.0;
    sc.oracle_samples = cfg.length_samples;
    auto links = generate_dataset({scene}, sc, derive_seed(seed, "links", r));
    for (const auto& link : links) out.push_back(extract_profile(scene.dsm, scene.dtm, link, cfg));
  }
  return out;
}

}  // namespace rppl::testing
