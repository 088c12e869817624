#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rppl/links.hpp"
#include "rppl/raster.hpp"

namespace rppl {

/// Parameters of one procedural region: correlated-noise terrain plus
/// rectangular building extrusions and tree canopies.
struct SceneParams {
  double extent_m = 3000.0;     // square side
  double cell_size_m = 2.0;
  double base_height_m = 50.0;  // mean terrain height ASL
  double terrain_amplitude_m = 15.0;
  double terrain_correlation_m = 500.0;
  double building_density_per_km2 = 150.0;
  double building_height_min_m = 5.0;
  double building_height_max_m = 25.0;
  double building_side_min_m = 8.0;
  double building_side_max_m = 30.0;
  double tree_density_per_km2 = 60.0;
  double tree_height_min_m = 4.0;
  double tree_height_max_m = 12.0;
  double tree_radius_min_m = 2.0;
  double tree_radius_max_m = 6.0;
  std::uint64_t seed = 0;

  int cells() const { return static_cast<int>(extent_m / cell_size_m + 0.5); }
  void validate() const;
};

struct Scene {
  std::string region_id;
  RasterGrid dtm;
  RasterGrid dsm;
};

/// Link-scenario taxonomy. UE-to-UE is intentionally not representable.
enum class LinkScenario { bs_to_ue, ue_to_bs, bs_to_bs };

const char* to_string(LinkScenario s);
LinkScenario scenario_from_string(const std::string& s);

struct ScenarioParams {
  LinkScenario scenario = LinkScenario::bs_to_ue;
  double tx_height_agl = 17.0;  // BS-to-UE defaults; BS-to-BS uses 11/11
  double rx_height_agl = 1.5;
  std::vector<double> bands_mhz = {449, 915, 1802, 2695, 3602, 5850};
  int links_per_region = 2000;
  double min_length_m = 150.0;
  double max_length_m = 1500.0;
  double noise_sd_db = 3.0;       // measurement noise, drawn once per link
  double placement_margin_m = 80.0;
  int oracle_samples = 256;       // clearance samples along the link axis

  void validate() const;
};

/// Deterministic per seed: identical params give bit-identical rasters.
/// DSM >= DTM at every cell by construction.
Scene generate_scene(const SceneParams& params, const std::string& region_id);

/// Free-space path loss for a 3-D separation in km, in dB.
double fspl_db(double distance_km, double frequency_mhz);

/// Knife-edge diffraction loss for Fresnel parameter v, in dB
/// (0 below the v > -0.78 validity bound).
double knife_edge_loss_db(double v);

/// Synthetic propagation oracle: free-space loss for the 3-D antenna
/// separation plus an Epstein-Peterson knife-edge sum over obstruction
/// edges. Edges are the local maxima of (DSM - LOS) > 0 sampled at
/// `n_samples` points along the link axis. Geometry is canonicalized before
/// evaluation, so swapping Tx and Rx reproduces the identical value:
/// path loss here is reciprocal by construction.
double oracle_path_loss(const RasterGrid& dsm, const RasterGrid& dtm, const LinkRecord& link,
                        int n_samples = 256);

/// Random Tx/Rx placements in each scene with the scenario's heights and a
/// uniform band assignment; labels come from the oracle plus zero-mean
/// Gaussian noise. Placement rejects endpoints on clutter (DSM above DTM)
/// so antennas never sit inside a building.
/// Throws DomainError when a scene cannot host the requested link count.
std::vector<LinkRecord> generate_dataset(const std::vector<Scene>& scenes,
                                         const ScenarioParams& params, std::uint64_t seed);

}  // namespace rppl
