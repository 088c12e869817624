#include "rppl/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "rppl/rng.hpp"

namespace rppl {

void SceneParams::validate() const {
  if (!(extent_m > 0) || !(cell_size_m > 0)) throw ConfigError("extent and cell size must be > 0");
  if (cells() < 64) throw ConfigError("scene must span at least 64x64 cells");
  if (terrain_amplitude_m < 0 || terrain_correlation_m <= 0)
    throw ConfigError("terrain roughness parameters out of range");
  for (double h : {building_height_min_m, building_height_max_m, tree_height_min_m,
                   tree_height_max_m, base_height_m})
    if (h < 0) throw ConfigError("heights must be >= 0");
  if (building_height_max_m < building_height_min_m || tree_height_max_m < tree_height_min_m ||
      building_side_max_m < building_side_min_m || tree_radius_max_m < tree_radius_min_m)
    throw ConfigError("min/max ranges inverted");
  if (building_density_per_km2 < 0 || tree_density_per_km2 < 0)
    throw ConfigError("densities must be >= 0");
}

void ScenarioParams::validate() const {
  if (scenario == LinkScenario::ue_to_bs)
    throw ConfigError("UE-to-BS datasets are produced by reflecting BS-to-UE profiles, not generated");
  if (!(tx_height_agl > 0) || !(rx_height_agl > 0)) throw ConfigError("antenna heights must be > 0");
  if (!(min_length_m < max_length_m) || min_length_m <= 0)
    throw ConfigError("link length range must satisfy 0 < min < max");
  if (bands_mhz.empty()) throw ConfigError("at least one band required");
  for (double f : bands_mhz)
    if (!(f > 0)) throw ConfigError("bands must be positive");
  if (links_per_region < 0) throw ConfigError("links_per_region must be >= 0");
  if (noise_sd_db < 0) throw ConfigError("noise SD must be >= 0");
  if (oracle_samples < 2) throw ConfigError("oracle_samples must be >= 2");
}

const char* to_string(LinkScenario s) {
  switch (s) {
    case LinkScenario::bs_to_ue: return "bs_to_ue";
    case LinkScenario::ue_to_bs: return "ue_to_bs";
    case LinkScenario::bs_to_bs: return "bs_to_bs";
  }
  return "?";
}

LinkScenario scenario_from_string(const std::string& s) {
  if (s == "bs_to_ue") return LinkScenario::bs_to_ue;
  if (s == "ue_to_bs") return LinkScenario::ue_to_bs;
  if (s == "bs_to_bs") return LinkScenario::bs_to_bs;
  throw ConfigError("unknown scenario '" + s + "' (ue_to_ue is out of scope)");
}

namespace {

// Value noise: random lattice at the correlation length, smoothstep-blended.
class ValueNoise {
 public:
  ValueNoise(std::uint64_t seed, double spacing) : seed_(seed), spacing_(spacing) {}

  double operator()(double x, double y) const {
    double gx = x / spacing_;
    double gy = y / spacing_;
    long x0 = static_cast<long>(std::floor(gx));
    long y0 = static_cast<long>(std::floor(gy));
    double fx = smooth(gx - x0);
    double fy = smooth(gy - y0);
    double v00 = lattice(x0, y0), v10 = lattice(x0 + 1, y0);
    double v01 = lattice(x0, y0 + 1), v11 = lattice(x0 + 1, y0 + 1);
    return (1 - fx) * (1 - fy) * v00 + fx * (1 - fy) * v10 + (1 - fx) * fy * v01 + fx * fy * v11;
  }

 private:
  static double smooth(double t) { return t * t * (3.0 - 2.0 * t); }

  double lattice(long x, long y) const {
    std::uint64_t h = derive_seed(seed_, "lattice", static_cast<std::uint64_t>(x),
                                  static_cast<std::uint64_t>(y));
    // map to [-1, 1)
    return static_cast<double>(h >> 11) * 0x1.0p-53 * 2.0 - 1.0;
  }

  std::uint64_t seed_;
  double spacing_;
};

}  // namespace

Scene generate_scene(const SceneParams& params, const std::string& region_id) {
  params.validate();
  const int n = params.cells();
  const double cell = params.cell_size_m;
  const double extent = n * cell;

  RasterGrid dtm;
  dtm.n_cols = n;
  dtm.n_rows = n;
  dtm.x_origin = 0.0;
  dtm.y_origin = 0.0;
  dtm.cell_size = cell;
  dtm.heights.resize(static_cast<size_t>(n) * n);

  ValueNoise noise(derive_seed(params.seed, "terrain"), params.terrain_correlation_m);
  for (int r = 0; r < n; ++r) {
    // storage is top row first; row r from top sits at row n-1-r from bottom
    const double y = (n - 1 - r + 0.5) * cell;
    for (int c = 0; c < n; ++c) {
      const double x = (c + 0.5) * cell;
      double h = params.base_height_m + params.terrain_amplitude_m * noise(x, y);
      dtm.at(r, c) = std::max(0.0, h);
    }
  }

  RasterGrid dsm = dtm;
  const double area_km2 = (extent / 1000.0) * (extent / 1000.0);

  auto cell_range = [&](double lo, double hi, int& i0, int& i1) {
    // cell indices (from bottom/left) whose centers fall in [lo, hi]
    i0 = std::max(0, static_cast<int>(std::ceil(lo / cell - 0.5)));
    i1 = std::min(n - 1, static_cast<int>(std::floor(hi / cell - 0.5)));
  };

  // Buildings: flat roofs at terrain(center) + height.
  {
    Rng rng(derive_seed(params.seed, "buildings"));
    const long count = std::lround(params.building_density_per_km2 * area_km2);
    for (long b = 0; b < count; ++b) {
      const double cx = rng.uniform(0.0, extent);
      const double cy = rng.uniform(0.0, extent);
      const double sx = rng.uniform(params.building_side_min_m, params.building_side_max_m);
      const double sy = rng.uniform(params.building_side_min_m, params.building_side_max_m);
      const double h = rng.uniform(params.building_height_min_m, params.building_height_max_m);

      int c0, c1, r0b, r1b;
      cell_range(cx - sx / 2, cx + sx / 2, c0, c1);
      cell_range(cy - sy / 2, cy + sy / 2, r0b, r1b);
      if (c0 > c1 || r0b > r1b) continue;  // footprint fell between cell centers
      const int rc = std::clamp(static_cast<int>(cy / cell), 0, n - 1);
      const int cc = std::clamp(static_cast<int>(cx / cell), 0, n - 1);
      const double roof = dtm.at(n - 1 - rc, cc) + h;
      for (int rb = r0b; rb <= r1b; ++rb)
        for (int cb = c0; cb <= c1; ++cb) {
          double& v = dsm.at(n - 1 - rb, cb);
          v = std::max(v, roof);
        }
    }
  }

  // Trees: paraboloid crowns on local terrain.
  {
    Rng rng(derive_seed(params.seed, "trees"));
    const long count = std::lround(params.tree_density_per_km2 * area_km2);
    for (long t = 0; t < count; ++t) {
      const double cx = rng.uniform(0.0, extent);
      const double cy = rng.uniform(0.0, extent);
      const double radius = rng.uniform(params.tree_radius_min_m, params.tree_radius_max_m);
      const double h = rng.uniform(params.tree_height_min_m, params.tree_height_max_m);

      int c0, c1, r0t, r1t;
      cell_range(cx - radius, cx + radius, c0, c1);
      cell_range(cy - radius, cy + radius, r0t, r1t);
      for (int rt = r0t; rt <= r1t; ++rt)
        for (int ct = c0; ct <= c1; ++ct) {
          const double px = (ct + 0.5) * cell - cx;
          const double py = (rt + 0.5) * cell - cy;
          const double rr = (px * px + py * py) / (radius * radius);
          if (rr > 1.0) continue;
          double& v = dsm.at(n - 1 - rt, ct);
          v = std::max(v, dtm.at(n - 1 - rt, ct) + h * (1.0 - rr));
        }
    }
  }

  return Scene{region_id, std::move(dtm), std::move(dsm)};
}

double fspl_db(double distance_km, double frequency_mhz) {
  return 32.44 + 20.0 * std::log10(distance_km) + 20.0 * std::log10(frequency_mhz);
}

double knife_edge_loss_db(double v) {
  if (v <= -0.78) return 0.0;
  const double t = std::sqrt((v - 0.1) * (v - 0.1) + 1.0) + v - 0.1;
  return 6.9 + 20.0 * std::log10(t);
}

double oracle_path_loss(const RasterGrid& dsm, const RasterGrid& dtm, const LinkRecord& link,
                        int n_samples) {
  if (n_samples < 2) throw DomainError("oracle needs at least 2 samples");

  // Canonical endpoint order: evaluating a link and its Tx/Rx swap runs the
  // exact same float operations, making reciprocity hold to the last bit.
  double ax = link.tx_x, ay = link.tx_y, ah = link.tx_height_agl;
  double bx = link.rx_x, by = link.rx_y, bh = link.rx_height_agl;
  if (std::tie(bx, by, bh) < std::tie(ax, ay, ah)) {
    std::swap(ax, bx);
    std::swap(ay, by);
    std::swap(ah, bh);
  }

  const double dist = std::hypot(bx - ax, by - ay);
  if (!(dist > 0)) throw DomainError("zero-length link");

  const double ground_a = sample_bilinear(dtm, ax, ay);
  const double ground_b = sample_bilinear(dtm, bx, by);
  const double asl_a = ground_a + ah;
  const double asl_b = ground_b + bh;

  const double d3 = std::hypot(dist, asl_b - asl_a);
  const double freq = link.frequency_mhz;
  double loss = fspl_db(d3 / 1000.0, freq);

  // Clearance profile along the axis.
  const int n = n_samples;
  std::vector<double> clearance(n);
  std::vector<double> surface(n);
  for (int i = 0; i < n; ++i) {
    const double f = static_cast<double>(i) / (n - 1);
    const double x = ax + (bx - ax) * f;
    const double y = ay + (by - ay) * f;
    surface[i] = sample_bilinear(dsm, x, y);
    clearance[i] = surface[i] - (asl_a + (asl_b - asl_a) * f);
  }

  // Obstruction edges: interior local maxima of positive clearance. A
  // plateau contributes a single edge (its first sample).
  struct Edge {
    double along;
    double top;  // ASL
  };
  std::vector<Edge> edges;
  for (int i = 1; i + 1 < n; ++i) {
    if (clearance[i] > 0.0 && clearance[i] > clearance[i - 1] && clearance[i] >= clearance[i + 1])
      edges.push_back({i * dist / (n - 1), surface[i]});
  }

  if (!edges.empty()) {
    const double lambda = 299.792458 / freq;  // MHz -> meters
    // Epstein-Peterson: each edge against the chord joining its neighbors
    // (Tx/Rx standing in at the ends).
    for (size_t m = 0; m < edges.size(); ++m) {
      const double s_prev = (m == 0) ? 0.0 : edges[m - 1].along;
      const double h_prev = (m == 0) ? asl_a : edges[m - 1].top;
      const double s_next = (m + 1 == edges.size()) ? dist : edges[m + 1].along;
      const double h_next = (m + 1 == edges.size()) ? asl_b : edges[m + 1].top;

      const double d1 = edges[m].along - s_prev;
      const double d2 = s_next - edges[m].along;
      const double chord = h_prev + (h_next - h_prev) * (d1 / (s_next - s_prev));
      const double h = edges[m].top - chord;
      const double v = h * std::sqrt(2.0 * (d1 + d2) / (lambda * d1 * d2));
      loss += knife_edge_loss_db(v);
    }
  }
  return loss;
}

std::vector<LinkRecord> generate_dataset(const std::vector<Scene>& scenes,
                                         const ScenarioParams& params, std::uint64_t seed) {
  params.validate();

  std::vector<LinkRecord> records;
  records.reserve(scenes.size() * static_cast<size_t>(params.links_per_region));

  for (size_t si = 0; si < scenes.size(); ++si) {
    const Scene& scene = scenes[si];
    Rng rng(derive_seed(seed, "links", si));

    const double margin = params.placement_margin_m;
    const double lo_x = scene.dsm.min_center_x() + margin;
    const double hi_x = scene.dsm.max_center_x() - margin;
    const double lo_y = scene.dsm.min_center_y() + margin;
    const double hi_y = scene.dsm.max_center_y() - margin;
    if (!(lo_x < hi_x && lo_y < hi_y))
      throw DomainError("scene '" + scene.region_id + "' too small for placement margin");

    auto on_clutter = [&](double x, double y) {
      return sample_bilinear(scene.dsm, x, y) - sample_bilinear(scene.dtm, x, y) > 0.5;
    };

    const long max_attempts = 2000L * std::max(params.links_per_region, 1);
    long attempts = 0;
    for (int k = 0; k < params.links_per_region; ++k) {
      LinkRecord rec;
      for (;;) {
        if (++attempts > max_attempts)
          throw DomainError("cannot place " + std::to_string(params.links_per_region) +
                            " links in scene '" + scene.region_id + "'");
        const double tx = rng.uniform(lo_x, hi_x);
        const double ty = rng.uniform(lo_y, hi_y);
        const double len = rng.uniform(params.min_length_m, params.max_length_m);
        const double theta = rng.uniform(0.0, 2.0 * 3.14159265358979323846);
        const double rx = tx + len * std::cos(theta);
        const double ry = ty + len * std::sin(theta);
        if (rx < lo_x || rx > hi_x || ry < lo_y || ry > hi_y) continue;
        if (on_clutter(tx, ty) || on_clutter(rx, ry)) continue;

        rec.tx_x = tx;
        rec.tx_y = ty;
        rec.rx_x = rx;
        rec.rx_y = ry;
        break;
      }
      rec.tx_height_agl = params.tx_height_agl;
      rec.rx_height_agl = params.rx_height_agl;
      rec.frequency_mhz = params.bands_mhz[k % params.bands_mhz.size()];
      rec.region_id = scene.region_id;
      rec.band_id = format_double(rec.frequency_mhz);

      const double oracle = oracle_path_loss(scene.dsm, scene.dtm, rec, params.oracle_samples);
      const double noise = params.noise_sd_db > 0 ? rng.normal(0.0, params.noise_sd_db) : 0.0;
      rec.path_loss_db = oracle + noise;
      records.push_back(std::move(rec));
    }
  }
  return records;
}

}  // namespace rppl
