#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "rppl/rng.hpp"
#include "rppl/synthetic.hpp"

using namespace rppl;
using rppl::testing::make_link;

TEST_CASE("degenerate scene params give a flat scene") {
  SceneParams p = testing::small_scene_params(1);
  p.terrain_amplitude_m = 0.0;
  p.building_density_per_km2 = 0.0;
  p.tree_density_per_km2 = 0.0;
  Scene s = generate_scene(p, "flat");
  CHECK(s.dsm == s.dtm);
  for (double h : s.dtm.heights) CHECK(h == doctest::Approx(p.base_height_m));
}

TEST_CASE("scene generation is a pure function of its seed") {
  SceneParams p = testing::small_scene_params(77);
  Scene a = generate_scene(p, "x");
  Scene b = generate_scene(p, "x");
  CHECK(a.dsm == b.dsm);
  CHECK(a.dtm == b.dtm);
  p.seed = 78;
  Scene c = generate_scene(p, "x");
  CHECK_FALSE(c.dsm == a.dsm);
}

TEST_CASE("DSM never dips below DTM") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    SceneParams p = testing::small_scene_params(seed);
    p.extent_m = 320.0;  // keep the 100-seed sweep cheap
    p.cell_size_m = 5.0;
    Rng rng(derive_seed(seed, "param-jitter"));
    p.terrain_amplitude_m = rng.uniform(0.0, 30.0);
    p.building_density_per_km2 = rng.uniform(0.0, 400.0);
    p.tree_density_per_km2 = rng.uniform(0.0, 300.0);
    Scene s = generate_scene(p, "r");
    for (size_t i = 0; i < s.dsm.heights.size(); ++i) CHECK(s.dsm.heights[i] >= s.dtm.heights[i]);
  }
}

TEST_CASE("free-space loss at 1 km / 3455 MHz") {
  CHECK(fspl_db(1.0, 3455.0) == doctest::Approx(103.21).epsilon(1e-4));
}

TEST_CASE("oracle with no obstructions reduces to free-space loss") {
  RasterGrid ground = testing::flat_grid(300, 4.0, 50.0);
  // equal antenna heights so the 3-D separation equals the 2-D distance
  LinkRecord link = make_link(100, 600, 1100, 600, 11.0, 11.0, 3455.0);
  CHECK(oracle_path_loss(ground, ground, link) == doctest::Approx(103.21).epsilon(1e-4));
}

TEST_CASE("a single grazing edge adds J(0) = 6.03 dB") {
  CHECK(knife_edge_loss_db(0.0) == doctest::Approx(6.03).epsilon(1e-3));
  CHECK(knife_edge_loss_db(-0.79) == 0.0);

  RasterGrid dtm = testing::flat_grid(300, 4.0, 50.0);
  RasterGrid dsm = dtm;
  // a thin wall exactly at antenna height halfway along the link; one raster
  // column wide so the sampled clearance has a single local maximum
  const double wall_height = 50.0 + 11.0 + 1e-9;
  for (int r = 0; r < dsm.n_rows; ++r) dsm.at(r, 150) = wall_height;

  LinkRecord link = make_link(202.0, 600.0, 1002.0, 600.0, 11.0, 11.0, 3455.0);
  const double base = oracle_path_loss(dtm, dtm, link);
  const double with_edge = oracle_path_loss(dsm, dtm, link);
  CHECK(with_edge - base == doctest::Approx(6.03).epsilon(2e-3));
}

TEST_CASE("oracle is reciprocal to the last bit") {
  Scene scene = generate_scene(testing::small_scene_params(5150), "r");
  Rng rng(888);
  for (int trial = 0; trial < 200; ++trial) {
    const double margin = 40.0;
    const double lo = margin, hi = scene.dsm.max_center_x() - margin;
    LinkRecord link = make_link(rng.uniform(lo, hi), rng.uniform(lo, hi), rng.uniform(lo, hi),
                                rng.uniform(lo, hi), 17.0, 1.5, 915.0);
    if (link.horizontal_distance() < 50.0) continue;
    const double fwd = oracle_path_loss(scene.dsm, scene.dtm, link);
    const double rev = oracle_path_loss(scene.dsm, scene.dtm, link.swapped());
    CHECK(std::abs(fwd - rev) <= 1e-9);
  }
}

TEST_CASE("path loss rises with distance over flat ground") {
  RasterGrid ground = testing::flat_grid(600, 4.0, 10.0);
  double prev = 0.0;
  for (int k = 1; k <= 10; ++k) {
    LinkRecord link = make_link(100, 1200, 100 + 200.0 * k, 1200, 11.0, 11.0, 915.0);
    const double loss = oracle_path_loss(ground, ground, link);
    CHECK(loss > prev);
    prev = loss;
  }
}

TEST_CASE("diffraction only ever adds loss") {
  Scene scene = generate_scene(testing::small_scene_params(4242), "r");
  Rng rng(4243);
  for (int trial = 0; trial < 100; ++trial) {
    const double lo = 60.0, hi = scene.dsm.max_center_x() - 60.0;
    LinkRecord link = make_link(rng.uniform(lo, hi), rng.uniform(lo, hi), rng.uniform(lo, hi),
                                rng.uniform(lo, hi), 17.0, 1.5, 3602.0);
    if (link.horizontal_distance() < 50.0) continue;
    const double ga = sample_bilinear(scene.dtm, link.tx_x, link.tx_y) + link.tx_height_agl;
    const double gb = sample_bilinear(scene.dtm, link.rx_x, link.rx_y) + link.rx_height_agl;
    const double d3 = std::hypot(link.horizontal_distance(), gb - ga);
    CHECK(oracle_path_loss(scene.dsm, scene.dtm, link) >=
          fspl_db(d3 / 1000.0, link.frequency_mhz) - 1e-12);
  }
}

TEST_CASE("oracle rejects zero-length links") {
  RasterGrid ground = testing::flat_grid(64, 4.0, 10.0);
  LinkRecord link = make_link(100, 100, 100, 100, 11.0, 11.0, 915.0);
  CHECK_THROWS_AS(oracle_path_loss(ground, ground, link), DomainError);
}

TEST_CASE("generated datasets respect the scenario") {
  Scene scene = generate_scene(testing::small_scene_params(31337), "regionA");

  ScenarioParams params;
  params.links_per_region = 40;
  params.min_length_m = 100.0;
  params.max_length_m = 400.0;
  params.placement_margin_m = 60.0;
  params.oracle_samples = 64;

  SUBCASE("noise-free labels equal the oracle exactly") {
    params.noise_sd_db = 0.0;
    auto records = generate_dataset({scene}, params, 1);
    REQUIRE(records.size() == 40);
    for (const auto& rec : records)
      CHECK(rec.path_loss_db ==
            oracle_path_loss(scene.dsm, scene.dtm, rec, params.oracle_samples));
  }

  SUBCASE("BS-to-BS records carry 11 m antennas at both ends") {
    params.scenario = LinkScenario::bs_to_bs;
    params.tx_height_agl = 11.0;
    params.rx_height_agl = 11.0;
    params.bands_mhz = {3455.0};
    auto records = generate_dataset({scene}, params, 2);
    for (const auto& rec : records) {
      CHECK(rec.tx_height_agl == 11.0);
      CHECK(rec.rx_height_agl == 11.0);
      CHECK(rec.frequency_mhz == 3455.0);
    }
  }

  SUBCASE("link lengths stay inside the configured range") {
    auto records = generate_dataset({scene}, params, 3);
    for (const auto& rec : records) {
      CHECK(rec.horizontal_distance() >= params.min_length_m);
      CHECK(rec.horizontal_distance() <= params.max_length_m);
      CHECK(rec.region_id == "regionA");
    }
  }

  SUBCASE("band assignment is balanced") {
    auto records = generate_dataset({scene}, params, 4);
    std::map<std::string, int> counts;
    for (const auto& rec : records) counts[rec.band_id]++;
    REQUIRE(counts.size() == params.bands_mhz.size());
    for (const auto& [band, count] : counts)
      CHECK(count == params.links_per_region / static_cast<int>(params.bands_mhz.size()));
  }
}

TEST_CASE("impossible placement requests fail loudly") {
  SceneParams p = testing::small_scene_params(9);
  Scene scene = generate_scene(p, "tiny");
  ScenarioParams params;
  params.links_per_region = 10;
  params.min_length_m = 2000.0;  // longer than the scene
  params.max_length_m = 3000.0;
  CHECK_THROWS_AS(generate_dataset({scene}, params, 1), DomainError);
}

TEST_CASE("ue_to_ue is not a valid scenario") {
  CHECK_THROWS_AS(scenario_from_string("ue_to_ue"), ConfigError);
}
