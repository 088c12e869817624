#include <doctest.h>

#include <cmath>
#include <sstream>

#include "helpers.hpp"
#include "rppl/profile.hpp"
#include "rppl/rng.hpp"

using namespace rppl;
using rppl::testing::flat_grid;
using rppl::testing::make_link;

namespace {

ProfileConfig cfg_for(int length, int width) {
  ProfileConfig cfg;
  cfg.length_samples = length;
  cfg.transverse_samples = width;
  cfg.d_max = 2000.0;
  return cfg;
}

}  // namespace

TEST_CASE("extract_patch on a constant scene is constant") {
  RasterGrid flat = flat_grid(64, 4.0, 100.0);
  LinkRecord link = make_link(60, 60, 180, 140);
  ProfileConfig cfg = cfg_for(16, 5);
  RawPatch patch = extract_patch(flat, flat, link, cfg);
  for (double v : patch.surface) CHECK(v == doctest::Approx(100.0));
  for (double v : patch.terrain) CHECK(v == doctest::Approx(100.0));
}

TEST_CASE("a raised cell under the link midpoint shows up mid-patch") {
  RasterGrid dtm = flat_grid(64, 4.0, 100.0);
  RasterGrid dsm = dtm;
  // link from (40,128) to (216,128): midpoint (128,128) = cell center (31,31)
  dsm.at(dsm.n_rows - 1 - 31, 31) = 130.0;
  LinkRecord link = make_link(40, 128, 216, 128);
  ProfileConfig cfg = cfg_for(23, 5);
  RawPatch patch = extract_patch(dsm, dtm, link, cfg);

  double best = 0;
  int best_i = -1, best_j = -1;
  for (int i = 0; i < patch.length_samples; ++i)
    for (int j = 0; j < patch.transverse_samples; ++j)
      if (patch.surface_at(i, j) > best) {
        best = patch.surface_at(i, j);
        best_i = i;
        best_j = j;
      }
  CHECK(best == doctest::Approx(130.0));
  CHECK(best_i == patch.length_samples / 2);
  CHECK(best_j == patch.transverse_samples / 2);
}

TEST_CASE("extract_patch matches a direct per-pixel sampling loop") {
  Scene scene = generate_scene(testing::small_scene_params(41), "r0");
  LinkRecord link = make_link(100, 120, 430, 390);
  ProfileConfig cfg = cfg_for(21, 7);
  RawPatch patch = extract_patch(scene.dsm, scene.dtm, link, cfg);

  const double dist = link.horizontal_distance();
  const double ux = (link.rx_x - link.tx_x) / dist;
  const double uy = (link.rx_y - link.tx_y) / dist;
  const double hw = cfg.resolved_halfwidth(scene.dsm.cell_size);
  for (int i = 0; i < cfg.length_samples; ++i) {
    const double frac = static_cast<double>(i) / (cfg.length_samples - 1);
    for (int j = 0; j < cfg.transverse_samples; ++j) {
      const double t = ((j - (cfg.transverse_samples - 1) / 2.0) /
                        ((cfg.transverse_samples - 1) / 2.0)) * hw;
      const double px = link.tx_x + ux * (dist * frac) + (-uy) * t;
      const double py = link.tx_y + uy * (dist * frac) + ux * t;
      CHECK(patch.surface_at(i, j) ==
            doctest::Approx(sample_bilinear(scene.dsm, px, py)).epsilon(1e-12));
    }
  }
}

TEST_CASE("direct path endpoints come from terrain plus antenna heights") {
  const int L = 16, W = 5;
  std::vector<double> terrain(L, 100.0);
  LinkRecord link = make_link(0, 0, 1000, 0, 17.0, 1.5);
  auto dp = build_direct_path(terrain, link, cfg_for(L, W), W);
  CHECK(dp[0] == doctest::Approx(117.0));
  CHECK(dp[(L - 1) * W] == doctest::Approx(101.5));
  // midpoint of an odd-length profile sits halfway
  std::vector<double> t2(17, 100.0);
  auto dp2 = build_direct_path(t2, link, cfg_for(17, W), W);
  CHECK(dp2[8 * W] == doctest::Approx((117.0 + 101.5) / 2));
}

TEST_CASE("equal antenna heights over flat terrain give a constant channel") {
  const int L = 12, W = 3;
  std::vector<double> terrain(L, 80.0);
  LinkRecord link = make_link(0, 0, 500, 0, 11.0, 11.0);
  auto dp = build_direct_path(terrain, link, cfg_for(L, W), W);
  for (double v : dp) CHECK(v == doctest::Approx(91.0));
}

TEST_CASE("direct path is transverse-constant") {
  Scene scene = generate_scene(testing::small_scene_params(42), "r0");
  LinkRecord link = make_link(90, 100, 400, 410);
  ProfileConfig cfg = cfg_for(32, 9);
  RawPatch patch = extract_patch(scene.dsm, scene.dtm, link, cfg);
  auto dp = build_direct_path(patch.terrain, link, cfg, cfg.transverse_samples);
  for (int i = 0; i < cfg.length_samples; ++i)
    for (int j = 1; j < cfg.transverse_samples; ++j)
      CHECK(dp[i * cfg.transverse_samples + j] == dp[i * cfg.transverse_samples]);
}

TEST_CASE("distance channel basics") {
  LinkRecord link = make_link(0, 0, 1020, 0);
  const int L = 256, W = 9;
  auto dist = build_distance_channel(link, L, W, 18.0);
  const int center = (W - 1) / 2;
  CHECK(dist[0 * W + center] == 0.0);                         // self-distance
  CHECK(dist[10 * W + center] == doctest::Approx(40.0));      // 4 m per pixel
  CHECK(dist[(L - 1) * W + center] == doctest::Approx(1020.0));
}

TEST_CASE("distance channel matches coordinate-space distances") {
  Rng rng(77);
  LinkRecord link = make_link(13.0, -8.0, 640.0, 410.0);
  const int L = 40, W = 11;
  const double hw = 25.0;
  auto dist = build_distance_channel(link, L, W, hw);

  const double D = link.horizontal_distance();
  const double ux = (link.rx_x - link.tx_x) / D;
  const double uy = (link.rx_y - link.tx_y) / D;
  for (int trial = 0; trial < 100; ++trial) {
    const int i = static_cast<int>(rng.uniform_index(L));
    const int j = static_cast<int>(rng.uniform_index(W));
    const double t = ((j - (W - 1) / 2.0) / ((W - 1) / 2.0)) * hw;
    const double px = link.tx_x + ux * (i * D / (L - 1)) + (-uy) * t;
    const double py = link.tx_y + uy * (i * D / (L - 1)) + ux * t;
    const double expected = std::hypot(px - link.tx_x, py - link.tx_y);
    CHECK(dist[i * W + j] == doctest::Approx(expected).epsilon(1e-10));
  }
}

TEST_CASE("distance channel strictly increases along the link at fixed j") {
  LinkRecord link = make_link(0, 0, 777, 0);
  const int L = 64, W = 8;
  auto dist = build_distance_channel(link, L, W, 31.0);
  for (int j = 0; j < W; ++j)
    for (int i = 1; i < L; ++i)
      CHECK(dist[i * W + j] > dist[(i - 1) * W + j]);
}

TEST_CASE("frequency channel endpoints and interior value") {
  ProfileConfig cfg;  // f bounds 449..5850
  CHECK(frequency_channel_value(449.0, cfg) == doctest::Approx(0.0));
  CHECK(frequency_channel_value(5850.0, cfg) == doctest::Approx(1.0));
  CHECK(frequency_channel_value(1802.0, cfg) == doctest::Approx(0.5413).epsilon(1e-3));
  CHECK_THROWS_AS(frequency_channel_value(448.0, cfg), DomainError);
  CHECK_THROWS_AS(frequency_channel_value(6000.0, cfg), DomainError);
}

TEST_CASE("assembled channels are normalized and clamped") {
  RasterGrid flat = flat_grid(64, 4.0, 100.0);
  LinkRecord link = make_link(60, 60, 180, 140);
  ProfileConfig cfg = cfg_for(16, 5);

  SUBCASE("zero relative heights give a zero surface channel") {
    PathProfileTensor tensor = extract_profile(flat, flat, link, cfg);
    for (int i = 0; i < 16; ++i)
      for (int j = 0; j < 5; ++j) CHECK(tensor.at(kChannelSurface, i, j) == 0.0f);
    // frequency channel is constant
    const float f0 = tensor.at(kChannelFrequency, 0, 0);
    for (int i = 0; i < 16; ++i)
      for (int j = 0; j < 5; ++j) CHECK(tensor.at(kChannelFrequency, i, j) == f0);
  }

  SUBCASE("heights beyond h_max clamp to 1") {
    RasterGrid dsm = flat;
    for (int r = 0; r < dsm.n_rows; ++r)
      for (int c = 0; c < dsm.n_cols; ++c) dsm.at(r, c) = 100.0 + cfg.h_max + 50.0;
    PathProfileTensor tensor = extract_profile(dsm, flat, link, cfg);
    for (int i = 0; i < 16; ++i)
      for (int j = 0; j < 5; ++j) CHECK(tensor.at(kChannelSurface, i, j) == 1.0f);
    CHECK(tensor.clamped > 0);
  }
}

TEST_CASE("normalization round-trips for in-range values") {
  Scene scene = generate_scene(testing::small_scene_params(43), "r0");
  LinkRecord link = make_link(120, 100, 420, 380);
  ProfileConfig cfg = cfg_for(24, 7);
  RawPatch patch = extract_patch(scene.dsm, scene.dtm, link, cfg);
  PathProfileTensor tensor = assemble_profile(patch, link, cfg);

  const double terrain_min = *std::min_element(patch.terrain.begin(), patch.terrain.end());
  for (int i = 0; i < cfg.length_samples; ++i)
    for (int j = 0; j < cfg.transverse_samples; ++j) {
      const double raw = patch.surface_at(i, j);
      const double norm = (raw - terrain_min) / cfg.h_max;
      if (norm > 0.0 && norm < 1.0) {
        const double recovered =
            static_cast<double>(tensor.at(kChannelSurface, i, j)) * cfg.h_max + terrain_min;
        CHECK(recovered == doctest::Approx(raw).epsilon(1e-6));
      }
    }
}

TEST_CASE("assembled values stay in [0,1] over random scenes") {
  for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
    ProfileConfig cfg = cfg_for(24, 8);
    auto profiles = rppl::testing::random_profiles(6, seed, cfg);
    for (const auto& p : profiles)
      for (float v : p.values) {
        CHECK(v >= 0.0f);
        CHECK(v <= 1.0f);
      }
  }
}

TEST_CASE("raising a DSM cell never lowers surface channel values") {
  Scene scene = generate_scene(testing::small_scene_params(44), "r0");
  LinkRecord link = make_link(100, 100, 420, 400);
  ProfileConfig cfg = cfg_for(20, 7);
  PathProfileTensor before = extract_profile(scene.dsm, scene.dtm, link, cfg);

  RasterGrid raised = scene.dsm;
  raised.at(40, 40) += 25.0;
  PathProfileTensor after = extract_profile(raised, scene.dtm, link, cfg);

  const size_t off = before.channel_offset(kChannelSurface);
  const size_t plane = static_cast<size_t>(cfg.length_samples) * cfg.transverse_samples;
  for (size_t k = 0; k < plane; ++k) CHECK(after.values[off + k] >= before.values[off + k]);
}

TEST_CASE("assembly is bit-deterministic") {
  Scene scene = generate_scene(testing::small_scene_params(45), "r0");
  LinkRecord link = make_link(100, 110, 400, 390);
  ProfileConfig cfg = cfg_for(32, 9);
  PathProfileTensor a = extract_profile(scene.dsm, scene.dtm, link, cfg);
  PathProfileTensor b = extract_profile(scene.dsm, scene.dtm, link, cfg);
  CHECK(a.values == b.values);
}

TEST_CASE("profile files round-trip bit-exactly") {
  Scene scene = generate_scene(testing::small_scene_params(46), "r0");
  LinkRecord link = make_link(90, 90, 380, 420, 17.0, 1.5, 2695.0, 133.25, "r0", "2695");
  ProfileConfig cfg = cfg_for(16, 5);
  PathProfileTensor tensor = extract_profile(scene.dsm, scene.dtm, link, cfg);

  std::stringstream buf;
  save_profile(tensor, buf);
  PathProfileTensor back = load_profile(buf);
  CHECK(back.values == tensor.values);
  CHECK(back.link == tensor.link);
  CHECK(back.orientation == tensor.orientation);
  CHECK(back.config == tensor.config);
  CHECK(back.clamped == tensor.clamped);

  // byte-identical when re-saved
  std::stringstream buf2;
  save_profile(back, buf2);
  CHECK(buf.str() == buf2.str());
}

TEST_CASE("profile loader rejects corrupt input") {
  std::stringstream s("not a profile at all");
  CHECK_THROWS_AS(load_profile(s), ParseError);
}
