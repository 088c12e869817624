#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "helpers.hpp"
#include "rppl/transforms.hpp"

using namespace rppl;
using rppl::testing::flat_grid;
using rppl::testing::make_link;

TEST_CASE("reflect is an involution") {
  ProfileConfig cfg = testing::small_profile_config(24, 8);
  auto profiles = testing::random_profiles(8, 99, cfg);
  for (const auto& p : profiles) {
    PathProfileTensor back = reflect(reflect(p));
    REQUIRE(back.values.size() == p.values.size());
    for (size_t k = 0; k < p.values.size(); ++k)
      CHECK(std::abs(back.values[k] - p.values[k]) <= 1e-6f);
    CHECK(back.link == p.link);
    CHECK(back.orientation == p.orientation);
    CHECK(back.config == p.config);
  }
}

TEST_CASE("reflection swaps the direct-path endpoints") {
  RasterGrid flat = flat_grid(80, 4.0, 100.0);
  LinkRecord link = make_link(60, 160, 260, 160, 17.0, 1.5);
  ProfileConfig cfg = testing::small_profile_config(16, 5);
  PathProfileTensor p = extract_profile(flat, flat, link, cfg);
  PathProfileTensor r = reflect(p);

  const int L = cfg.length_samples;
  // flat terrain at 100 m: endpoints are 117 m (Tx) and 101.5 m (Rx);
  // relative to the 100 m terrain floor that is 17/h_max and 1.5/h_max
  CHECK(p.at(kChannelDirectPath, 0, 2) == doctest::Approx(17.0 / cfg.h_max));
  CHECK(p.at(kChannelDirectPath, L - 1, 2) == doctest::Approx(1.5 / cfg.h_max));
  CHECK(r.at(kChannelDirectPath, 0, 2) == doctest::Approx(1.5 / cfg.h_max));
  CHECK(r.at(kChannelDirectPath, L - 1, 2) == doctest::Approx(17.0 / cfg.h_max));
  for (int i = 0; i < L; ++i)
    CHECK(r.at(kChannelDirectPath, i, 2) == p.at(kChannelDirectPath, L - 1 - i, 2));

  CHECK(r.orientation == Orientation::reflected);
  CHECK(r.link.tx_height_agl == 1.5);
  CHECK(r.link.rx_height_agl == 17.0);
  CHECK(r.link.tx_x == link.rx_x);
  CHECK(r.link.path_loss_db == link.path_loss_db);  // reciprocity keeps the label
}

TEST_CASE("the rebuilt distance channel equals the original") {
  ProfileConfig cfg = testing::small_profile_config(32, 8);  // even W
  auto profiles = testing::random_profiles(10, 1234, cfg);
  for (const auto& p : profiles) {
    PathProfileTensor r = reflect(p);
    const size_t off = p.channel_offset(kChannelDistance);
    const size_t plane = static_cast<size_t>(p.length_samples) * p.transverse_samples;
    for (size_t k = 0; k < plane; ++k)
      CHECK(std::abs(static_cast<double>(r.values[off + k]) - p.values[off + k]) <= 1e-9);
  }
}

TEST_CASE("reflection equals extraction of the swapped link") {
  // The reflected tensor must be what extract_profile would produce for the
  // Tx/Rx-swapped link; this is what makes augmented samples physical.
  Scene scene = generate_scene(testing::small_scene_params(7), "r0");
  LinkRecord link = make_link(120, 130, 400, 360);
  ProfileConfig cfg = testing::small_profile_config(24, 8);
  PathProfileTensor reflected = reflect(extract_profile(scene.dsm, scene.dtm, link, cfg));
  PathProfileTensor swapped = extract_profile(scene.dsm, scene.dtm, link.swapped(), cfg);
  for (size_t k = 0; k < reflected.values.size(); ++k)
    CHECK(std::abs(reflected.values[k] - swapped.values[k]) <= 1e-6f);
}

TEST_CASE("reflection preserves the surface-channel value multiset") {
  ProfileConfig cfg = testing::small_profile_config(16, 7);
  auto profiles = testing::random_profiles(4, 31, cfg);
  for (const auto& p : profiles) {
    PathProfileTensor r = reflect(p);
    const size_t off = p.channel_offset(kChannelSurface);
    const size_t plane = static_cast<size_t>(p.length_samples) * p.transverse_samples;
    std::vector<float> a(p.values.begin() + off, p.values.begin() + off + plane);
    std::vector<float> b(r.values.begin() + off, r.values.begin() + off + plane);
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    CHECK(a == b);
  }
}

TEST_CASE("reflection commutes with assembly") {
  Scene scene = generate_scene(testing::small_scene_params(8), "r0");
  LinkRecord link = make_link(100, 150, 380, 400);
  ProfileConfig cfg = testing::small_profile_config(20, 6);

  PathProfileTensor route_a = reflect(extract_profile(scene.dsm, scene.dtm, link, cfg));

  // reflect the raw patch by hand, then assemble for the swapped link
  RawPatch patch = extract_patch(scene.dsm, scene.dtm, link, cfg);
  RawPatch flipped = patch;
  for (int i = 0; i < patch.length_samples; ++i) {
    flipped.terrain[i] = patch.terrain[patch.length_samples - 1 - i];
    for (int j = 0; j < patch.transverse_samples; ++j)
      flipped.surface[static_cast<size_t>(i) * patch.transverse_samples + j] =
          patch.surface_at(patch.length_samples - 1 - i, patch.transverse_samples - 1 - j);
  }
  PathProfileTensor route_b = assemble_profile(flipped, link.swapped(), cfg);

  for (size_t k = 0; k < route_a.values.size(); ++k)
    CHECK(std::abs(route_a.values[k] - route_b.values[k]) <= 1e-6f);
}

TEST_CASE("augment with n=0 returns the input unchanged") {
  ProfileConfig cfg = testing::small_profile_config(12, 4);
  auto samples = testing::random_profiles(6, 5, cfg, 2);
  auto out = augment_dataset(samples, {0, 42, SelectionScope::uniform_random});
  REQUIRE(out.size() == samples.size());
  for (size_t i = 0; i < samples.size(); ++i) CHECK(out[i].values == samples[i].values);
}

TEST_CASE("augment appends n reflected copies per region") {
  // the published experiment shape: 5 regions x 12000 samples, n=500
  // -> 62500 samples with 500 reflected per region. Tiny tensors keep the
  // counting test cheap.
  PathProfileTensor proto;
  proto.length_samples = 2;
  proto.transverse_samples = 1;
  proto.values.assign(4 * 2 * 1, 0.25f);
  proto.config = testing::small_profile_config(2, 1);
  proto.config.transverse_halfwidth = 2.0;

  std::vector<PathProfileTensor> samples;
  samples.reserve(5 * 12000);
  for (int r = 0; r < 5; ++r)
    for (int k = 0; k < 12000; ++k) {
      PathProfileTensor p = proto;
      p.link = testing::make_link(0, 0, 100 + k, 50, 17, 1.5, 915, 100, "region" + std::to_string(r),
                                  k % 2 ? "915" : "3602");
      samples.push_back(std::move(p));
    }

  auto out = augment_dataset(samples, {500, 9, SelectionScope::uniform_random});
  CHECK(out.size() == 62500);
  // originals first, in order and untouched
  for (size_t i = 0; i < samples.size(); ++i) {
    CHECK(out[i].link == samples[i].link);
    CHECK(out[i].orientation == Orientation::identity);
  }
  std::map<std::string, int> reflected_counts;
  for (size_t i = samples.size(); i < out.size(); ++i) {
    CHECK(out[i].orientation == Orientation::reflected);
    reflected_counts[out[i].link.region_id]++;
  }
  REQUIRE(reflected_counts.size() == 5);
  for (const auto& [region, count] : reflected_counts) CHECK(count == 500);
}

TEST_CASE("augment selection is seed-deterministic") {
  ProfileConfig cfg = testing::small_profile_config(8, 3);
  auto samples = testing::random_profiles(30, 77, cfg, 2);

  auto a = augment_dataset(samples, {5, 1001, SelectionScope::uniform_random});
  auto b = augment_dataset(samples, {5, 1001, SelectionScope::uniform_random});
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].link == b[i].link);
    CHECK(a[i].values == b[i].values);
  }

  auto c = augment_dataset(samples, {5, 2002, SelectionScope::uniform_random});
  bool any_difference = false;
  for (size_t i = samples.size(); i < a.size(); ++i)
    if (!(a[i].link == c[i].link)) any_difference = true;
  CHECK(any_difference);
}

TEST_CASE("stratified selection draws evenly across bands") {
  ProfileConfig cfg = testing::small_profile_config(8, 3);
  auto samples = testing::random_profiles(24, 13, cfg, 1);
  // the generator round-robins six bands, so 4 samples per band
  auto out = augment_dataset(samples, {6, 5, SelectionScope::per_band_stratified});
  REQUIRE(out.size() == 30);
  std::map<std::string, int> per_band;
  for (size_t i = samples.size(); i < out.size(); ++i) per_band[out[i].link.band_id]++;
  CHECK(per_band.size() == 6);
  for (const auto& [band, count] : per_band) CHECK(count == 1);
}

TEST_CASE("augment rejects n larger than a region") {
  ProfileConfig cfg = testing::small_profile_config(8, 3);
  auto samples = testing::random_profiles(4, 3, cfg, 1);
  CHECK_THROWS_AS(augment_dataset(samples, {5, 1, SelectionScope::uniform_random}), DomainError);
}

TEST_CASE("augment never mutates its input") {
  ProfileConfig cfg = testing::small_profile_config(8, 3);
  auto samples = testing::random_profiles(10, 21, cfg, 1);
  auto copies = samples;
  (void)augment_dataset(samples, {3, 4, SelectionScope::uniform_random});
  for (size_t i = 0; i < samples.size(); ++i) {
    CHECK(samples[i].values == copies[i].values);
    CHECK(samples[i].link == copies[i].link);
  }
}
