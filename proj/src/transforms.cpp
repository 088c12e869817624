#include "rppl/transforms.hpp"

#include <algorithm>
#include <map>
#include <string>

#include "rppl/rng.hpp"

namespace rppl {

PathProfileTensor reflect(const PathProfileTensor& profile) {
  const int L = profile.length_samples;
  const int W = profile.transverse_samples;

  PathProfileTensor out = profile;
  out.link = profile.link.swapped();
  out.orientation = profile.orientation == Orientation::identity ? Orientation::reflected
                                                                 : Orientation::identity;

  auto rotate180 = [&](int channel) {
    for (int i = 0; i < L; ++i)
      for (int j = 0; j < W; ++j)
        out.at(channel, i, j) = profile.at(channel, L - 1 - i, W - 1 - j);
  };
  rotate180(kChannelSurface);
  rotate180(kChannelDirectPath);

  // Distance is distance-from-Tx; a plain rotation would measure from the
  // far end, so rebuild it for the new Tx instead.
  const double hw = out.config.transverse_halfwidth;
  const std::vector<double> dist = build_distance_channel(out.link, L, W, hw);
  const double d_max = out.config.d_max;
  const size_t off = out.channel_offset(kChannelDistance);
  for (size_t k = 0; k < dist.size(); ++k)
    out.values[off + k] = static_cast<float>(std::clamp(dist[k] / d_max, 0.0, 1.0));

  return out;
}

std::vector<PathProfileTensor> augment_dataset(const std::vector<PathProfileTensor>& samples,
                                               const AugmentationPlan& plan) {
  if (plan.n_per_region < 0) throw DomainError("n_per_region must be >= 0");

  // Group indices by region, regions kept in order of first appearance.
  std::vector<std::string> region_order;
  std::map<std::string, std::vector<size_t>> by_region;
  for (size_t i = 0; i < samples.size(); ++i) {
    const std::string& region = samples[i].link.region_id;
    auto [it, inserted] = by_region.try_emplace(region);
    if (inserted) region_order.push_back(region);
    it->second.push_back(i);
  }

  std::vector<PathProfileTensor> out = samples;
  if (plan.n_per_region == 0) return out;

  for (size_t r = 0; r < region_order.size(); ++r) {
    const auto& indices = by_region[region_order[r]];
    const size_t n = static_cast<size_t>(plan.n_per_region);

    std::vector<size_t> selected;
    Rng rng(derive_seed(plan.selection_seed, "augment-select", r));

    auto pick_without_replacement = [&rng](std::vector<size_t> pool, size_t count) {
      for (size_t k = 0; k < count; ++k) {
        size_t pick = k + rng.uniform_index(pool.size() - k);
        std::swap(pool[k], pool[pick]);
      }
      pool.resize(count);
      return pool;
    };

    if (plan.scope == SelectionScope::uniform_random) {
      if (n > indices.size())
        throw DomainError("augmentation n=" + std::to_string(n) + " exceeds region '" +
                          region_order[r] + "' size " + std::to_string(indices.size()));
      selected = pick_without_replacement(indices, n);
    } else {
      std::map<std::string, std::vector<size_t>> by_band;
      for (size_t idx : indices) by_band[samples[idx].link.band_id].push_back(idx);
      const size_t n_bands = by_band.size();
      size_t quota = n / n_bands;
      size_t remainder = n % n_bands;
      size_t band_pos = 0;
      for (auto& [band, pool] : by_band) {
        size_t want = quota + (band_pos < remainder ? 1 : 0);
        ++band_pos;
        if (want > pool.size())
          throw DomainError("augmentation needs " + std::to_string(want) + " samples in band '" +
                            band + "' of region '" + region_order[r] + "', only " +
                            std::to_string(pool.size()) + " available");
        auto picked = pick_without_replacement(pool, want);
        selected.insert(selected.end(), picked.begin(), picked.end());
      }
    }

    // Sorted order keeps the augmented block auditable against the input.
    std::sort(selected.begin(), selected.end());
    for (size_t idx : selected) out.push_back(reflect(samples[idx]));
  }
  return out;
}

}  // namespace rppl
