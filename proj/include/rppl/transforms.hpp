#pragma once

#include <cstdint>
#include <vector>

#include "rppl/profile.hpp"

namespace rppl {

/// How the n duplicated samples are picked inside each region.
enum class SelectionScope { uniform_random, per_band_stratified };

struct AugmentationPlan {
  long n_per_region = 0;
  std::uint64_t selection_seed = 0;
  SelectionScope scope = SelectionScope::uniform_random;
};

/// Tx/Rx swap of a profile: surface and direct-path channels are rotated
/// 180 degrees (i -> L-1-i, j -> W-1-j), the distance channel is rebuilt for
/// the new Tx end (which, by the symmetric distance formula, reproduces the
/// original channel), frequency is unchanged, and the link metadata swaps
/// Tx and Rx. Applying reflect twice returns the original profile.
PathProfileTensor reflect(const PathProfileTensor& profile);

/// Returns the input samples (order preserved) followed by n_per_region
/// reflected copies per region, selected without replacement by a seeded
/// RNG. Regions are processed in order of first appearance; the input is
/// never mutated. Throws DomainError when n exceeds what a region (or, for
/// stratified selection, a band within it) can supply.
std::vector<PathProfileTensor> augment_dataset(const std::vector<PathProfileTensor>& samples,
                                               const AugmentationPlan& plan);

}  // namespace rppl
