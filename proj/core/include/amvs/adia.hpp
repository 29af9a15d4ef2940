#pragma once

#include "amvs/adrp.hpp"
#include "amvs/cost_volume.hpp"

namespace amvs {

struct PixelRangeMap {
  Array2<double> d_min;
  Array2<double> d_max;
};

enum class OffsetMode { ZScore, Linear };

using OffsetVolume = Array3<double>;  // D x H x W

// Smallest sigma used when building pixel-wise ranges and z-scores.
double sigma_floor(double mean_interval);

// [L - sigma, L + sigma] per pixel with sigma floored at `floor` and the
// result clamped into `global`. L itself is clamped into `global` first.
PixelRangeMap pixelwise_range(const DepthMap& depth, const SigmaMap& sigma, const DepthRange& global,
                              double floor = 1e-6);

// d_j = d_min + j (d_max - d_min) / count for j = 0..count-1.
HypothesisPlanes equal_partition(const DepthRange& range, int count);
HypothesisPlanes equal_partition(const PixelRangeMap& range, int count);

// ZScore: softmax_i((d_i - L) / sigma). Linear: softmax_i(d_i - L).
OffsetVolume offsets(const HypothesisPlanes& planes, const DepthMap& previous, const SigmaMap& sigma,
                     OffsetMode mode = OffsetMode::ZScore);

// d_i <- d_i + interval * offset_i, always returned as per-pixel planes.
HypothesisPlanes adjust_planes(const HypothesisPlanes& planes, const OffsetVolume& offsets);

}  // namespace amvs
