#pragma once

#include <vector>

#include "amvs/cost_volume.hpp"

namespace amvs {

// All-pixel depth range shared by every pixel of a stage.
struct DepthRange {
  double d_min = 0.0;
  double d_max = 0.0;

  double length() const noexcept { return d_max - d_min; }
  bool valid() const noexcept { return d_min > 0.0 && d_min < d_max; }
};

// Multipliers on sigma at the depth extremes; negative alpha and positive
// beta widen the coarse range.
struct RangeScalars {
  double alpha_dr = -1.0;
  double beta_dr = 1.0;
};

struct OverlapReport {
  double aog = 0.0;      // |gt ∩ candidate| / |gt|
  double aos = 0.0;      // |gt ∩ candidate| / |candidate|
  double f_score = 0.0;  // harmonic mean of aog and aos
};

struct RangeExtremes {
  int min_y = 0;
  int min_x = 0;
  int max_y = 0;
  int max_x = 0;
  double min_depth = 0.0;
  double max_depth = 0.0;
};

inline constexpr double kDepthFloor = 1e-6;

struct AdrpOptions {
  // Ignore the lowest and highest 0.5% of valid depths when picking extremes.
  bool robust_extremes = false;
};

// Positions of the smallest and largest valid depth; ties keep the first
// pixel in row-major order.
RangeExtremes range_extremes(const DepthMap& depth, const AdrpOptions& options = {});

// d_min = L(x_min) + alpha * sigma(x_min), d_max = L(x_max) + beta * sigma(x_max),
// with both ends floored at kDepthFloor.
DepthRange adjust_range(const DepthMap& depth, const SigmaMap& sigma, const RangeScalars& scalars,
                        const AdrpOptions& options = {});

struct CalibrationScene {
  DepthMap depth;
  SigmaMap sigma;
  DepthRange ground_truth;
};

// Independent one-dimensional least-squares fits of alpha and beta.
RangeScalars calibrate_scalars(const std::vector<CalibrationScene>& scenes, const AdrpOptions& options = {});

OverlapReport overlap_metrics(const DepthRange& gt, const DepthRange& candidate);

// Range spanned by the valid entries of a ground-truth depth map.
DepthRange depth_range_of(const DepthMap& depth);

}  // namespace amvs
