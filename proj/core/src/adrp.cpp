#include "amvs/adrp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "amvs/error.hpp"

namespace amvs {

RangeExtremes range_extremes(const DepthMap& depth, const AdrpOptions& options) {
  double lo_bound = -std::numeric_limits<double>::infinity();
  double hi_bound = std::numeric_limits<double>::infinity();
  if (options.robust_extremes) {
    std::vector<double> values;
    for (int y = 0; y < depth.height(); ++y)
      for (int x = 0; x < depth.width(); ++x)
        if (depth.is_valid(y, x)) values.push_back(depth.depth(y, x));
    require(!values.empty(), ErrorCode::EmptyDepthMap, "depth map has no valid pixels");
    std::sort(values.begin(), values.end());
    const auto trim = static_cast<std::size_t>(std::floor(0.005 * static_cast<double>(values.size())));
    lo_bound = values[trim];
    hi_bound = values[values.size() - 1 - trim];
  }

  RangeExtremes out;
  bool found = false;
  for (int y = 0; y < depth.height(); ++y) {
    for (int x = 0; x < depth.width(); ++x) {
      if (!depth.is_valid(y, x)) continue;
      const double v = depth.depth(y, x);
      if (v < lo_bound || v > hi_bound) continue;
      if (!found || v < out.min_depth) {
        out.min_depth = v;
        out.min_y = y;
        out.min_x = x;
      }
      if (!found || v > out.max_depth) {
        out.max_depth = v;
        out.max_y = y;
        out.max_x = x;
      }
      found = true;
    }
  }
  require(found, ErrorCode::EmptyDepthMap, "depth map has no valid pixels");
  return out;
}

DepthRange adjust_range(const DepthMap& depth, const SigmaMap& sigma, const RangeScalars& scalars,
                        const AdrpOptions& options) {
  require(depth.depth.same_shape(sigma), ErrorCode::ShapeMismatch, "sigma map differs in size from depth map");
  const RangeExtremes ext = range_extremes(depth, options);
  const double s_min = sigma(ext.min_y, ext.min_x);
  const double s_max = sigma(ext.max_y, ext.max_x);
  require(s_min >= 0.0 && s_max >= 0.0, ErrorCode::InvalidSpec, "sigma must be nonnegative");
  DepthRange range{ext.min_depth + scalars.alpha_dr * s_min, ext.max_depth + scalars.beta_dr * s_max};
  range.d_min = std::max(range.d_min, kDepthFloor);
  range.d_max = std::max(range.d_max, kDepthFloor);
  require(range.d_min < range.d_max, ErrorCode::DegenerateRange, "adjusted depth range is empty");
  return range;
}

RangeScalars calibrate_scalars(const std::vector<CalibrationScene>& scenes, const AdrpOptions& options) {
  double num_a = 0.0;
  double den_a = 0.0;
  double num_b = 0.0;
  double den_b = 0.0;
  for (const auto& scene : scenes) {
    const RangeExtremes ext = range_extremes(scene.depth, options);
    const double s_min = scene.sigma(ext.min_y, ext.min_x);
    const double s_max = scene.sigma(ext.max_y, ext.max_x);
    num_a += (scene.ground_truth.d_min - ext.min_depth) * s_min;
    den_a += s_min * s_min;
    num_b += (scene.ground_truth.d_max - ext.max_depth) * s_max;
    den_b += s_max * s_max;
  }
  require(den_a > 0.0 && den_b > 0.0, ErrorCode::InsufficientData,
          "calibration needs nonzero sigma at the depth extremes");
  return {num_a / den_a, num_b / den_b};
}

OverlapReport overlap_metrics(const DepthRange& gt, const DepthRange& candidate) {
  const double inter = std::max(0.0, std::min(gt.d_max, candidate.d_max) - std::max(gt.d_min, candidate.d_min));
  OverlapReport out;
  out.aog = gt.length() > 0.0 ? inter / gt.length() : 0.0;
  out.aos = candidate.length() > 0.0 ? inter / candidate.length() : 0.0;
  out.f_score = (out.aog > 0.0 && out.aos > 0.0) ? 2.0 * out.aog * out.aos / (out.aog + out.aos) : 0.0;
  return out;
}

DepthRange depth_range_of(const DepthMap& depth) {
  const RangeExtremes ext = range_extremes(depth);
  return {ext.min_depth, ext.max_depth};
}

}  // namespace amvs
