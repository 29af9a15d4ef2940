#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "amvs/cost_volume.hpp"
#include "amvs/features.hpp"
#include "amvs/geometry.hpp"

namespace amvs {

struct ConsistencyThresholds {
  double max_reproj_err = 1.0;       // pixels
  double max_rel_depth_diff = 0.01;  // |d_proj - d_src| / d_src
  int min_consistent_views = 2;
  double min_confidence = 0.3;

  void validate() const;
};

struct CloudPoint {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  std::array<std::uint8_t, 3> color{0, 0, 0};
  int view = 0;
};

struct PointCloud {
  std::vector<CloudPoint> points;

  std::size_t size() const noexcept { return points.size(); }
  bool empty() const noexcept { return points.empty(); }
};

using ViewMask = Array2<std::uint8_t>;

// A pixel survives when its confidence passes and enough other views see the
// same surface: the point projects inside the other view, the other view's
// depth there reprojects to within max_reproj_err pixels of the original
// pixel, and the projected depth agrees with the stored one.
std::vector<ViewMask> geometric_consistency(const std::vector<DepthMap>& depths,
                                            const std::vector<ConfidenceMap>& confidences,
                                            const std::vector<CameraView>& views, const ConsistencyThresholds& th);

struct FusionOptions {
  // Points closer than this are averaged together. Zero disables merging;
  // a negative value selects half the median pixel footprint.
  double merge_radius = -1.0;
};

double estimate_merge_radius(const std::vector<DepthMap>& depths, const std::vector<ViewMask>& masks,
                             const std::vector<CameraView>& views);

PointCloud fuse(const std::vector<DepthMap>& depths, const std::vector<ViewMask>& masks,
                const std::vector<ColorImage>& images, const std::vector<CameraView>& views,
                const FusionOptions& options = {});

}  // namespace amvs
