#include "amvs/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

#include "amvs/error.hpp"
#include "amvs/parallel.hpp"

namespace amvs {

void ConsistencyThresholds::validate() const {
  require(max_reproj_err > 0.0 && max_rel_depth_diff > 0.0 && min_confidence >= 0.0 && min_confidence <= 1.0,
          ErrorCode::InvalidConfig, "consistency thresholds must be positive");
  require(min_consistent_views >= 1, ErrorCode::InvalidConfig, "min_consistent_views must be at least 1");
}

namespace {

// Camera-frame depth of a world point, or a nonpositive value when behind.
double camera_depth(const CameraView& view, const Eigen::Vector3d& p) {
  return (view.extrinsics.rotation * p + view.extrinsics.translation).z();
}

bool agrees_with(const DepthMap& ref_depth, int y, int x, const CameraView& ref_view, const DepthMap& src_depth,
                 const CameraView& src_view, const ConsistencyThresholds& th) {
  const Eigen::Vector3d point = unproject(ref_view, x, y, ref_depth.depth(y, x));
  if (camera_depth(src_view, point) <= 0.0) return false;
  const PixelDepth in_src = project(src_view, point);
  const int su = static_cast<int>(std::lround(in_src.u));
  const int sv = static_cast<int>(std::lround(in_src.v));
  if (su < 0 || sv < 0 || su >= src_depth.width() || sv >= src_depth.height()) return false;
  if (!src_depth.is_valid(sv, su)) return false;
  const double d_src = src_depth.depth(sv, su);
  if (!(d_src > 0.0)) return false;
  if (std::abs(in_src.depth - d_src) / d_src > th.max_rel_depth_diff) return false;

  const Eigen::Vector3d back = unproject(src_view, in_src.u, in_src.v, d_src);
  if (camera_depth(ref_view, back) <= 0.0) return false;
  const PixelDepth in_ref = project(ref_view, back);
  return std::hypot(in_ref.u - x, in_ref.v - y) <= th.max_reproj_err;
}

}  // namespace

std::vector<ViewMask> geometric_consistency(const std::vector<DepthMap>& depths,
                                            const std::vector<ConfidenceMap>& confidences,
                                            const std::vector<CameraView>& views, const ConsistencyThresholds& th) {
  th.validate();
  const std::size_t n = depths.size();
  require(n >= 2, ErrorCode::InsufficientViews, "consistency checking needs at least two views");
  require(confidences.size() == n && views.size() == n, ErrorCode::ShapeMismatch,
          "depths, confidences and views must align");
  for (std::size_t i = 0; i < n; ++i)
    require(confidences[i].same_shape(depths[i].depth), ErrorCode::ShapeMismatch, "confidence map size mismatch");

  std::vector<ViewMask> masks;
  for (std::size_t i = 0; i < n; ++i) {
    const DepthMap& ref = depths[i];
    ViewMask mask(ref.height(), ref.width(), 0);
    parallel_for(0, ref.height(), [&](int y) {
      for (int x = 0; x < ref.width(); ++x) {
        if (!ref.is_valid(y, x) || !(ref.depth(y, x) > 0.0)) continue;
        if (confidences[i](y, x) < th.min_confidence) continue;
        int agreeing = 0;
        for (std::size_t j = 0; j < n && agreeing < th.min_consistent_views; ++j) {
          if (j == i) continue;
          if (agrees_with(ref, y, x, views[i], depths[j], views[j], th)) ++agreeing;
        }
        if (agreeing >= th.min_consistent_views) mask(y, x) = 1;
      }
    });
    masks.push_back(std::move(mask));
  }
  return masks;
}

double estimate_merge_radius(const std::vector<DepthMap>& depths, const std::vector<ViewMask>& masks,
                             const std::vector<CameraView>& views) {
  std::vector<double> footprints;
  for (std::size_t i = 0; i < depths.size(); ++i) {
    const double f = 0.5 * (views[i].intrinsics.fx + views[i].intrinsics.fy);
    for (int y = 0; y < depths[i].height(); ++y)
      for (int x = 0; x < depths[i].width(); ++x)
        if (masks[i](y, x)) footprints.push_back(depths[i].depth(y, x) / f);
  }
  if (footprints.empty()) return 0.0;
  auto mid = footprints.begin() + static_cast<std::ptrdiff_t>(footprints.size() / 2);
  std::nth_element(footprints.begin(), mid, footprints.end());
  return 0.5 * *mid;
}

PointCloud fuse(const std::vector<DepthMap>& depths, const std::vector<ViewMask>& masks,
                const std::vector<ColorImage>& images, const std::vector<CameraView>& views,
                const FusionOptions& options) {
  const std::size_t n = depths.size();
  require(masks.size() == n && images.size() == n && views.size() == n, ErrorCode::ShapeMismatch,
          "depths, masks, images and views must align");

  std::vector<CloudPoint> raw;
  for (std::size_t i = 0; i < n; ++i) {
    require(masks[i].same_shape(depths[i].depth), ErrorCode::ShapeMismatch, "mask size mismatch");
    require(images[i].dim0() == depths[i].height() && images[i].dim1() == depths[i].width(), ErrorCode::ShapeMismatch,
            "image size mismatch");
    for (int y = 0; y < depths[i].height(); ++y) {
      for (int x = 0; x < depths[i].width(); ++x) {
        if (!masks[i](y, x)) continue;
        CloudPoint p;
        p.position = unproject(views[i], x, y, depths[i].depth(y, x));
        p.color = {images[i](y, x, 0), images[i](y, x, 1), images[i](y, x, 2)};
        p.view = static_cast<int>(i);
        raw.push_back(p);
      }
    }
  }

  const double radius = options.merge_radius < 0.0 ? estimate_merge_radius(depths, masks, views) : options.merge_radius;
  if (!(radius > 0.0)) return PointCloud{std::move(raw)};

  // Greedy clustering in input order. Each cluster is keyed by its first point
  // and absorbs later points within `radius` of that seed.
  struct Cluster {
    Eigen::Vector3d seed;
    Eigen::Vector3d sum;
    std::array<double, 3> color_sum;
    int count;
    int view;
  };
  using Cell = std::tuple<long, long, long>;
  auto cell_of = [radius](const Eigen::Vector3d& p) {
    return Cell{static_cast<long>(std::floor(p.x() / radius)), static_cast<long>(std::floor(p.y() / radius)),
                static_cast<long>(std::floor(p.z() / radius))};
  };
  std::vector<Cluster> clusters;
  std::map<Cell, std::vector<int>> grid;
  const double r2 = radius * radius;
  for (const CloudPoint& p : raw) {
    const Cell c = cell_of(p.position);
    int hit = -1;
    double best = r2;
    for (long dz = -1; dz <= 1; ++dz) {
      for (long dy = -1; dy <= 1; ++dy) {
        for (long dx = -1; dx <= 1; ++dx) {
          auto it = grid.find({std::get<0>(c) + dx, std::get<1>(c) + dy, std::get<2>(c) + dz});
          if (it == grid.end()) continue;
          for (int idx : it->second) {
            const double d2 = (clusters[idx].seed - p.position).squaredNorm();
            if (d2 < r2 && (hit < 0 || d2 < best || (d2 == best && idx < hit))) {
              best = d2;
              hit = idx;
            }
          }
        }
      }
    }
    if (hit >= 0) {
      Cluster& cl = clusters[hit];
      cl.sum += p.position;
      for (int k = 0; k < 3; ++k) cl.color_sum[k] += p.color[k];
      ++cl.count;
      continue;
    }
    grid[c].push_back(static_cast<int>(clusters.size()));
    clusters.push_back({p.position, p.position, {double(p.color[0]), double(p.color[1]), double(p.color[2])}, 1, p.view});
  }

  PointCloud cloud;
  cloud.points.reserve(clusters.size());
  for (const Cluster& cl : clusters) {
    CloudPoint p;
    p.position = cl.sum / cl.count;
    for (int k = 0; k < 3; ++k)
      p.color[k] = static_cast<std::uint8_t>(std::clamp(std::lround(cl.color_sum[k] / cl.count), 0L, 255L));
    p.view = cl.view;
    cloud.points.push_back(p);
  }
  return cloud;
}

}  // namespace amvs
