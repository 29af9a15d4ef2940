#include "amvs/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include <Eigen/LU>

#include "amvs/error.hpp"
#include "amvs/parallel.hpp"

namespace amvs {

Eigen::Matrix3d CameraIntrinsics::matrix() const {
  Eigen::Matrix3d k;
  k << fx, 0.0, cx, 0.0, fy, cy, 0.0, 0.0, 1.0;
  return k;
}

CameraIntrinsics CameraIntrinsics::downscaled(int levels) const {
  CameraIntrinsics out = *this;
  for (int i = 0; i < levels; ++i) {
    out.fx *= 0.5;
    out.fy *= 0.5;
    out.cx = (out.cx - 0.5) * 0.5;
    out.cy = (out.cy - 0.5) * 0.5;
  }
  return out;
}

void CameraIntrinsics::validate() const {
  require(std::isfinite(fx) && std::isfinite(fy) && fx > 0.0 && fy > 0.0, ErrorCode::SingularIntrinsics,
          "focal lengths must be positive");
  require(std::isfinite(cx) && std::isfinite(cy), ErrorCode::SingularIntrinsics, "principal point must be finite");
}

void CameraExtrinsics::validate() const {
  const double ortho = (rotation.transpose() * rotation - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
  require(ortho <= 1e-9, ErrorCode::InvalidCamera, "rotation is not orthonormal");
  require(std::abs(rotation.determinant() - 1.0) <= 1e-9, ErrorCode::InvalidCamera, "rotation determinant is not +1");
  require(translation.allFinite(), ErrorCode::InvalidCamera, "translation must be finite");
}

CameraView CameraView::downscaled(int levels) const {
  CameraView out = *this;
  out.intrinsics = intrinsics.downscaled(levels);
  return out;
}

void CameraView::validate() const {
  intrinsics.validate();
  extrinsics.validate();
  if (depth_hint) {
    require(depth_hint->d_min > 0.0 && depth_hint->d_min < depth_hint->d_max, ErrorCode::InvalidCamera,
            "depth hint must satisfy 0 < d_min < d_max");
  }
}

Homography::Homography(const Eigen::Matrix3d& m) : m_(m) {
  require(m.allFinite(), ErrorCode::SingularIntrinsics, "homography has non-finite entries");
  require(m(2, 2) != 0.0, ErrorCode::SingularIntrinsics, "homography has zero bottom-right entry");
  m_ /= m(2, 2);
  require(std::abs(m_.determinant()) > 0.0, ErrorCode::SingularIntrinsics, "homography is singular");
}

bool Homography::apply(double u, double v, double& out_u, double& out_v) const {
  const double x = m_(0, 0) * u + m_(0, 1) * v + m_(0, 2);
  const double y = m_(1, 0) * u + m_(1, 1) * v + m_(1, 2);
  const double w = m_(2, 0) * u + m_(2, 1) * v + m_(2, 2);
  if (!(w > 0.0)) return false;
  out_u = x / w;
  out_v = y / w;
  return std::isfinite(out_u) && std::isfinite(out_v);
}

PixelDepth project(const CameraView& view, const Eigen::Vector3d& point) {
  const Eigen::Vector3d cam = view.extrinsics.rotation * point + view.extrinsics.translation;
  require(cam.z() > 0.0, ErrorCode::PointBehindCamera, "point lies behind the camera");
  const auto& k = view.intrinsics;
  return {k.fx * cam.x() / cam.z() + k.cx, k.fy * cam.y() / cam.z() + k.cy, cam.z()};
}

Eigen::Vector3d unproject(const CameraView& view, double u, double v, double depth) {
  require(depth > 0.0, ErrorCode::NonPositiveDepth, "depth must be positive");
  const auto& k = view.intrinsics;
  const Eigen::Vector3d cam((u - k.cx) / k.fx * depth, (v - k.cy) / k.fy * depth, depth);
  return view.extrinsics.rotation.transpose() * (cam - view.extrinsics.translation);
}

namespace {

struct RelativePose {
  Eigen::Matrix3d rotation;
  Eigen::Vector3d translation;
};

RelativePose relative_pose(const CameraView& ref, const CameraView& src) {
  const Eigen::Matrix3d r = src.extrinsics.rotation * ref.extrinsics.rotation.transpose();
  return {r, src.extrinsics.translation - r * ref.extrinsics.translation};
}

Eigen::Matrix3d inverse_intrinsics(const CameraIntrinsics& k) {
  k.validate();
  Eigen::Matrix3d inv;
  inv << 1.0 / k.fx, 0.0, -k.cx / k.fx, 0.0, 1.0 / k.fy, -k.cy / k.fy, 0.0, 0.0, 1.0;
  return inv;
}

}  // namespace

Homography plane_homography(const CameraView& ref, const CameraView& src, double depth) {
  require(depth > 0.0 && std::isfinite(depth), ErrorCode::NonPositiveDepth, "plane depth must be positive");
  src.intrinsics.validate();
  const RelativePose rel = relative_pose(ref, src);
  const Eigen::RowVector3d normal(0.0, 0.0, 1.0);
  const Eigen::Matrix3d h =
      src.intrinsics.matrix() * (rel.rotation + rel.translation * normal / depth) * inverse_intrinsics(ref.intrinsics);
  return Homography(h);
}

PlaneSweepWarp::PlaneSweepWarp(const CameraView& ref, const CameraView& src) {
  src.intrinsics.validate();
  const RelativePose rel = relative_pose(ref, src);
  const Eigen::Matrix3d k_src = src.intrinsics.matrix();
  a_ = k_src * rel.rotation * inverse_intrinsics(ref.intrinsics);
  b_ = k_src * rel.translation;
}

bool PlaneSweepWarp::map(double u, double v, double depth, double& out_u, double& out_v) const {
  require(depth > 0.0 && std::isfinite(depth), ErrorCode::NonPositiveDepth, "plane depth must be positive");
  const double inv_d = 1.0 / depth;
  const double x = a_(0, 0) * u + a_(0, 1) * v + a_(0, 2) + b_(0) * inv_d;
  const double y = a_(1, 0) * u + a_(1, 1) * v + a_(1, 2) + b_(1) * inv_d;
  const double w = a_(2, 0) * u + a_(2, 1) * v + a_(2, 2) + b_(2) * inv_d;
  if (!(w > 0.0)) return false;
  out_u = x / w;
  out_v = y / w;
  return std::isfinite(out_u) && std::isfinite(out_v);
}

bool sample_bilinear(const Array3<double>& image, double x, double y, double* out) {
  const int h = image.dim0();
  const int w = image.dim1();
  const int c = image.dim2();
  if (!(x >= 0.0 && y >= 0.0 && x <= w - 1 && y <= h - 1)) return false;
  int x0 = static_cast<int>(x);
  int y0 = static_cast<int>(y);
  double ax = x - x0;
  double ay = y - y0;
  // Keep the 2x2 stencil inside the image on the last row/column.
  if (x0 == w - 1 && w > 1) {
    x0 -= 1;
    ax = 1.0;
  }
  if (y0 == h - 1 && h > 1) {
    y0 -= 1;
    ay = 1.0;
  }
  const int x1 = std::min(x0 + 1, w - 1);
  const int y1 = std::min(y0 + 1, h - 1);
  const double w00 = (1.0 - ax) * (1.0 - ay);
  const double w01 = ax * (1.0 - ay);
  const double w10 = (1.0 - ax) * ay;
  const double w11 = ax * ay;
  const double* p00 = &image(y0, x0, 0);
  const double* p01 = &image(y0, x1, 0);
  const double* p10 = &image(y1, x0, 0);
  const double* p11 = &image(y1, x1, 0);
  for (int k = 0; k < c; ++k) {
    out[k] = w00 * p00[k] + w01 * p01[k] + w10 * p10[k] + w11 * p11[k];
  }
  return true;
}

WarpResult warp_map(const Array3<double>& src_image, const Homography& h) {
  const int height = src_image.dim0();
  const int width = src_image.dim1();
  const int channels = src_image.dim2();
  require(height >= 2 && width >= 2, ErrorCode::ImageTooSmall, "warp_map needs at least a 2x2 image");

  WarpResult result{Array3<double>(height, width, channels, 0.0), Array2<std::uint8_t>(height, width, 0)};
  parallel_for(0, height, [&](int y) {
    for (int x = 0; x < width; ++x) {
      double su = 0.0;
      double sv = 0.0;
      if (!h.apply(x, y, su, sv)) continue;
      if (sample_bilinear(src_image, su, sv, &result.warped(y, x, 0))) result.valid(y, x) = 1;
    }
  });
  return result;
}

}  // namespace amvs
