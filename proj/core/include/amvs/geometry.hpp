#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <Eigen/Core>

#include "amvs/array.hpp"

namespace amvs {

struct CameraIntrinsics {
  double fx = 1.0;
  double fy = 1.0;
  double cx = 0.0;
  double cy = 0.0;

  Eigen::Matrix3d matrix() const;
  // Intrinsics of the same camera after `levels` rounds of 2x box
  // downsampling (levels may be zero). Pixel centers stay at integers, so the
  // principal point moves by half a pixel per round.
  CameraIntrinsics downscaled(int levels) const;
  void validate() const;
};

// World-to-camera rigid transform: x_cam = rotation * x_world + translation.
struct CameraExtrinsics {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  Eigen::Vector3d center() const { return -rotation.transpose() * translation; }
  void validate() const;
};

struct DepthHint {
  double d_min = 0.0;
  double d_max = 0.0;
};

struct CameraView {
  CameraIntrinsics intrinsics;
  CameraExtrinsics extrinsics;
  std::optional<DepthHint> depth_hint;
  int image_id = 0;

  CameraView downscaled(int levels) const;
  void validate() const;
};

struct PixelDepth {
  double u = 0.0;
  double v = 0.0;
  double depth = 0.0;
};

// Projective map from reference pixels to source pixels, normalized so the
// bottom-right entry is one.
class Homography {
 public:
  Homography() = default;
  explicit Homography(const Eigen::Matrix3d& m);

  const Eigen::Matrix3d& matrix() const noexcept { return m_; }
  // Maps (u, v); returns false when the point lands at or behind infinity.
  bool apply(double u, double v, double& out_u, double& out_v) const;

 private:
  Eigen::Matrix3d m_ = Eigen::Matrix3d::Identity();
};

PixelDepth project(const CameraView& view, const Eigen::Vector3d& point);
Eigen::Vector3d unproject(const CameraView& view, double u, double v, double depth);

// Homography induced by the fronto-parallel plane z = depth of the reference
// camera: H = K_src (R_rel + t_rel n^T / depth) K_ref^-1 with n = (0, 0, 1).
Homography plane_homography(const CameraView& ref, const CameraView& src, double depth);

// Depth-parameterized form of the same map, H(d) p = A p + b / d, used when
// every pixel sweeps its own set of depths.
class PlaneSweepWarp {
 public:
  PlaneSweepWarp(const CameraView& ref, const CameraView& src);

  // Source pixel for reference pixel (u, v) lying at reference depth `depth`.
  bool map(double u, double v, double depth, double& out_u, double& out_v) const;

 private:
  Eigen::Matrix3d a_;
  Eigen::Vector3d b_;
};

struct WarpResult {
  Array3<double> warped;        // H x W x C
  Array2<std::uint8_t> valid;   // H x W
};

// Bilinear sample of `image` (H x W x C) at point (x, y). Returns false when the
// point lies outside [0, W-1] x [0, H-1]; `out` must hold C values.
bool sample_bilinear(const Array3<double>& image, double x, double y, double* out);

WarpResult warp_map(const Array3<double>& src_image, const Homography& h);

}  // namespace amvs
