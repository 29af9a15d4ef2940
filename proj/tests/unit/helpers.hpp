#pragma once

#include <cmath>
#include <random>

#include <Eigen/Geometry>
#include <doctest.h>

#include "amvs/error.hpp"

#include "amvs/geometry.hpp"

namespace amvs::test {

inline ErrorCode error_code_of(const auto& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an amvs::Error");
  return ErrorCode::IoError;
}

#define CHECK_ERROR_CODE(expr, code) CHECK(::amvs::test::error_code_of([&] { (void)(expr); }) == (code))

inline CameraView pinhole(double f, double cx, double cy) {
  CameraView v;
  v.intrinsics = {f, f, cx, cy};
  return v;
}

// Camera at `center` looking down +z with no rotation.
inline CameraView translated(const CameraView& base, const Eigen::Vector3d& center) {
  CameraView v = base;
  v.extrinsics.translation = -center;
  return v;
}

inline Eigen::Matrix3d random_rotation(std::mt19937_64& rng, double max_angle) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::Vector3d axis(u(rng), u(rng), u(rng));
  axis.normalize();
  return Eigen::AngleAxisd(max_angle * u(rng), axis).toRotationMatrix();
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int uniform_int(std::mt19937_64& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

}  // namespace amvs::test
