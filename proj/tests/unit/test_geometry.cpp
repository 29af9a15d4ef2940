#include <doctest.h>

#include "amvs/geometry.hpp"
#include "helpers.hpp"

using namespace amvs;
using amvs::test::pinhole;

TEST_SUITE("geometry") {
  TEST_CASE("project on the principal ray") {
    const CameraView cam = pinhole(100, 50, 50);
    const PixelDepth p = project(cam, {0, 0, 10});
    CHECK(p.u == 50.0);
    CHECK(p.v == 50.0);
    CHECK(p.depth == 10.0);
  }

  TEST_CASE("project off axis matches fx * x / z + cx") {
    const CameraView cam = pinhole(100, 50, 50);
    const PixelDepth p = project(cam, {1, 0, 10});
    CHECK(p.u == doctest::Approx(100.0 * 1.0 / 10.0 + 50.0).epsilon(1e-15));
    CHECK(p.v == 50.0);
    CHECK(p.depth == 10.0);
  }

  TEST_CASE("project behind the camera") {
    CHECK_ERROR_CODE(project(pinhole(100, 50, 50), {0, 0, -1}), ErrorCode::PointBehindCamera);
    CHECK_ERROR_CODE(project(pinhole(100, 50, 50), {0, 0, 0}), ErrorCode::PointBehindCamera);
  }

  TEST_CASE("unproject examples") {
    const CameraView cam = pinhole(100, 50, 50);
    const Eigen::Vector3d a = unproject(cam, 50, 50, 10);
    CHECK((a - Eigen::Vector3d(0, 0, 10)).norm() == 0.0);
    const Eigen::Vector3d b = unproject(cam, 60, 50, 10);
    CHECK((b - Eigen::Vector3d(1, 0, 10)).norm() < 1e-12);
    CHECK_ERROR_CODE(unproject(cam, 50, 50, 0), ErrorCode::NonPositiveDepth);
  }

  TEST_CASE("project inverts unproject for random posed cameras") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 2000; ++i) {
      CameraView cam = pinhole(test::uniform(rng, 50, 500), test::uniform(rng, 0, 100), test::uniform(rng, 0, 80));
      cam.intrinsics.fy = cam.intrinsics.fx * test::uniform(rng, 0.8, 1.2);
      cam.extrinsics.rotation = test::random_rotation(rng, 3.0);
      cam.extrinsics.translation = {test::uniform(rng, -5, 5), test::uniform(rng, -5, 5), test::uniform(rng, -5, 5)};
      const double u = test::uniform(rng, -20, 120), v = test::uniform(rng, -20, 100), d = test::uniform(rng, 0.1, 1000);
      const PixelDepth p = project(cam, unproject(cam, u, v, d));
      CHECK(std::abs(p.u - u) <= 1e-9);
      CHECK(std::abs(p.v - v) <= 1e-9);
      CHECK(std::abs(p.depth - d) <= 1e-9 * std::max(1.0, d));
    }
  }

  TEST_CASE("self homography is the identity") {
    std::mt19937_64 rng(3);
    CameraView cam = pinhole(120, 40, 30);
    cam.extrinsics.rotation = test::random_rotation(rng, 1.0);
    for (double d : {0.5, 2.0, 10.0, 1e4}) {
      const Homography h = plane_homography(cam, cam, d);
      CHECK((h.matrix() - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() < 1e-12);
    }
  }

  TEST_CASE("rectified homography is a disparity shift") {
    const CameraView ref = pinhole(100, 50, 50);
    const CameraView src = test::translated(ref, {-1, 0, 0});  // source sits at x = -1: ref coords shift right
    const Homography h10 = plane_homography(ref, src, 10);
    Eigen::Matrix3d expected;
    expected << 1, 0, 10, 0, 1, 0, 0, 0, 1;
    CHECK((h10.matrix() - expected).cwiseAbs().maxCoeff() < 1e-12);
    for (double d : {2.0, 5.0, 10.0, 40.0}) {
      const Homography h = plane_homography(ref, src, d);
      double u = 0, v = 0;
      REQUIRE(h.apply(17.0, 23.0, u, v));
      CHECK(std::abs(u - 17.0 - 100.0 / d) <= 1e-9);
      CHECK(std::abs(v - 23.0) <= 1e-9);
    }
    CHECK_ERROR_CODE(plane_homography(ref, src, 0.0), ErrorCode::NonPositiveDepth);
  }

  TEST_CASE("homography agrees with projecting the plane point") {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 200; ++i) {
      CameraView ref = pinhole(80, 40, 32);
      ref.extrinsics.rotation = test::random_rotation(rng, 0.3);
      ref.extrinsics.translation = {test::uniform(rng, -1, 1), test::uniform(rng, -1, 1), 0};
      CameraView src = pinhole(90, 41, 30);
      src.extrinsics.rotation = test::random_rotation(rng, 0.3);
      src.extrinsics.translation = {test::uniform(rng, -2, 2), test::uniform(rng, -2, 2), test::uniform(rng, -1, 1)};
      const double d = test::uniform(rng, 5, 50), u = test::uniform(rng, 0, 80), v = test::uniform(rng, 0, 64);
      const PixelDepth p = project(src, unproject(ref, u, v, d));
      double hu = 0, hv = 0;
      REQUIRE(plane_homography(ref, src, d).apply(u, v, hu, hv));
      CHECK(std::abs(hu - p.u) < 1e-9);
      CHECK(std::abs(hv - p.v) < 1e-9);
      double wu = 0, wv = 0;
      REQUIRE(PlaneSweepWarp(ref, src).map(u, v, d, wu, wv));
      CHECK(std::abs(wu - p.u) < 1e-9);
      CHECK(std::abs(wv - p.v) < 1e-9);
    }
  }

  TEST_CASE("intrinsics and extrinsics validation") {
    CameraIntrinsics k{0, 100, 1, 1};
    CHECK_ERROR_CODE(k.validate(), ErrorCode::SingularIntrinsics);
    CameraExtrinsics e;
    e.rotation(0, 0) = 2.0;
    CHECK_ERROR_CODE(e.validate(), ErrorCode::InvalidCamera);
    CameraExtrinsics mirror;
    mirror.rotation(2, 2) = -1.0;
    CHECK_ERROR_CODE(mirror.validate(), ErrorCode::InvalidCamera);
    CameraView v = pinhole(10, 1, 1);
    v.depth_hint = DepthHint{5, 4};
    CHECK_ERROR_CODE(v.validate(), ErrorCode::InvalidCamera);
  }

  TEST_CASE("downscaled intrinsics keep integer pixel centers") {
    const CameraIntrinsics k{100, 80, 39.5, 31.5};
    const CameraIntrinsics h = k.downscaled(1);
    CHECK(h.fx == 50.0);
    CHECK(h.fy == 40.0);
    // pixel 2x and 2x+1 average to x: center (2x + 0.5) maps to x
    CHECK(h.cx == doctest::Approx((39.5 - 0.5) / 2.0));
    CHECK(h.cy == doctest::Approx((31.5 - 0.5) / 2.0));
    const CameraIntrinsics same = k.downscaled(0);
    CHECK(same.cx == k.cx);
  }

  TEST_CASE("warp_map identity") {
    Array3<double> img(4, 5, 2);
    for (std::size_t i = 0; i < img.size(); ++i) img[i] = static_cast<double>(i) * 0.37;
    const WarpResult w = warp_map(img, Homography());
    CHECK(w.warped == img);
    for (std::size_t i = 0; i < w.valid.size(); ++i) CHECK(w.valid[i] == 1);
  }

  TEST_CASE("warp_map integer shift is bit exact") {
    std::mt19937_64 rng(9);
    Array3<double> img(12, 30, 3);
    for (std::size_t i = 0; i < img.size(); ++i) img[i] = test::uniform(rng, -1, 1);
    Eigen::Matrix3d m = Eigen::Matrix3d::Identity();
    m(0, 2) = 10;
    const WarpResult w = warp_map(img, Homography(m));
    for (int y = 0; y < 12; ++y)
      for (int x = 0; x < 30; ++x) {
        if (x + 10 <= 29) {
          REQUIRE(w.valid(y, x) == 1);
          for (int c = 0; c < 3; ++c) CHECK(w.warped(y, x, c) == img(y, x + 10, c));
        } else {
          CHECK(w.valid(y, x) == 0);
        }
      }
  }

  TEST_CASE("warp_map outside the image") {
    Array3<double> img(6, 6, 1, 1.0);
    Eigen::Matrix3d m = Eigen::Matrix3d::Identity();
    m(0, 2) = 1000;
    const WarpResult w = warp_map(img, Homography(m));
    for (std::size_t i = 0; i < w.valid.size(); ++i) CHECK(w.valid[i] == 0);
    for (std::size_t i = 0; i < w.warped.size(); ++i) CHECK(w.warped[i] == 0.0);
    CHECK_ERROR_CODE(warp_map(Array3<double>(1, 5, 1), Homography()), ErrorCode::ImageTooSmall);
  }

  TEST_CASE("bilinear sampling against a hand oracle") {
    Array3<double> img(2, 2, 1);
    img(0, 0, 0) = 1;
    img(0, 1, 0) = 2;
    img(1, 0, 0) = 3;
    img(1, 1, 0) = 4;
    double out = 0;
    REQUIRE(sample_bilinear(img, 0.25, 0.5, &out));
    CHECK(out == doctest::Approx(0.5 * (0.75 * 1 + 0.25 * 2) + 0.5 * (0.75 * 3 + 0.25 * 4)));
    CHECK(sample_bilinear(img, 1.0, 1.0, &out));
    CHECK(out == 4.0);
    CHECK_FALSE(sample_bilinear(img, 1.0001, 0.0, &out));
    CHECK_FALSE(sample_bilinear(img, -0.0001, 0.0, &out));
  }
}
