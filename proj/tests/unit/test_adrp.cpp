#include <doctest.h>

#include "amvs/adrp.hpp"
#include "helpers.hpp"

using namespace amvs;

namespace {

DepthMap random_depth(std::mt19937_64& rng, int h, int w, double lo, double hi) {
  DepthMap d(h, w);
  for (std::size_t i = 0; i < d.depth.size(); ++i) d.depth[i] = test::uniform(rng, lo, hi);
  return d;
}

SigmaMap random_sigma(std::mt19937_64& rng, int h, int w) {
  SigmaMap s(h, w);
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = test::uniform(rng, 0.1, 2);
  return s;
}

}  // namespace

TEST_SUITE("adrp") {
  TEST_CASE("range_extremes examples") {
    const RangeExtremes c = range_extremes(DepthMap(3, 4, 5.0));
    CHECK(c.min_y == 0);
    CHECK(c.min_x == 0);
    CHECK(c.max_y == 0);
    CHECK(c.max_x == 0);
    CHECK(c.min_depth == 5.0);
    CHECK(c.max_depth == 5.0);

    DepthMap d(4, 5, 6.0);
    d.depth(2, 3) = 4.0;
    d.depth(0, 1) = 9.0;
    const RangeExtremes e = range_extremes(d);
    CHECK(e.min_y == 2);
    CHECK(e.min_x == 3);
    CHECK(e.min_depth == 4.0);
    CHECK(e.max_y == 0);
    CHECK(e.max_x == 1);
    CHECK(e.max_depth == 9.0);

    CHECK_ERROR_CODE(range_extremes(DepthMap(3, 3, 1.0, false)), ErrorCode::EmptyDepthMap);
  }

  TEST_CASE("range_extremes skips invalid pixels") {
    DepthMap d(2, 2, 5.0);
    d.depth(1, 1) = 100.0;
    d.valid(1, 1) = 0;
    CHECK(range_extremes(d).max_depth == 5.0);
  }

  TEST_CASE("robust extremes drop the outer half percent") {
    DepthMap d(10, 20);
    for (int i = 0; i < 200; ++i) d.depth[i] = 100.0 + i;
    d.depth[0] = 1.0;      // outlier low
    d.depth[199] = 1e4;    // outlier high
    const RangeExtremes r = range_extremes(d, {true});
    CHECK(r.min_depth == 101.0);
    CHECK(r.max_depth == 298.0);
  }

  TEST_CASE("adjust_range examples") {
    DepthMap d(2, 2, 7.0);
    SigmaMap s(2, 2, 0.3);
    d.depth(1, 0) = 5.0;
    s(1, 0) = 0.4;
    d.depth(0, 1) = 9.0;
    s(0, 1) = 0.5;
    const DepthRange zero = adjust_range(d, s, {0.0, 0.0});
    CHECK(zero.d_min == 5.0);
    CHECK(zero.d_max == 9.0);
    const DepthRange r = adjust_range(d, s, {-1.0, 1.0});
    CHECK(r.d_min == doctest::Approx(5.0 - 0.4).epsilon(1e-15));
    CHECK(r.d_max == doctest::Approx(9.0 + 0.5).epsilon(1e-15));
    CHECK_ERROR_CODE(adjust_range(DepthMap(2, 2, 5.0), SigmaMap(2, 2, 0.0), {-3.0, 2.0}), ErrorCode::DegenerateRange);
  }

  TEST_CASE("adjust_range floors at the depth floor") {
    DepthMap d(1, 2, 1.0);
    d.depth(0, 1) = 2.0;
    const DepthRange r = adjust_range(d, SigmaMap(1, 2, 5.0), {-1.0, 1.0});
    CHECK(r.d_min == kDepthFloor);
    CHECK(r.d_max == 7.0);
  }

  TEST_CASE("nonnegative scalars always contain the extremes") {
    std::mt19937_64 rng(1);
    for (int i = 0; i < 300; ++i) {
      const DepthMap d = random_depth(rng, 4, 5, 10, 100);
      const SigmaMap s = random_sigma(rng, 4, 5);
      const RangeScalars sc{-test::uniform(rng, 0, 3), test::uniform(rng, 0, 3)};
      const RangeExtremes e = range_extremes(d);
      const DepthRange r = adjust_range(d, s, sc);
      CHECK(r.d_min <= e.min_depth);
      CHECK(r.d_max >= e.max_depth);
    }
  }

  TEST_CASE("calibrate_scalars examples") {
    CalibrationScene one{DepthMap(1, 2, 5.0), SigmaMap(1, 2, 1.0), {4.0, 7.0}};
    one.depth.depth(0, 1) = 6.0;
    const RangeScalars r = calibrate_scalars({one});
    CHECK(r.alpha_dr == -1.0);
    CHECK(r.beta_dr == 1.0);

    CalibrationScene exact{DepthMap(1, 2, 5.0), SigmaMap(1, 2, 0.7), {5.0, 6.0}};
    exact.depth.depth(0, 1) = 6.0;
    const RangeScalars z = calibrate_scalars({exact, exact});
    CHECK(z.alpha_dr == 0.0);
    CHECK(z.beta_dr == 0.0);

    CalibrationScene flat{DepthMap(1, 2, 5.0), SigmaMap(1, 2, 0.0), {4.0, 7.0}};
    CHECK_ERROR_CODE(calibrate_scalars({flat}), ErrorCode::InsufficientData);
    CHECK_ERROR_CODE(calibrate_scalars({}), ErrorCode::InsufficientData);
  }

  TEST_CASE("calibrate_scalars recovers generating scalars") {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 50; ++trial) {
      const double alpha = test::uniform(rng, -3, 0), beta = test::uniform(rng, 0, 3);
      std::vector<CalibrationScene> scenes;
      for (int k = 0; k < 4; ++k) {
        CalibrationScene s{random_depth(rng, 3, 4, 100, 900), random_sigma(rng, 3, 4), {}};
        const RangeExtremes e = range_extremes(s.depth);
        s.ground_truth = {e.min_depth + alpha * s.sigma(e.min_y, e.min_x), e.max_depth + beta * s.sigma(e.max_y, e.max_x)};
        scenes.push_back(s);
      }
      const RangeScalars fit = calibrate_scalars(scenes);
      CHECK(std::abs(fit.alpha_dr - alpha) <= 1e-9);
      CHECK(std::abs(fit.beta_dr - beta) <= 1e-9);
    }
  }

  TEST_CASE("overlap examples") {
    const OverlapReport same = overlap_metrics({0, 10}, {0, 10});
    CHECK(same.aog == 1.0);
    CHECK(same.aos == 1.0);
    CHECK(same.f_score == 1.0);
    const OverlapReport fixed = overlap_metrics({425, 905}, {425, 425 + 2.5 * 128});
    CHECK(fixed.aog == doctest::Approx(320.0 / 480.0).epsilon(1e-15));
    CHECK(fixed.aos == 1.0);
    const OverlapReport none = overlap_metrics({0, 1}, {2, 3});
    CHECK(none.aog == 0.0);
    CHECK(none.aos == 0.0);
    CHECK(none.f_score == 0.0);
  }

  TEST_CASE("overlap properties") {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 1000; ++i) {
      double a = test::uniform(rng, 0, 100), b = a + test::uniform(rng, 0.1, 50);
      double c = test::uniform(rng, 0, 100), d = c + test::uniform(rng, 0.1, 50);
      const OverlapReport ab = overlap_metrics({a, b}, {c, d});
      const OverlapReport ba = overlap_metrics({c, d}, {a, b});
      CHECK(ab.aog == ba.aos);
      CHECK(ab.aos == ba.aog);
      CHECK(ab.aog >= 0.0);
      CHECK(ab.aog <= 1.0);
      CHECK(ab.aos >= 0.0);
      CHECK(ab.aos <= 1.0);
      if (ab.aog > 0 && ab.aos > 0) CHECK(ab.f_score == doctest::Approx(2 * ab.aog * ab.aos / (ab.aog + ab.aos)));
      const bool identical = (a == c && b == d);
      CHECK((ab.aog == 1.0 && ab.aos == 1.0) == identical);
    }
  }

  TEST_CASE("depth_range_of spans the valid pixels") {
    DepthMap d(2, 2, 3.0);
    d.depth(1, 1) = 8.0;
    d.depth(0, 1) = 1.0;
    d.valid(0, 1) = 0;
    const DepthRange r = depth_range_of(d);
    CHECK(r.d_min == 3.0);
    CHECK(r.d_max == 8.0);
  }
}
