#include "amvs/adia.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "amvs/error.hpp"
#include "amvs/parallel.hpp"

namespace amvs {

double sigma_floor(double mean_interval) { return std::max(1e-6, 1e-3 * mean_interval); }

PixelRangeMap pixelwise_range(const DepthMap& depth, const SigmaMap& sigma, const DepthRange& global, double floor) {
  require(depth.depth.same_shape(sigma), ErrorCode::ShapeMismatch, "sigma map differs in size from depth map");
  require(global.d_min < global.d_max, ErrorCode::DegenerateRange, "global range is empty");
  const int h = depth.height();
  const int w = depth.width();
  PixelRangeMap out{Array2<double>(h, w), Array2<double>(h, w)};
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double center = std::clamp(depth.depth(y, x), global.d_min, global.d_max);
      const double s = std::max(sigma(y, x), floor);
      out.d_min(y, x) = std::max(center - s, global.d_min);
      out.d_max(y, x) = std::min(center + s, global.d_max);
    }
  }
  return out;
}

HypothesisPlanes equal_partition(const DepthRange& range, int count) {
  require(count >= 2, ErrorCode::InvalidCount, "at least two planes are required");
  require(range.d_min < range.d_max, ErrorCode::DegenerateRange, "depth range is empty");
  const double interval = (range.d_max - range.d_min) / count;
  std::vector<double> values(count);
  for (int j = 0; j < count; ++j) values[j] = range.d_min + j * interval;
  return HypothesisPlanes::global(std::move(values), interval);
}

HypothesisPlanes equal_partition(const PixelRangeMap& range, int count) {
  require(count >= 2, ErrorCode::InvalidCount, "at least two planes are required");
  require(range.d_min.same_shape(range.d_max), ErrorCode::ShapeMismatch, "range maps differ in size");
  const int h = range.d_min.height();
  const int w = range.d_min.width();
  Array3<double> values(count, h, w);
  Array2<double> interval(h, w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double lo = range.d_min(y, x);
      const double hi = range.d_max(y, x);
      require(lo < hi, ErrorCode::DegenerateRange, "pixel-wise range is empty");
      const double step = (hi - lo) / count;
      interval(y, x) = step;
      for (int j = 0; j < count; ++j) values(j, y, x) = lo + j * step;
    }
  }
  return HypothesisPlanes::per_pixel(std::move(values), std::move(interval));
}

OffsetVolume offsets(const HypothesisPlanes& planes, const DepthMap& previous, const SigmaMap& sigma,
                     OffsetMode mode) {
  const int h = previous.height();
  const int w = previous.width();
  const int d = planes.count();
  require(previous.depth.same_shape(sigma), ErrorCode::ShapeMismatch, "sigma map differs in size from depth map");
  require(planes.fits(h, w), ErrorCode::ShapeMismatch, "planes differ in size from depth map");

  OffsetVolume out(d, h, w, 0.0);
  parallel_for(0, h, [&](int y) {
    std::vector<double> z(d);
    for (int x = 0; x < w; ++x) {
      const double mean = previous.depth(y, x);
      double scale = 1.0;
      if (mode == OffsetMode::ZScore) {
        require(sigma(y, x) > 0.0, ErrorCode::NonPositiveSigma, "z-score offsets need a positive sigma");
        scale = sigma(y, x);
      }
      double best = -std::numeric_limits<double>::infinity();
      for (int j = 0; j < d; ++j) {
        z[j] = (planes.value(j, y, x) - mean) / scale;
        best = std::max(best, z[j]);
      }
      double sum = 0.0;
      for (int j = 0; j < d; ++j) {
        z[j] = std::exp(z[j] - best);
        sum += z[j];
      }
      for (int j = 0; j < d; ++j) out(j, y, x) = z[j] / sum;
    }
  });
  return out;
}

HypothesisPlanes adjust_planes(const HypothesisPlanes& planes, const OffsetVolume& offsets) {
  const int d = offsets.dim0();
  const int h = offsets.dim1();
  const int w = offsets.dim2();
  require(d == planes.count() && planes.fits(h, w), ErrorCode::ShapeMismatch, "offsets differ in shape from planes");
  Array3<double> values(d, h, w);
  Array2<double> interval(h, w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double step = planes.interval(y, x);
      interval(y, x) = step;
      for (int j = 0; j < d; ++j) values(j, y, x) = planes.value(j, y, x) + step * offsets(j, y, x);
    }
  }
  return HypothesisPlanes::per_pixel(std::move(values), std::move(interval));
}

}  // namespace amvs
