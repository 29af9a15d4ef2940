#include "amvs/cost_volume.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "amvs/error.hpp"
#include "amvs/parallel.hpp"

namespace amvs {

HypothesisPlanes HypothesisPlanes::global(std::vector<double> values, double interval) {
  HypothesisPlanes planes;
  planes.mode_ = Mode::Global;
  planes.count_ = static_cast<int>(values.size());
  planes.global_values_ = std::move(values);
  planes.global_interval_ = interval;
  return planes;
}

HypothesisPlanes HypothesisPlanes::per_pixel(Array3<double> values, Array2<double> interval) {
  require(values.dim1() == interval.height() && values.dim2() == interval.width(), ErrorCode::ShapeMismatch,
          "per-pixel planes and interval map disagree in size");
  HypothesisPlanes planes;
  planes.mode_ = Mode::PerPixel;
  planes.count_ = values.dim0();
  planes.pixel_values_ = std::move(values);
  planes.pixel_interval_ = std::move(interval);
  return planes;
}

double HypothesisPlanes::mean_interval() const {
  if (is_global()) return global_interval_;
  double sum = 0.0;
  for (double v : pixel_interval_.values()) sum += v;
  return pixel_interval_.empty() ? 0.0 : sum / static_cast<double>(pixel_interval_.size());
}

void HypothesisPlanes::validate() const {
  require(count_ >= 1, ErrorCode::InvalidSpec, "no hypothesis planes");
  auto check_column = [&](auto value_at, double interval) {
    require(std::isfinite(interval) && interval > 0.0, ErrorCode::InvalidSpec, "plane interval must be positive");
    for (int j = 0; j < count_; ++j) {
      require(std::isfinite(value_at(j)), ErrorCode::InvalidSpec, "non-finite plane depth");
      if (j > 0) require(value_at(j) > value_at(j - 1), ErrorCode::InvalidSpec, "planes must strictly increase");
    }
  };
  if (is_global()) {
    check_column([&](int j) { return global_values_[j]; }, global_interval_);
    return;
  }
  for (int y = 0; y < height(); ++y)
    for (int x = 0; x < width(); ++x) check_column([&](int j) { return pixel_values_(j, y, x); }, pixel_interval_(y, x));
}

FeatureVolume build_feature_volume(const FeatureMap& src, const CameraView& ref_view, const CameraView& src_view,
                                   const HypothesisPlanes& planes) {
  const int h = src.dim0();
  const int w = src.dim1();
  const int c = src.dim2();
  require(planes.fits(h, w), ErrorCode::ResolutionMismatch, "per-pixel planes do not match the feature resolution");
  const int d = planes.count();

  FeatureVolume volume;
  volume.valid = Array3<std::uint8_t>(d, h, w, 0);
  volume.slices.reserve(d);

  if (planes.is_global()) {
    for (int j = 0; j < d; ++j) {
      WarpResult warped = warp_map(src, plane_homography(ref_view, src_view, planes.global_values()[j]));
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) volume.valid(j, y, x) = warped.valid(y, x);
      volume.slices.push_back(std::move(warped.warped));
    }
    return volume;
  }

  const PlaneSweepWarp warp(ref_view, src_view);
  for (int j = 0; j < d; ++j) volume.slices.emplace_back(h, w, c, 0.0);
  parallel_for(0, d * h, [&](int row) {
    const int j = row / h;
    const int y = row % h;
    for (int x = 0; x < w; ++x) {
      double su = 0.0;
      double sv = 0.0;
      if (!warp.map(x, y, planes.value(j, y, x), su, sv)) continue;
      if (sample_bilinear(src, su, sv, &volume.slices[j](y, x, 0))) volume.valid(j, y, x) = 1;
    }
  });
  return volume;
}

CostVolume aggregate_variance(const FeatureMap& ref, const std::vector<FeatureVolume>& volumes) {
  require(!volumes.empty(), ErrorCode::NoSourceViews, "at least one source volume is required");
  const int h = ref.dim0();
  const int w = ref.dim1();
  const int c = ref.dim2();
  const int d = static_cast<int>(volumes.front().slices.size());
  for (const auto& v : volumes) {
    require(static_cast<int>(v.slices.size()) == d && v.valid.dim0() == d && v.valid.dim1() == h &&
                v.valid.dim2() == w,
            ErrorCode::ShapeMismatch, "feature volumes disagree in shape");
    for (const auto& s : v.slices) require(s.same_shape(ref), ErrorCode::ShapeMismatch, "slice shape mismatch");
  }

  CostVolume out{Array3<double>(d, h, w, kSentinelCost), Array3<std::uint8_t>(d, h, w, 0)};
  parallel_for(0, d * h, [&](int row) {
    const int j = row / h;
    const int y = row % h;
    std::vector<const double*> samples;
    samples.reserve(volumes.size() + 1);
    for (int x = 0; x < w; ++x) {
      samples.clear();
      samples.push_back(&ref(y, x, 0));
      for (const auto& v : volumes)
        if (v.valid(j, y, x)) samples.push_back(&v.slices[j](y, x, 0));
      const int n = static_cast<int>(samples.size());
      out.valid_views(j, y, x) = static_cast<std::uint8_t>(n);
      if (n < 2) continue;
      double total = 0.0;
      for (int k = 0; k < c; ++k) {
        double sum = 0.0;
        for (const double* s : samples) sum += s[k];
        const double mean = sum / n;
        double sq = 0.0;
        for (const double* s : samples) {
          const double dv = s[k] - mean;
          sq += dv * dv;
        }
        total += sq / n;
      }
      out.cost(j, y, x) = total / c;
    }
  });
  return out;
}

CostVolume regularize(const CostVolume& volume, int radius, int passes) {
  require(radius >= 0 && passes >= 0, ErrorCode::InvalidConfig, "radius and passes must be nonnegative");
  CostVolume current = volume;
  if (radius == 0 || passes == 0) return current;
  const int d = volume.cost.dim0();
  const int h = volume.cost.dim1();
  const int w = volume.cost.dim2();
  auto usable = [&](int j, int y, int x) { return volume.valid_views(j, y, x) >= 2; };

  for (int pass = 0; pass < passes; ++pass) {
    CostVolume next = current;
    parallel_for(0, d * h, [&](int row) {
      const int j = row / h;
      const int y = row % h;
      for (int x = 0; x < w; ++x) {
        if (!usable(j, y, x)) continue;
        double sum = 0.0;
        int count = 0;
        for (int yy = std::max(0, y - radius); yy <= std::min(h - 1, y + radius); ++yy) {
          for (int xx = std::max(0, x - radius); xx <= std::min(w - 1, x + radius); ++xx) {
            if (!usable(j, yy, xx)) continue;
            sum += current.cost(j, yy, xx);
            ++count;
          }
        }
        next.cost(j, y, x) = sum / count;
      }
    });
    current = std::move(next);
  }
  return current;
}

ProbabilityVolume to_probability(const CostVolume& volume, double temperature) {
  require(temperature > 0.0 && std::isfinite(temperature), ErrorCode::NonPositiveTemperature,
          "softmax temperature must be positive");
  const int d = volume.cost.dim0();
  const int h = volume.cost.dim1();
  const int w = volume.cost.dim2();
  ProbabilityVolume out{Array3<double>(d, h, w, 0.0)};
  parallel_for(0, h, [&](int y) {
    for (int x = 0; x < w; ++x) {
      double best = std::numeric_limits<double>::infinity();
      for (int j = 0; j < d; ++j) best = std::min(best, volume.cost(j, y, x));
      double sum = 0.0;
      for (int j = 0; j < d; ++j) {
        const double e = std::exp(-(volume.cost(j, y, x) - best) / temperature);
        out.prob(j, y, x) = e;
        sum += e;
      }
      for (int j = 0; j < d; ++j) out.prob(j, y, x) /= sum;
    }
  });
  return out;
}

namespace {

void require_aligned(const ProbabilityVolume& p, const HypothesisPlanes& planes) {
  require(p.prob.dim0() == planes.count(), ErrorCode::ShapeMismatch, "plane count differs from probability volume");
  require(planes.fits(p.prob.dim1(), p.prob.dim2()), ErrorCode::ShapeMismatch,
          "per-pixel planes differ in size from probability volume");
}

}  // namespace

DepthMap regress_depth(const ProbabilityVolume& p, const HypothesisPlanes& planes) {
  require_aligned(p, planes);
  const int d = p.prob.dim0();
  const int h = p.prob.dim1();
  const int w = p.prob.dim2();
  DepthMap out(h, w);
  parallel_for(0, h, [&](int y) {
    for (int x = 0; x < w; ++x) {
      double sum = 0.0;
      for (int j = 0; j < d; ++j) sum += p.prob(j, y, x) * planes.value(j, y, x);
      out.depth(y, x) = sum;
    }
  });
  return out;
}

SigmaMap sigma_map(const ProbabilityVolume& p, const HypothesisPlanes& planes, const DepthMap& depth) {
  require_aligned(p, planes);
  const int d = p.prob.dim0();
  const int h = p.prob.dim1();
  const int w = p.prob.dim2();
  require(depth.height() == h && depth.width() == w, ErrorCode::ShapeMismatch, "depth map differs in size");
  SigmaMap out(h, w, 0.0);
  parallel_for(0, h, [&](int y) {
    for (int x = 0; x < w; ++x) {
      double sum = 0.0;
      for (int j = 0; j < d; ++j) {
        const double r = planes.value(j, y, x) - depth.depth(y, x);
        sum += p.prob(j, y, x) * r * r;
      }
      out(y, x) = std::sqrt(sum);
    }
  });
  return out;
}

ConfidenceMap confidence_map(const ProbabilityVolume& p) {
  const int d = p.prob.dim0();
  const int h = p.prob.dim1();
  const int w = p.prob.dim2();
  ConfidenceMap out(h, w, 0.0);
  parallel_for(0, h, [&](int y) {
    for (int x = 0; x < w; ++x) {
      int arg = 0;
      for (int j = 1; j < d; ++j)
        if (p.prob(j, y, x) > p.prob(arg, y, x)) arg = j;
      const int lo = std::clamp(arg - 1, 0, std::max(0, d - 4));
      const int hi = std::min(d, lo + 4);
      double sum = 0.0;
      for (int j = lo; j < hi; ++j) sum += p.prob(j, y, x);
      out(y, x) = std::clamp(sum, 0.0, 1.0);
    }
  });
  return out;
}

Array2<std::uint8_t> supported_pixels(const CostVolume& volume) {
  const int d = volume.cost.dim0();
  const int h = volume.cost.dim1();
  const int w = volume.cost.dim2();
  Array2<std::uint8_t> out(h, w, 0);
  for (int j = 0; j < d; ++j)
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        if (volume.valid_views(j, y, x) >= 2) out(y, x) = 1;
  return out;
}

}  // namespace amvs
