#pragma once

#include <cstdint>
#include <vector>

#include "amvs/array.hpp"
#include "amvs/features.hpp"
#include "amvs/geometry.hpp"

namespace amvs {

inline constexpr double kSentinelCost = 1e6;

// Ordered depth hypotheses, either shared by every pixel or per pixel.
class HypothesisPlanes {
 public:
  enum class Mode { Global, PerPixel };

  static HypothesisPlanes global(std::vector<double> values, double interval);
  static HypothesisPlanes per_pixel(Array3<double> values, Array2<double> interval);

  Mode mode() const noexcept { return mode_; }
  bool is_global() const noexcept { return mode_ == Mode::Global; }
  int count() const noexcept { return count_; }
  // Per-pixel planes report their grid; global planes report 0 x 0.
  int height() const noexcept { return pixel_values_.dim1(); }
  int width() const noexcept { return pixel_values_.dim2(); }

  double value(int j, int y, int x) const {
    return is_global() ? global_values_[j] : pixel_values_(j, y, x);
  }
  double interval(int y, int x) const { return is_global() ? global_interval_ : pixel_interval_(y, x); }

  const std::vector<double>& global_values() const noexcept { return global_values_; }
  double global_interval() const noexcept { return global_interval_; }
  const Array3<double>& pixel_values() const noexcept { return pixel_values_; }
  const Array2<double>& pixel_interval() const noexcept { return pixel_interval_; }

  // True when the planes can be evaluated on an H x W grid.
  bool fits(int height, int width) const noexcept {
    return is_global() || (this->height() == height && this->width() == width);
  }
  double mean_interval() const;

  // Throws InvalidSpec unless planes are finite, strictly increasing at every
  // pixel and the interval is positive.
  void validate() const;

 private:
  Mode mode_ = Mode::Global;
  int count_ = 0;
  std::vector<double> global_values_;
  double global_interval_ = 0.0;
  Array3<double> pixel_values_;   // D x H x W
  Array2<double> pixel_interval_;
};

struct FeatureVolume {
  std::vector<FeatureMap> slices;  // one H x W x C map per plane
  Array3<std::uint8_t> valid;      // D x H x W
};

struct CostVolume {
  Array3<double> cost;                // D x H x W, lower is better
  Array3<std::uint8_t> valid_views;   // views (ref included) seen per cell
};

struct ProbabilityVolume {
  Array3<double> prob;  // D x H x W, sums to one along D
};

struct DepthMap {
  Array2<double> depth;
  Array2<std::uint8_t> valid;

  DepthMap() = default;
  DepthMap(int height, int width, double fill = 0.0, bool is_valid = true)
      : depth(height, width, fill), valid(height, width, is_valid ? 1 : 0) {}

  int height() const noexcept { return depth.height(); }
  int width() const noexcept { return depth.width(); }
  bool is_valid(int y, int x) const noexcept { return valid(y, x) != 0; }
};

using SigmaMap = Array2<double>;
using ConfidenceMap = Array2<double>;

FeatureVolume build_feature_volume(const FeatureMap& src, const CameraView& ref_view, const CameraView& src_view,
                                   const HypothesisPlanes& planes);

// Mean over channels of the population variance across the reference and
// every source whose sample is valid. Fewer than two valid views gives
// kSentinelCost.
CostVolume aggregate_variance(const FeatureMap& ref, const std::vector<FeatureVolume>& volumes);

// Box filter of each depth slice, repeated `passes` times. Sentinel cells
// neither contribute nor change.
CostVolume regularize(const CostVolume& volume, int radius, int passes);

ProbabilityVolume to_probability(const CostVolume& volume, double temperature = 1.0);

// Soft argmax: L(x) = sum_j P_j(x) d_j(x).
DepthMap regress_depth(const ProbabilityVolume& p, const HypothesisPlanes& planes);

// sigma(x) = sqrt(sum_j P_j(x) (d_j(x) - L(x))^2)
SigmaMap sigma_map(const ProbabilityVolume& p, const HypothesisPlanes& planes, const DepthMap& depth);

// Probability mass of the four planes around the argmax, [j-1, j+2], shifted
// to stay inside the volume.
ConfidenceMap confidence_map(const ProbabilityVolume& p);

// Pixels where at least one plane had two or more valid views.
Array2<std::uint8_t> supported_pixels(const CostVolume& volume);

}  // namespace amvs
