#pragma once

#include <vector>

#include "amvs/cost_volume.hpp"
#include "amvs/fusion.hpp"

namespace amvs {

struct DepthErrorReport {
  double epe = 0.0;  // mean absolute error over jointly valid pixels
  double e1 = 0.0;   // % of pixels with error > e1 threshold
  double e3 = 0.0;   // % of pixels with error > e3 threshold
  long pixels = 0;
};

struct DepthErrorThresholds {
  double e1 = 1.0;
  double e3 = 3.0;
};

DepthErrorReport depth_errors(const DepthMap& pred, const DepthMap& gt, const DepthErrorThresholds& th = {});

inline constexpr double kDefaultPnumdTolerance = 0.1;

// Percentage of jointly valid pixels with |pred - gt| <= tol.
double pnumd(const DepthMap& pred, const DepthMap& gt, double tol = kDefaultPnumdTolerance);

// Percentage of jointly valid pixels with |pred - gt| / gt < rel.
double relative_inlier_ratio(const DepthMap& pred, const DepthMap& gt, double rel);

struct CloudMetricReport {
  double acc = 0.0;        // mean distance pred -> gt
  double comp = 0.0;       // mean distance gt -> pred
  double overall = 0.0;    // (acc + comp) / 2
  double precision = 0.0;  // % of pred within tau of gt
  double recall = 0.0;     // % of gt within tau of pred
  double f_score = 0.0;
};

// Uniform-grid nearest-neighbour index over a fixed point set.
class PointGrid {
 public:
  PointGrid(const std::vector<Eigen::Vector3d>& points, double cell_size);

  // Squared distance to the closest indexed point.
  double nearest_squared(const Eigen::Vector3d& query) const;

 private:
  long cell_index(long ix, long iy, long iz) const { return (iz * ny_ + iy) * nx_ + ix; }

  std::vector<Eigen::Vector3d> points_;
  std::vector<int> cell_start_;
  std::vector<int> order_;
  Eigen::Vector3d origin_;
  double cell_ = 1.0;
  long nx_ = 1;
  long ny_ = 1;
  long nz_ = 1;
};

// Nearest-neighbour distance from every query to `reference`.
std::vector<double> nearest_distances(const std::vector<Eigen::Vector3d>& queries,
                                      const std::vector<Eigen::Vector3d>& reference);

CloudMetricReport cloud_metrics(const PointCloud& pred, const PointCloud& gt, double tau);

}  // namespace amvs
