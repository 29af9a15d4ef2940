#include "amvs/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "amvs/error.hpp"
#include "amvs/parallel.hpp"

namespace amvs {

namespace {

template <typename Fn>
long for_joint_valid(const DepthMap& pred, const DepthMap& gt, Fn&& fn) {
  require(pred.depth.same_shape(gt.depth), ErrorCode::ShapeMismatch, "prediction and ground truth differ in size");
  long n = 0;
  for (int y = 0; y < gt.height(); ++y) {
    for (int x = 0; x < gt.width(); ++x) {
      if (!pred.is_valid(y, x) || !gt.is_valid(y, x)) continue;
      fn(pred.depth(y, x), gt.depth(y, x));
      ++n;
    }
  }
  require(n > 0, ErrorCode::NoValidPixels, "no jointly valid pixels");
  return n;
}

}  // namespace

DepthErrorReport depth_errors(const DepthMap& pred, const DepthMap& gt, const DepthErrorThresholds& th) {
  double sum = 0.0;
  long over1 = 0;
  long over3 = 0;
  const long n = for_joint_valid(pred, gt, [&](double p, double g) {
    const double e = std::abs(p - g);
    sum += e;
    if (e > th.e1) ++over1;
    if (e > th.e3) ++over3;
  });
  const double count = static_cast<double>(n);
  return {sum / count, 100.0 * static_cast<double>(over1) / count, 100.0 * static_cast<double>(over3) / count, n};
}

double pnumd(const DepthMap& pred, const DepthMap& gt, double tol) {
  long close = 0;
  const long n = for_joint_valid(pred, gt, [&](double p, double g) {
    if (std::abs(p - g) <= tol) ++close;
  });
  return 100.0 * static_cast<double>(close) / static_cast<double>(n);
}

double relative_inlier_ratio(const DepthMap& pred, const DepthMap& gt, double rel) {
  long good = 0;
  const long n = for_joint_valid(pred, gt, [&](double p, double g) {
    if (std::abs(p - g) < rel * g) ++good;
  });
  return 100.0 * static_cast<double>(good) / static_cast<double>(n);
}

PointGrid::PointGrid(const std::vector<Eigen::Vector3d>& points, double cell_size) : points_(points) {
  require(!points_.empty(), ErrorCode::EmptyCloud, "cannot index an empty cloud");
  Eigen::Vector3d lo = points_.front();
  Eigen::Vector3d hi = points_.front();
  for (const auto& p : points_) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const double extent = (hi - lo).maxCoeff();
  // Bound the grid at roughly 2^21 cells.
  cell_ = std::max({cell_size, extent / 128.0, 1e-12});
  origin_ = lo;
  nx_ = static_cast<long>(std::floor((hi.x() - lo.x()) / cell_)) + 1;
  ny_ = static_cast<long>(std::floor((hi.y() - lo.y()) / cell_)) + 1;
  nz_ = static_cast<long>(std::floor((hi.z() - lo.z()) / cell_)) + 1;

  const long cells = nx_ * ny_ * nz_;
  std::vector<long> cell_of(points_.size());
  std::vector<int> counts(cells + 1, 0);
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const Eigen::Vector3d r = (points_[i] - origin_) / cell_;
    const long ix = std::min(nx_ - 1, static_cast<long>(std::floor(r.x())));
    const long iy = std::min(ny_ - 1, static_cast<long>(std::floor(r.y())));
    const long iz = std::min(nz_ - 1, static_cast<long>(std::floor(r.z())));
    cell_of[i] = cell_index(ix, iy, iz);
    ++counts[cell_of[i] + 1];
  }
  for (long c = 0; c < cells; ++c) counts[c + 1] += counts[c];
  cell_start_ = counts;
  order_.resize(points_.size());
  std::vector<int> cursor(counts.begin(), counts.end() - 1);
  for (std::size_t i = 0; i < points_.size(); ++i) order_[cursor[cell_of[i]]++] = static_cast<int>(i);
}

double PointGrid::nearest_squared(const Eigen::Vector3d& query) const {
  const Eigen::Vector3d r = (query - origin_) / cell_;
  const long qx = static_cast<long>(std::floor(r.x()));
  const long qy = static_cast<long>(std::floor(r.y()));
  const long qz = static_cast<long>(std::floor(r.z()));
  // Distance from the query to the nearest face of the box of cells already
  // searched; anything outside that box is at least this far away.
  auto searched_margin = [&](long ring) {
    const double lx = r.x() - static_cast<double>(qx - ring);
    const double hx = static_cast<double>(qx + ring + 1) - r.x();
    const double ly = r.y() - static_cast<double>(qy - ring);
    const double hy = static_cast<double>(qy + ring + 1) - r.y();
    const double lz = r.z() - static_cast<double>(qz - ring);
    const double hz = static_cast<double>(qz + ring + 1) - r.z();
    return std::min({lx, hx, ly, hy, lz, hz}) * cell_;
  };

  auto outside = [](long q, long n) { return q < 0 ? -q : (q >= n ? q - n + 1 : 0L); };
  const long first_ring = std::max({outside(qx, nx_), outside(qy, ny_), outside(qz, nz_)});
  const long last_ring = first_ring + std::max({nx_, ny_, nz_});

  double best = std::numeric_limits<double>::infinity();
  for (long ring = first_ring; ring <= last_ring; ++ring) {
    for (long iz = std::max(0L, qz - ring); iz <= std::min(nz_ - 1, qz + ring); ++iz) {
      for (long iy = std::max(0L, qy - ring); iy <= std::min(ny_ - 1, qy + ring); ++iy) {
        for (long ix = std::max(0L, qx - ring); ix <= std::min(nx_ - 1, qx + ring); ++ix) {
          if (std::max({std::abs(ix - qx), std::abs(iy - qy), std::abs(iz - qz)}) != ring) continue;
          const long c = cell_index(ix, iy, iz);
          for (int k = cell_start_[c]; k < cell_start_[c + 1]; ++k) {
            const Eigen::Vector3d d = points_[order_[k]] - query;
            best = std::min(best, d.x() * d.x() + d.y() * d.y() + d.z() * d.z());
          }
        }
      }
    }
    const double margin = searched_margin(ring);
    if (std::isfinite(best) && margin > 0.0 && best <= margin * margin) break;
  }
  return best;
}

std::vector<double> nearest_distances(const std::vector<Eigen::Vector3d>& queries,
                                      const std::vector<Eigen::Vector3d>& reference) {
  require(!queries.empty() && !reference.empty(), ErrorCode::EmptyCloud, "point cloud is empty");
  Eigen::Vector3d lo = reference.front();
  Eigen::Vector3d hi = reference.front();
  for (const auto& p : reference) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  // About one reference point per cell for surface-like clouds.
  const double extent = std::max((hi - lo).maxCoeff(), 1e-9);
  const double cell = extent / std::max(1.0, std::sqrt(static_cast<double>(reference.size())));
  const PointGrid grid(reference, cell);
  std::vector<double> out(queries.size());
  parallel_for(0, static_cast<int>(queries.size()),
               [&](int i) { out[i] = std::sqrt(grid.nearest_squared(queries[i])); });
  return out;
}

CloudMetricReport cloud_metrics(const PointCloud& pred, const PointCloud& gt, double tau) {
  require(!pred.empty() && !gt.empty(), ErrorCode::EmptyCloud, "point cloud is empty");
  require(tau > 0.0, ErrorCode::InvalidConfig, "distance threshold must be positive");
  std::vector<Eigen::Vector3d> p;
  std::vector<Eigen::Vector3d> g;
  p.reserve(pred.size());
  g.reserve(gt.size());
  for (const auto& pt : pred.points) p.push_back(pt.position);
  for (const auto& pt : gt.points) g.push_back(pt.position);

  const std::vector<double> to_gt = nearest_distances(p, g);
  const std::vector<double> to_pred = nearest_distances(g, p);
  CloudMetricReport out;
  long precise = 0;
  long recalled = 0;
  for (double d : to_gt) {
    out.acc += d;
    if (d <= tau) ++precise;
  }
  for (double d : to_pred) {
    out.comp += d;
    if (d <= tau) ++recalled;
  }
  out.acc /= static_cast<double>(to_gt.size());
  out.comp /= static_cast<double>(to_pred.size());
  out.overall = 0.5 * (out.acc + out.comp);
  out.precision = 100.0 * static_cast<double>(precise) / static_cast<double>(to_gt.size());
  out.recall = 100.0 * static_cast<double>(recalled) / static_cast<double>(to_pred.size());
  out.f_score = (out.precision + out.recall) > 0.0
                    ? 2.0 * out.precision * out.recall / (out.precision + out.recall)
                    : 0.0;
  return out;
}

}  // namespace amvs
