#include "amvs/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include <Eigen/Geometry>

#include "amvs/error.hpp"
#include "amvs/parallel.hpp"

namespace amvs {

void SynthSceneSpec::validate() const {
  require(num_views >= 2, ErrorCode::InvalidSpec, "a synthetic scene needs at least two views");
  require(width >= 8 && height >= 8, ErrorCode::InvalidSpec, "synthetic images must be at least 8 x 8");
  require(std::isfinite(near) && std::isfinite(far) && near > 0.0, ErrorCode::InvalidSpec, "near must be positive");
  if (geometry == SynthGeometry::Plane)
    require(near <= far, ErrorCode::InvalidSpec, "near must not exceed far");
  else
    require(near < far, ErrorCode::InvalidSpec, "near must be smaller than far");
  require(std::isfinite(baseline) && baseline > 0.0, ErrorCode::InvalidSpec, "baseline must be positive");
  require(focal >= 0.0 && std::isfinite(focal), ErrorCode::InvalidSpec, "focal must be >= 0");
  require(std::isfinite(slope), ErrorCode::InvalidSpec, "slope must be finite");
  require(sphere_radius >= 0.0, ErrorCode::InvalidSpec, "sphere radius must be >= 0");
  require(supersample >= 1, ErrorCode::InvalidSpec, "supersample must be >= 1");
  require(hint_min > 0.0 && hint_interval > 0.0 && hint_planes >= 1, ErrorCode::InvalidSpec,
          "depth hint must be positive");
}

namespace {

constexpr double kRayEpsilon = 1e-9;

// Plane n . p = c restricted to the half-space side * p.x >= 0 (side 0: unrestricted).
struct PlanePatch {
  Eigen::Vector3d n;
  double c;
  int side;
  double z_lo = -1.0;  // optional z band, used by the two_planes wall
  double z_hi = -1.0;
};

std::vector<PlanePatch> plane_patches(const SynthSceneSpec& s) {
  const Eigen::Vector3d ez(0.0, 0.0, 1.0);
  std::vector<PlanePatch> patches;
  switch (s.geometry) {
    case SynthGeometry::Plane:
      patches.push_back({Eigen::Vector3d(-s.slope, 0.0, 1.0), 0.5 * (s.near + s.far), 0});
      return patches;
    case SynthGeometry::Sphere:
      break;
    case SynthGeometry::TwoPlanes:
      patches.push_back({ez, s.near, -1});
      patches.push_back({Eigen::Vector3d(1.0, 0.0, 0.0), 0.0, 0, s.near, s.far});
      break;
    case SynthGeometry::Wedge: {
      const double a = 0.5 * s.width / s.focal_length();
      const double k = (1.0 - s.near / s.far) / a;
      patches.push_back({Eigen::Vector3d(-k, 0.0, 1.0), s.near, 1});
      patches.push_back({Eigen::Vector3d(k, 0.0, 1.0), s.near, -1});
      break;
    }
  }
  patches.push_back({ez, s.far, 0});
  return patches;
}

void consider(double t, std::optional<double>& best) {
  if (t > kRayEpsilon && std::isfinite(t) && (!best || t < *best)) best = t;
}

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

double lattice(std::int64_t ix, std::int64_t iy, std::int64_t iz, std::uint64_t salt) {
  std::uint64_t h = splitmix(salt);
  h = splitmix(h ^ static_cast<std::uint64_t>(ix));
  h = splitmix(h ^ static_cast<std::uint64_t>(iy));
  h = splitmix(h ^ static_cast<std::uint64_t>(iz));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

double smooth(double t) { return t * t * (3.0 - 2.0 * t); }

double value_noise(const Eigen::Vector3d& p, double cell, std::uint64_t salt) {
  const double gx = p.x() / cell;
  const double gy = p.y() / cell;
  const double gz = p.z() / cell;
  const double fx = std::floor(gx);
  const double fy = std::floor(gy);
  const double fz = std::floor(gz);
  const auto ix = static_cast<std::int64_t>(fx);
  const auto iy = static_cast<std::int64_t>(fy);
  const auto iz = static_cast<std::int64_t>(fz);
  const double wx = smooth(gx - fx);
  const double wy = smooth(gy - fy);
  const double wz = smooth(gz - fz);
  double acc = 0.0;
  for (int dz = 0; dz < 2; ++dz) {
    const double az = dz ? wz : 1.0 - wz;
    for (int dy = 0; dy < 2; ++dy) {
      const double ay = dy ? wy : 1.0 - wy;
      for (int dx = 0; dx < 2; ++dx) {
        const double ax = dx ? wx : 1.0 - wx;
        acc += az * ay * ax * lattice(ix + dx, iy + dy, iz + dz, salt);
      }
    }
  }
  return acc;
}

Eigen::Matrix3d look_at(const Eigen::Vector3d& center, const Eigen::Vector3d& target) {
  const Eigen::Vector3d z = (target - center).normalized();
  const Eigen::Vector3d x = Eigen::Vector3d(0.0, 1.0, 0.0).cross(z).normalized();
  const Eigen::Vector3d y = z.cross(x);
  Eigen::Matrix3d r;
  r.row(0) = x.transpose();
  r.row(1) = y.transpose();
  r.row(2) = z.transpose();
  return r;
}

}  // namespace

std::optional<double> synth_ray_hit(const SynthSceneSpec& spec, const Eigen::Vector3d& o, const Eigen::Vector3d& d) {
  std::optional<double> best;
  for (const PlanePatch& pp : plane_patches(spec)) {
    const double denom = pp.n.dot(d);
    if (denom == 0.0) continue;
    const double t = (pp.c - pp.n.dot(o)) / denom;
    const Eigen::Vector3d p = o + t * d;
    if (pp.side > 0 && p.x() < 0.0) continue;
    if (pp.side < 0 && p.x() >= 0.0) continue;
    if (pp.z_hi > 0.0 && (p.z() < pp.z_lo || p.z() > pp.z_hi)) continue;
    consider(t, best);
  }
  if (spec.geometry == SynthGeometry::Sphere) {
    const double r = spec.sphere_r();
    const Eigen::Vector3d oc = o - Eigen::Vector3d(0.0, 0.0, spec.near + r);
    const double a = d.squaredNorm();
    const double b = oc.dot(d);
    const double c = oc.squaredNorm() - r * r;
    const double disc = b * b - a * c;
    if (disc >= 0.0) {
      const double root = std::sqrt(disc);
      consider((-b - root) / a, best);
      consider((-b + root) / a, best);
    }
  }
  return best;
}

double synth_texture(const SynthSceneSpec& spec, const Eigen::Vector3d& p) {
  const double footprint = 0.5 * (spec.near + spec.far) / spec.focal_length();
  if (spec.texture == SynthTexture::Checker) {
    const double cell = 4.0 * footprint;
    const auto parity = static_cast<std::int64_t>(std::floor(p.x() / cell)) +
                        static_cast<std::int64_t>(std::floor(p.y() / cell)) +
                        static_cast<std::int64_t>(std::floor(p.z() / cell));
    return (parity & 1) ? 0.8 : 0.2;
  }
  constexpr std::array<double, 4> kScales{24.0, 12.0, 6.0, 3.0};
  constexpr std::array<double, 4> kWeights{1.0, 0.8, 0.7, 0.6};
  double sum = 0.0;
  double total = 0.0;
  for (std::size_t k = 0; k < kScales.size(); ++k) {
    sum += kWeights[k] * value_noise(p, kScales[k] * footprint, spec.seed * 4 + k);
    total += kWeights[k];
  }
  return std::clamp(0.5 + 2.0 * (sum / total - 0.5), 0.0, 1.0);
}

std::vector<CameraView> synth_views(const SynthSceneSpec& spec) {
  spec.validate();
  const double f = spec.focal_length();
  const CameraIntrinsics k{f, f, 0.5 * (spec.width - 1), 0.5 * (spec.height - 1)};
  const DepthHint hint{spec.hint_min, spec.hint_min + spec.hint_interval * spec.hint_planes};
  const double h = std::sqrt(0.5);
  const std::array<Eigen::Vector2d, 8> directions{Eigen::Vector2d(1, 0),  Eigen::Vector2d(-1, 0),
                                                  Eigen::Vector2d(0, 1),  Eigen::Vector2d(0, -1),
                                                  Eigen::Vector2d(h, h),  Eigen::Vector2d(-h, -h),
                                                  Eigen::Vector2d(-h, h), Eigen::Vector2d(h, -h)};
  const Eigen::Vector3d target(0.0, 0.0, 0.5 * (spec.near + spec.far));

  std::vector<CameraView> views;
  for (int i = 0; i < spec.num_views; ++i) {
    CameraView v;
    v.intrinsics = k;
    v.depth_hint = hint;
    v.image_id = i;
    if (i > 0) {
      const int ring = (i - 1) / 8;
      const Eigen::Vector2d dir = directions[(i - 1) % 8];
      const double radius = spec.baseline * (1.0 + 0.5 * ring);
      const Eigen::Vector3d center(radius * dir.x(), radius * dir.y(), 0.0);
      const Eigen::Matrix3d r = spec.converge ? look_at(center, target) : Eigen::Matrix3d::Identity();
      v.extrinsics.rotation = r;
      v.extrinsics.translation = -r * center;
    }
    views.push_back(v);
  }
  return views;
}

SceneBundle synth_scene(const SynthSceneSpec& spec) {
  SceneBundle scene;
  scene.views = synth_views(spec);
  const int n = spec.num_views;
  const int s = spec.supersample;
  scene.images.assign(n, ColorImage(spec.height, spec.width, 3));
  scene.gt_depths.assign(n, DepthMap(spec.height, spec.width, 0.0, false));

  for (int i = 0; i < n; ++i) {
    const CameraView& view = scene.views[i];
    const Eigen::Matrix3d rt = view.extrinsics.rotation.transpose();
    const Eigen::Vector3d origin = view.extrinsics.center();
    const CameraIntrinsics& k = view.intrinsics;
    ColorImage& image = scene.images[i];
    DepthMap& gt = scene.gt_depths[i];
    parallel_for(0, spec.height, [&](int y) {
      for (int x = 0; x < spec.width; ++x) {
        const Eigen::Vector3d center_dir = rt * Eigen::Vector3d((x - k.cx) / k.fx, (y - k.cy) / k.fy, 1.0);
        if (const auto t = synth_ray_hit(spec, origin, center_dir)) {
          gt.depth(y, x) = *t;
          gt.valid(y, x) = 1;
        }
        double sum = 0.0;
        for (int sy = 0; sy < s; ++sy) {
          for (int sx = 0; sx < s; ++sx) {
            const double u = x + (sx + 0.5) / s - 0.5;
            const double v = y + (sy + 0.5) / s - 0.5;
            const Eigen::Vector3d dir = rt * Eigen::Vector3d((u - k.cx) / k.fx, (v - k.cy) / k.fy, 1.0);
            if (const auto t = synth_ray_hit(spec, origin, dir)) sum += synth_texture(spec, origin + *t * dir);
          }
        }
        const double value = sum / (s * s);
        constexpr std::array<double, 3> kTint{1.0, 0.92, 0.85};
        constexpr std::array<double, 3> kLift{0.0, 0.04, 0.08};
        for (int c = 0; c < 3; ++c)
          image(y, x, c) =
              static_cast<std::uint8_t>(std::lround(255.0 * std::clamp(value * kTint[c] + kLift[c], 0.0, 1.0)));
      }
    });
  }

  scene.pair_list.resize(n);
  for (int ref = 0; ref < n; ++ref) {
    std::vector<int> others;
    for (int j = 0; j < n; ++j)
      if (j != ref) others.push_back(j);
    const Eigen::Vector3d c = scene.views[ref].extrinsics.center();
    std::stable_sort(others.begin(), others.end(), [&](int a, int b) {
      return (scene.views[a].extrinsics.center() - c).squaredNorm() <
             (scene.views[b].extrinsics.center() - c).squaredNorm();
    });
    scene.pair_list[ref] = others;
  }
  return scene;
}

std::string to_string(SynthGeometry geometry) {
  switch (geometry) {
    case SynthGeometry::Plane: return "plane";
    case SynthGeometry::Sphere: return "sphere";
    case SynthGeometry::TwoPlanes: return "two_planes";
    case SynthGeometry::Wedge: return "wedge";
  }
  return "sphere";
}

std::string to_string(SynthTexture texture) { return texture == SynthTexture::Checker ? "checker" : "noise"; }

SynthGeometry parse_geometry(const std::string& text) {
  if (text == "plane") return SynthGeometry::Plane;
  if (text == "sphere") return SynthGeometry::Sphere;
  if (text == "two_planes") return SynthGeometry::TwoPlanes;
  if (text == "wedge") return SynthGeometry::Wedge;
  fail(ErrorCode::InvalidSpec, "unknown geometry '" + text + "'");
}

SynthTexture parse_texture(const std::string& text) {
  if (text == "noise") return SynthTexture::Noise;
  if (text == "checker") return SynthTexture::Checker;
  fail(ErrorCode::InvalidSpec, "unknown texture '" + text + "'");
}

}  // namespace amvs
