// Acceptance checks A1-A8. Run without arguments for all of them, or pass
// criterion ids (e.g. `amvs_acceptance A4 A6`). Exit status is nonzero when a
// selected criterion fails.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Geometry>

#include "amvs/ablation.hpp"
#include "amvs/adia.hpp"
#include "amvs/adrp.hpp"
#include "amvs/cli.hpp"
#include "amvs/config.hpp"
#include "amvs/io_formats.hpp"
#include "amvs/metrics.hpp"
#include "amvs/pipeline.hpp"
#include "amvs/synth.hpp"

using namespace amvs;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  std::string id;
  std::string title;
  double time_limit;  // seconds
  std::function<Outcome()> run;
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

double uniform(std::mt19937_64& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
int uniform_int(std::mt19937_64& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

Eigen::Matrix3d random_rotation(std::mt19937_64& rng) {
  Eigen::Vector3d axis(uniform(rng, -1, 1), uniform(rng, -1, 1), uniform(rng, -1, 1));
  if (axis.norm() < 1e-3) axis = Eigen::Vector3d::UnitY();
  return Eigen::AngleAxisd(uniform(rng, -0.5, 0.5), axis.normalized()).toRotationMatrix();
}

// ---------------------------------------------------------------- scenes

SynthSceneSpec scene_spec(SynthGeometry g, std::uint64_t seed, double near = 500.0, double radius = 0.0) {
  SynthSceneSpec s;
  s.geometry = g;
  s.seed = seed;
  s.near = near;
  s.sphere_radius = radius;
  return s;
}

// Five evaluation scenes; the first is the plane+sphere scene used for the
// end-to-end accuracy bar.
std::vector<SynthSceneSpec> acceptance_scenes() {
  return {scene_spec(SynthGeometry::Sphere, 1, 750.0, 300.0), scene_spec(SynthGeometry::Sphere, 2),
          scene_spec(SynthGeometry::Wedge, 3), scene_spec(SynthGeometry::TwoPlanes, 4),
          scene_spec(SynthGeometry::Sphere, 5, 600.0, 400.0)};
}

// Same generators on disjoint seeds, used only to fit the range scalars.
std::vector<SynthSceneSpec> calibration_scenes() {
  return {scene_spec(SynthGeometry::Sphere, 11, 700.0, 250.0), scene_spec(SynthGeometry::Sphere, 12),
          scene_spec(SynthGeometry::Wedge, 13), scene_spec(SynthGeometry::TwoPlanes, 14),
          scene_spec(SynthGeometry::Sphere, 15, 550.0, 350.0)};
}

// Scene-level criteria score the reference view, whose ground truth lies
// inside the depth hint of every scene.
constexpr int kRefView = 0;

ViewReconstruction reconstruct_ref(const SceneBundle& scene, const PipelineConfig& cfg) {
  return reconstruct(scene, cfg, {kRefView}).front();
}

// ---------------------------------------------------------------- A1

Outcome a1_geometry() {
  CameraView ref;
  ref.intrinsics = {100.0, 100.0, 40.0, 30.0};
  CameraView src = ref;
  src.extrinsics.translation = Eigen::Vector3d(-1.0, 0.0, 0.0);  // center at x = 1
  double shift_err = 0.0;
  for (double d : {2.0, 5.0, 10.0, 40.0}) {
    const Homography h = plane_homography(ref, src, d);
    for (double v = 0.0; v < 60.0; v += 7.5) {
      for (double u = 0.0; u < 80.0; u += 9.5) {
        double su = 0.0, sv = 0.0;
        if (!h.apply(u, v, su, sv)) return {false, "homography rejected a finite point"};
        shift_err = std::max(shift_err, std::abs((u - su) - 100.0 * 1.0 / d));
        shift_err = std::max(shift_err, std::abs(sv - v));
      }
    }
  }

  std::mt19937_64 rng(101);
  double round_trip = 0.0;
  for (int i = 0; i < 10000; ++i) {
    CameraView cam;
    const double f = uniform(rng, 50, 2000);
    cam.intrinsics = {f, f * uniform(rng, 0.9, 1.1), uniform(rng, 0, 800), uniform(rng, 0, 600)};
    cam.extrinsics.rotation = random_rotation(rng);
    cam.extrinsics.translation = Eigen::Vector3d(uniform(rng, -500, 500), uniform(rng, -500, 500), uniform(rng, -500, 500));
    const double u = uniform(rng, 0, 800), v = uniform(rng, 0, 600), d = uniform(rng, 1, 1000);
    const PixelDepth p = project(cam, unproject(cam, u, v, d));
    round_trip = std::max({round_trip, std::abs(p.u - u), std::abs(p.v - v), std::abs(p.depth - d)});
  }
  return {shift_err <= 1e-9 && round_trip <= 1e-9,
          fmt("max shift error %.2e, max round-trip error %.2e (tol 1e-9)", shift_err, round_trip)};
}

// ---------------------------------------------------------------- A2

// |a - b| <= 1e-12 * max(1, |b|)
struct Tracker {
  double worst = 0.0;
  void add(double got, double want) { worst = std::max(worst, std::abs(got - want) / std::max(1.0, std::abs(want))); }
};

HypothesisPlanes random_planes(std::mt19937_64& rng, int d, int h, int w, bool per_pixel) {
  if (!per_pixel) {
    std::vector<double> values(d);
    double v = uniform(rng, 1, 10);
    for (int j = 0; j < d; ++j) values[j] = (v += uniform(rng, 0.1, 2.0));
    return HypothesisPlanes::global(values, uniform(rng, 0.1, 2.0));
  }
  Array3<double> values(d, h, w);
  Array2<double> interval(h, w);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double v = uniform(rng, 1, 10);
      for (int j = 0; j < d; ++j) values(j, y, x) = (v += uniform(rng, 0.1, 2.0));
      interval(y, x) = uniform(rng, 0.1, 2.0);
    }
  return HypothesisPlanes::per_pixel(values, interval);
}

ProbabilityVolume random_probability(std::mt19937_64& rng, int d, int h, int w) {
  ProbabilityVolume p{Array3<double>(d, h, w)};
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double sum = 0.0;
      for (int j = 0; j < d; ++j) sum += (p.prob(j, y, x) = uniform(rng, 0.0, 1.0) + 1e-3);
      for (int j = 0; j < d; ++j) p.prob(j, y, x) /= sum;
    }
  return p;
}

DepthMap random_depth(std::mt19937_64& rng, int h, int w, double lo, double hi, double invalid_rate = 0.0) {
  DepthMap m(h, w);
  for (std::size_t i = 0; i < m.depth.size(); ++i) {
    m.depth[i] = uniform(rng, lo, hi);
    m.valid[i] = uniform(rng, 0, 1) >= invalid_rate;
  }
  m.valid[0] = 1;
  return m;
}

Outcome a2_brute_force() {
  std::mt19937_64 rng(202);
  Tracker sigma, regress, offs, adjust, overlap, errors, stage;
  for (int trial = 0; trial < 1000; ++trial) {
    const int d = uniform_int(rng, 2, 12), h = uniform_int(rng, 1, 4), w = uniform_int(rng, 1, 4);
    const HypothesisPlanes planes = random_planes(rng, d, h, w, trial % 2 == 1);
    const ProbabilityVolume p = random_probability(rng, d, h, w);
    const DepthMap centre = random_depth(rng, h, w, 1, 20);
    SigmaMap s(h, w);
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = uniform(rng, 0.5, 5.0);

    const DepthMap l = regress_depth(p, planes);
    const SigmaMap sg = sigma_map(p, planes, centre);
    const OffsetMode mode = trial % 3 == 0 ? OffsetMode::Linear : OffsetMode::ZScore;
    const OffsetVolume o = offsets(planes, centre, s, mode);
    const HypothesisPlanes adjusted = adjust_planes(planes, o);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        long double mean = 0, var = 0, norm = 0;
        for (int j = 0; j < d; ++j) {
          const long double dj = planes.value(j, y, x);
          mean += p.prob(j, y, x) * dj;
          var += p.prob(j, y, x) * (dj - centre.depth(y, x)) * (dj - centre.depth(y, x));
          norm += std::exp((dj - centre.depth(y, x)) / (mode == OffsetMode::ZScore ? s(y, x) : 1.0L));
        }
        regress.add(l.depth(y, x), static_cast<double>(mean));
        sigma.add(sg(y, x), static_cast<double>(std::sqrt(var)));
        for (int j = 0; j < d; ++j) {
          const long double e =
              std::exp((planes.value(j, y, x) - centre.depth(y, x)) / (mode == OffsetMode::ZScore ? s(y, x) : 1.0L)) /
              norm;
          offs.add(o(j, y, x), static_cast<double>(e));
          adjust.add(adjusted.value(j, y, x), planes.value(j, y, x) + planes.interval(y, x) * static_cast<double>(e));
        }
      }

    // overlap by case analysis on the endpoints
    const double a0 = uniform(rng, 0, 100), a1 = a0 + uniform(rng, 0.1, 100);
    const double b0 = uniform(rng, 0, 100), b1 = b0 + uniform(rng, 0.1, 100);
    double inter = 0.0;
    if (b1 <= a0 || a1 <= b0) inter = 0.0;
    else if (b0 <= a0 && a1 <= b1) inter = a1 - a0;
    else if (a0 <= b0 && b1 <= a1) inter = b1 - b0;
    else if (b0 < a0) inter = b1 - a0;
    else inter = a1 - b0;
    const OverlapReport ov = overlap_metrics({a0, a1}, {b0, b1});
    overlap.add(ov.aog, inter / (a1 - a0));
    overlap.add(ov.aos, inter / (b1 - b0));

    const DepthMap gt = random_depth(rng, h + 2, w + 2, 1, 10, 0.3);
    const DepthMap pred = random_depth(rng, h + 2, w + 2, 1, 10, 0.1);
    long n = 0, over1 = 0, over3 = 0;
    double sum = 0.0;
    for (std::size_t i = 0; i < gt.depth.size(); ++i) {
      if (!gt.valid[i] || !pred.valid[i]) continue;
      const double e = std::abs(gt.depth[i] - pred.depth[i]);
      ++n;
      sum += e;
      over1 += e > 1.0;
      over3 += e > 3.0;
    }
    if (n > 0) {
      const DepthErrorReport r = depth_errors(pred, gt);
      errors.add(r.epe, sum / n);
      errors.add(r.e1, 100.0 * over1 / n);
      errors.add(r.e3, 100.0 * over3 / n);
    }

    std::vector<DepthMap> sp, sg_levels;
    double expected = 0.0;
    const double lambda[4] = {0.5, 1.0, 1.5, 2.0};
    for (int k = 0; k < 4; ++k) {
      DepthMap g = random_depth(rng, h << k, w << k, 1, 10, 0.2);
      DepthMap q = random_depth(rng, h << k, w << k, 1, 10);
      double acc = 0.0;
      long cnt = 0;
      for (std::size_t i = 0; i < g.depth.size(); ++i)
        if (g.valid[i] && q.valid[i]) {
          acc += std::abs(g.depth[i] - q.depth[i]);
          ++cnt;
        }
      expected += lambda[k] * acc / cnt;
      sg_levels.push_back(g);
      sp.push_back(q);
    }
    stage.add(stage_metric(sp, sg_levels), expected);
  }
  const double worst = std::max({sigma.worst, regress.worst, offs.worst, adjust.worst, overlap.worst, errors.worst,
                                 stage.worst});
  return {worst <= 1e-12,
          fmt("worst scaled deviation: sigma %.1e, regress %.1e, offsets %.1e, adjust %.1e, overlap %.1e, "
              "depth_errors %.1e, stage_metric %.1e (tol 1e-12)",
              sigma.worst, regress.worst, offs.worst, adjust.worst, overlap.worst, errors.worst, stage.worst)};
}

// ---------------------------------------------------------------- A3

Outcome a3_adia_invariants() {
  std::mt19937_64 rng(303);
  long bad_sum = 0, bad_open = 0, bad_order = 0, bad_bounds = 0;
  double worst_sum = 0.0, worst_scale = 0.0;
  for (int trial = 0; trial < 10000; ++trial) {
    const int d = uniform_int(rng, 2, 64), h = uniform_int(rng, 1, 3), w = uniform_int(rng, 1, 3);
    const double lo = uniform(rng, 1, 1000), span = uniform(rng, 0.01, 500);
    const DepthRange range{lo, lo + span};
    const HypothesisPlanes planes = equal_partition(range, d);
    const double inter = planes.global_interval();
    DepthMap centre(h, w);
    SigmaMap s(h, w);
    for (std::size_t i = 0; i < s.size(); ++i) {
      centre.depth[i] = uniform(rng, lo - 0.25 * span, lo + 1.25 * span);
      s[i] = std::exp(uniform(rng, std::log(0.5 * inter), std::log(2.0 * span)));
    }
    const OffsetVolume o = offsets(planes, centre, s);
    const HypothesisPlanes adjusted = adjust_planes(planes, o);

    const double k = std::exp(uniform(rng, std::log(0.01), std::log(100.0)));
    std::vector<double> scaled_values = planes.global_values();
    for (double& v : scaled_values) v *= k;
    DepthMap scaled_centre = centre;
    SigmaMap scaled_sigma = s;
    for (std::size_t i = 0; i < s.size(); ++i) {
      scaled_centre.depth[i] *= k;
      scaled_sigma[i] *= k;
    }
    const OffsetVolume o_scaled =
        offsets(HypothesisPlanes::global(scaled_values, inter * k), scaled_centre, scaled_sigma);

    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        double sum = 0.0;
        for (int j = 0; j < d; ++j) {
          sum += o(j, y, x);
          bad_open += !(o(j, y, x) > 0.0 && o(j, y, x) < 1.0);
          worst_scale = std::max(worst_scale, std::abs(o(j, y, x) - o_scaled(j, y, x)));
          const double a = adjusted.value(j, y, x);
          bad_bounds += !(a >= range.d_min && a <= range.d_max + inter);
          if (j > 0) bad_order += !(a > adjusted.value(j - 1, y, x));
        }
        worst_sum = std::max(worst_sum, std::abs(sum - 1.0));
        bad_sum += std::abs(sum - 1.0) > 1e-6;
      }
  }
  const bool pass = bad_sum == 0 && bad_open == 0 && bad_order == 0 && bad_bounds == 0 && worst_scale <= 1e-9;
  return {pass, fmt("10^4 instances: |sum-1| max %.1e, outside (0,1) %ld, non-increasing %ld, out of bounds %ld, "
                    "rescale deviation %.1e (tol 1e-9)",
                    worst_sum, bad_open, bad_order, bad_bounds, worst_scale)};
}

// ---------------------------------------------------------------- A4

Outcome a4_adrp_overlap() {
  PipelineConfig cfg;
  std::vector<CalibrationScene> samples;
  for (const auto& spec : calibration_scenes()) {
    const auto part = calibration_samples(synth_scene(spec), cfg, {kRefView});
    samples.insert(samples.end(), part.begin(), part.end());
  }
  cfg.scalars = calibrate_scalars(samples);

  double aog = 0.0, aos = 0.0;
  std::string per_scene;
  const auto scenes = acceptance_scenes();
  for (const auto& spec : scenes) {
    const SceneBundle scene = synth_scene(spec);
    const ViewReconstruction rec = reconstruct_ref(scene, cfg);
    const OverlapReport ov = overlap_metrics(depth_range_of(scene.gt_depths[kRefView]), rec.stages[1].global_range);
    aog += ov.aog;
    aos += ov.aos;
    per_scene += fmt(" %.3f/%.3f", ov.aog, ov.aos);
  }
  aog /= static_cast<double>(scenes.size());
  aos /= static_cast<double>(scenes.size());
  const double tol = 0.05;
  return {aog >= 0.90 - tol && aos >= 0.75 - tol,
          fmt("alpha %.3f beta %.3f; mean AOG %.3f (>= 0.85), mean AOS %.3f (>= 0.70); per scene AOG/AOS:%s",
              cfg.scalars.alpha_dr, cfg.scalars.beta_dr, aog, aos, per_scene.c_str())};
}

// ---------------------------------------------------------------- A5

DepthMap upsampled_stage1(const ViewReconstruction& rec, int height, int width) {
  Array2<double> d = rec.stages[0].depth.depth;
  while (d.height() < height) d = upsample2x(d);
  DepthMap out(height, width);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) out.depth(y, x) = d(y, x);
  return out;
}

Outcome a5_end_to_end() {
  const PipelineConfig cfg;
  double inliers = 0.0;
  int ordered = 0;
  std::string per_scene;
  const auto scenes = acceptance_scenes();
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    const SceneBundle scene = synth_scene(scenes[i]);
    const DepthMap& gt = scene.gt_depths[kRefView];
    const ViewReconstruction rec = reconstruct_ref(scene, cfg);
    if (i == 0) inliers = relative_inlier_ratio(rec.depth, gt, 0.01);
    const double e4 = depth_errors(rec.depth, gt).epe;
    const double e1 = depth_errors(upsampled_stage1(rec, gt.height(), gt.width()), gt).epe;
    ordered += e4 <= e1;
    per_scene += fmt(" %.2f<=%.2f", e4, e1);
  }
  return {inliers >= 95.0 && ordered == static_cast<int>(scenes.size()),
          fmt("plane+sphere scene: %.2f%% of pixels within 1%% (>= 95%%); stage-4 vs upsampled stage-1 EPE:%s",
              inliers, per_scene.c_str())};
}

// ---------------------------------------------------------------- A6

Outcome a6_ablations() {
  Settings settings;
  const PipelineConfig base = settings.pipeline;
  double pnumd_adia = 0.0, pnumd_none = 0.0;
  int zscore_wins = 0;
  int range_checked = 0, range_ok = 0;
  std::string epe_detail, range_detail;
  for (const auto& spec : acceptance_scenes()) {
    const SceneBundle scene = synth_scene(spec);
    const DepthMap& gt = scene.gt_depths[kRefView];
    const DepthRange hint = scene_range_for(scene, kRefView, base);
    auto metrics = [&](const PipelineConfig& cfg) { return evaluate_view(reconstruct_ref(scene, cfg), gt, settings); };

    const ViewMetrics def = metrics(base);
    const ViewMetrics none = metrics(ablated_config(base, AblationMode::NoAdia, hint));
    const ViewMetrics linear = metrics(ablated_config(base, AblationMode::LinearAdia, hint));
    pnumd_adia += def.pnumd;
    pnumd_none += none.pnumd;
    zscore_wins += def.epe <= linear.epe;
    epe_detail += fmt(" %.3f/%.3f", def.epe, linear.epe);

    const DepthRange gt_range = depth_range_of(gt);
    if (gt_range.length() > 320.0) {
      ++range_checked;
      const ViewMetrics adrp = metrics(ablated_config(base, AblationMode::Adrp, hint));
      const ViewMetrics fixed = metrics(ablated_config(base, AblationMode::FixedRange128, hint));
      range_ok += adrp.aog >= fixed.aog;
      range_detail += fmt(" %.3f/%.3f", adrp.aog, fixed.aog);
    }
  }
  const int n = static_cast<int>(acceptance_scenes().size());
  const bool a = pnumd_adia > pnumd_none;
  const bool b = zscore_wins >= 4;
  const bool c = range_checked > 0 && range_ok == range_checked;
  return {a && b && c,
          fmt("(a) %s mean P_numD %.2f with ADIA vs %.2f without; (b) %s zscore EPE <= linear on %d/%d "
              "(zscore/linear:%s); (c) %s ADRP-128 AOG >= fixed-128 on %d/%d wide scenes (adrp/fixed:%s)",
              a ? "ok" : "FAIL", pnumd_adia / n, pnumd_none / n, b ? "ok" : "FAIL", zscore_wins, n, epe_detail.c_str(),
              c ? "ok" : "FAIL", range_ok, range_checked, range_detail.c_str())};
}

// ---------------------------------------------------------------- A7

CamFile random_cam(std::mt19937_64& rng) {
  CamFile cam;
  cam.extrinsics.rotation = random_rotation(rng);
  cam.extrinsics.translation = Eigen::Vector3d(uniform(rng, -1e3, 1e3), uniform(rng, -1e3, 1e3), uniform(rng, -1e3, 1e3));
  const double f = uniform(rng, 10, 3000);
  cam.intrinsics = {f, f * uniform(rng, 0.9, 1.1), uniform(rng, 0, 1600), uniform(rng, 0, 1200)};
  const int hint = uniform_int(rng, 0, 4);
  if (hint >= 1) cam.depth_min = uniform(rng, 1, 900);
  if (hint >= 2) cam.depth_interval = uniform(rng, 0.1, 10);
  if (hint >= 3) cam.depth_num = uniform_int(rng, 2, 512);
  if (hint >= 4) cam.depth_max = *cam.depth_min + *cam.depth_interval * *cam.depth_num;
  return cam;
}

Array2<float> random_float_map(std::mt19937_64& rng) {
  Array2<float> m(uniform_int(rng, 1, 40), uniform_int(rng, 1, 40));
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = static_cast<float>(uniform(rng, -1e4, 1e4));
  return m;
}

PairList random_pairs(std::mt19937_64& rng) {
  PairList pairs(uniform_int(rng, 1, 12));
  for (std::size_t r = 0; r < pairs.size(); ++r) {
    pairs[r].ref = static_cast<int>(r);
    const int n = uniform_int(rng, 0, 10);
    for (int k = 0; k < n; ++k) pairs[r].sources.push_back({uniform_int(rng, 0, 48), uniform(rng, 0, 1000)});
  }
  return pairs;
}

PointCloud random_cloud(std::mt19937_64& rng) {
  PointCloud cloud;
  const int n = uniform_int(rng, 0, 300);
  for (int i = 0; i < n; ++i) {
    CloudPoint p;
    p.position = Eigen::Vector3d(uniform(rng, -1e3, 1e3), uniform(rng, -1e3, 1e3), uniform(rng, 0, 1e3));
    p.color = {static_cast<std::uint8_t>(uniform_int(rng, 0, 255)), static_cast<std::uint8_t>(uniform_int(rng, 0, 255)),
               static_cast<std::uint8_t>(uniform_int(rng, 0, 255))};
    cloud.points.push_back(p);
  }
  return cloud;
}

std::vector<std::pair<std::string, std::string>> directory_bytes(const fs::path& dir) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& entry : fs::recursive_directory_iterator(dir))
    if (entry.is_regular_file()) out.emplace_back(fs::relative(entry.path(), dir).generic_string(), read_file(entry.path()));
  std::sort(out.begin(), out.end());
  return out;
}

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("amvs_acceptance_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

Outcome a7_io() {
  std::mt19937_64 rng(707);
  int mismatches = 0;
  for (int i = 0; i < 100; ++i) {
    const std::string cam = format_cam(random_cam(rng));
    mismatches += format_cam(parse_cam(cam)) != cam;
    const std::string pfm = format_pfm(random_float_map(rng));
    mismatches += format_pfm(parse_pfm(pfm)) != pfm;
    const std::string pair = format_pair(random_pairs(rng));
    mismatches += format_pair(parse_pair(pair)) != pair;
    const std::string ply = format_ply(random_cloud(rng));
    mismatches += format_ply(parse_ply(ply)) != ply;
  }

  const fs::path root = scratch_dir("a7");
  SynthSceneSpec spec = scene_spec(SynthGeometry::TwoPlanes, 77);
  write_scene(root / "a", synth_scene(spec));
  write_scene(root / "b", synth_scene(spec));
  const auto a = directory_bytes(root / "a");
  const bool synth_same = !a.empty() && a == directory_bytes(root / "b");
  fs::remove_all(root);
  return {mismatches == 0 && synth_same,
          fmt("%d of 400 cam/PFM/pair/PLY round trips differ; synth_scene repeat %s (%zu files)", mismatches,
              synth_same ? "byte-identical" : "DIFFERS", a.size())};
}

// ---------------------------------------------------------------- A8

int run_cli_args(const std::vector<std::string>& args) {
  std::vector<const char*> argv{"amvs"};
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  if (code != 0) std::fprintf(stderr, "%s", err.str().c_str());
  return code;
}

std::uint64_t fnv1a(const std::vector<std::pair<std::string, std::string>>& files) {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](const std::string& s) {
    for (unsigned char c : s) h = (h ^ c) * 1099511628211ull;
    h = (h ^ 0xff) * 1099511628211ull;
  };
  for (const auto& [name, bytes] : files) {
    mix(name);
    mix(bytes);
  }
  return h;
}

// Depth, confidence, sigma and stage maps; the manifest and resolved config
// carry the thread count and timings by design.
std::uint64_t map_checksum(const fs::path& dir) {
  auto files = directory_bytes(dir);
  std::erase_if(files, [](const auto& f) { return f.first.ends_with(".json") || f.first.ends_with(".cfg"); });
  return files.empty() ? 0 : fnv1a(files);
}

Outcome a8_determinism() {
  const fs::path root = scratch_dir("a8");
  if (run_cli_args({"synth", "--out", (root / "scene").string(), "--seed", "8"}) != 0) return {false, "synth failed"};
  std::vector<std::uint64_t> sums;
  for (const char* threads : {"1", "4", "1", "4"}) {
    const fs::path out = root / ("run" + std::to_string(sums.size()));
    if (run_cli_args({"reconstruct", "--scene", (root / "scene").string(), "--out", out.string(), "--threads", threads}) != 0)
      return {false, "reconstruct failed"};
    sums.push_back(map_checksum(out));
  }
  fs::remove_all(root);
  const bool same = sums[0] != 0 && std::all_of(sums.begin(), sums.end(), [&](std::uint64_t s) { return s == sums[0]; });
  return {same, fmt("checksums t1 %016llx t4 %016llx t1 %016llx t4 %016llx", static_cast<unsigned long long>(sums[0]),
                    static_cast<unsigned long long>(sums[1]), static_cast<unsigned long long>(sums[2]),
                    static_cast<unsigned long long>(sums[3]))};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {"A1", "geometry oracle", 1.0, a1_geometry},
      {"A2", "brute-force equivalence", 10.0, a2_brute_force},
      {"A3", "ADIA invariants", 10.0, a3_adia_invariants},
      {"A4", "ADRP overlap", 60.0, a4_adrp_overlap},
      {"A5", "end-to-end reconstruction", 30.0, a5_end_to_end},
      {"A6", "ablation directions", 120.0, a6_ablations},
      {"A7", "I/O bit-exactness", 10.0, a7_io},
      {"A8", "determinism", 60.0, a8_determinism},
  };
  std::vector<std::string> selected(argv + 1, argv + argc);
  bool all_pass = true;
  int ran = 0;
  for (const auto& c : criteria) {
    if (!selected.empty() && std::find(selected.begin(), selected.end(), c.id) == selected.end()) continue;
    ++ran;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool pass = o.pass && secs < c.time_limit;
    all_pass = all_pass && pass;
    std::printf("%s %s %s: %s [%.2f s, limit %.0f s]\n", c.id.c_str(), pass ? "PASS" : "FAIL", c.title.c_str(),
                o.detail.c_str(), secs, c.time_limit);
    std::fflush(stdout);
  }
  if (ran == 0) {
    std::fprintf(stderr, "no such criterion\n");
    return 2;
  }
  return all_pass ? 0 : 1;
}
