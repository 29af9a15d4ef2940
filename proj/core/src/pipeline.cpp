#include "amvs/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "amvs/error.hpp"
#include "amvs/parallel.hpp"

namespace amvs {

std::array<StageConfig, kStageCount> PipelineConfig::default_stages() {
  std::array<StageConfig, kStageCount> stages;
  const std::array<int, kStageCount> planes{16, 64, 16, 8};
  const std::array<double, kStageCount> temperatures{0.1, 0.05, 0.01, 0.002};
  const std::array<RangeSource, kStageCount> sources{RangeSource::Fixed, RangeSource::Adrp, RangeSource::Adia,
                                                     RangeSource::Adia};
  for (int k = 0; k < kStageCount; ++k) {
    stages[k].d_num = planes[k];
    stages[k].range_source = sources[k];
    stages[k].temperature = temperatures[k];
  }
  return stages;
}

void PipelineConfig::validate() const {
  for (int k = 0; k < kStageCount; ++k) {
    const StageConfig& s = stages[k];
    require(s.d_num >= 2, ErrorCode::InvalidConfig, "every stage needs at least two planes");
    require(s.reg_radius >= 0 && s.reg_passes >= 0, ErrorCode::InvalidConfig, "regularizer settings must be >= 0");
    require(s.temperature > 0.0, ErrorCode::NonPositiveTemperature, "softmax temperature must be positive");
    if (s.fixed_range) require(s.fixed_range->valid(), ErrorCode::InvalidConfig, "fixed range must be 0 < min < max");
  }
  require(stages[0].range_source == RangeSource::Fixed, ErrorCode::InvalidConfig, "stage 1 must use a fixed range");
  for (int k = 1; k < kStageCount; ++k) {
    if (stages[k].range_source == RangeSource::Adia)
      require(k >= 2 || stages[k - 1].range_source != RangeSource::Adia, ErrorCode::InvalidConfig,
              "pixel-wise stages need an all-pixel stage before them");
  }
  if (initial_range) require(initial_range->valid(), ErrorCode::InvalidConfig, "initial range must be 0 < min < max");
  require(census_window >= 3 && census_window % 2 == 1, ErrorCode::InvalidConfig, "census window must be odd >= 3");
  require(max_sources >= 0, ErrorCode::InvalidConfig, "max_sources must be >= 0");
  require(hint_planes >= 1, ErrorCode::InvalidConfig, "hint_planes must be >= 1");
  require(threads >= 1, ErrorCode::InvalidConfig, "threads must be >= 1");
  consistency.validate();
}

std::string to_string(RangeSource source) {
  switch (source) {
    case RangeSource::Fixed: return "fixed";
    case RangeSource::Adrp: return "adrp";
    case RangeSource::Adia: return "adia";
  }
  return "fixed";
}

std::string to_string(PlaneAdjustment adjustment) {
  switch (adjustment) {
    case PlaneAdjustment::ZScore: return "zscore";
    case PlaneAdjustment::Linear: return "linear";
    case PlaneAdjustment::None: return "none";
  }
  return "zscore";
}

Array2<double> upsample2x(const Array2<double>& map) {
  const int h = map.height();
  const int w = map.width();
  Array2<double> out(2 * h, 2 * w);
  for (int y = 0; y < 2 * h; ++y) {
    const double sy = std::clamp((y - 0.5) * 0.5, 0.0, static_cast<double>(h - 1));
    const int y0 = std::min(static_cast<int>(sy), std::max(h - 2, 0));
    const int y1 = std::min(y0 + 1, h - 1);
    const double ay = sy - y0;
    for (int x = 0; x < 2 * w; ++x) {
      const double sx = std::clamp((x - 0.5) * 0.5, 0.0, static_cast<double>(w - 1));
      const int x0 = std::min(static_cast<int>(sx), std::max(w - 2, 0));
      const int x1 = std::min(x0 + 1, w - 1);
      const double ax = sx - x0;
      out(y, x) = (1.0 - ay) * ((1.0 - ax) * map(y0, x0) + ax * map(y0, x1)) +
                  ay * ((1.0 - ax) * map(y1, x0) + ax * map(y1, x1));
    }
  }
  return out;
}

namespace {

HypothesisPlanes planes_for_stage(const StageConfig& cfg, const StageInputs& in, const StageOutput* prev,
                                  DepthRange& global_range) {
  const int h = in.ref_features->dim0();
  const int w = in.ref_features->dim1();
  switch (cfg.range_source) {
    case RangeSource::Fixed:
      global_range = cfg.fixed_range.value_or(in.scene_range);
      return equal_partition(global_range, cfg.d_num);
    case RangeSource::Adrp:
      require(prev != nullptr, ErrorCode::MissingPreviousStage, "adaptive range stage needs the previous stage");
      global_range = adjust_range(prev->depth, prev->sigma, in.scalars, in.adrp);
      return equal_partition(global_range, cfg.d_num);
    case RangeSource::Adia:
      break;
  }
  require(prev != nullptr, ErrorCode::MissingPreviousStage, "pixel-wise stage needs the previous stage");
  global_range = prev->global_range;

  DepthMap previous(h, w);
  SigmaMap sigma;
  if (prev->depth.height() == h && prev->depth.width() == w) {
    previous.depth = prev->depth.depth;
    sigma = prev->sigma;
  } else {
    require(prev->depth.height() * 2 == h && prev->depth.width() * 2 == w, ErrorCode::ResolutionMismatch,
            "previous stage is not at half the current resolution");
    previous.depth = upsample2x(prev->depth.depth);
    sigma = upsample2x(prev->sigma);
  }
  const double floor = sigma_floor(prev->planes.mean_interval());
  for (double& s : sigma.values()) s = std::max(s, floor);

  HypothesisPlanes planes = equal_partition(pixelwise_range(previous, sigma, global_range, floor), cfg.d_num);
  if (cfg.adjustment == PlaneAdjustment::None) return planes;
  const OffsetMode mode = cfg.adjustment == PlaneAdjustment::Linear ? OffsetMode::Linear : OffsetMode::ZScore;
  return adjust_planes(planes, offsets(planes, previous, sigma, mode));
}

}  // namespace

StageOutput run_stage(const StageConfig& cfg, const StageInputs& in, const StageOutput* previous) {
  const auto start = std::chrono::steady_clock::now();
  require(in.ref_features != nullptr, ErrorCode::InvalidConfig, "stage has no reference features");
  require(in.src_features.size() == in.src_views.size(), ErrorCode::ShapeMismatch, "source features/views differ");
  require(!in.src_features.empty(), ErrorCode::NoSourceViews, "stage has no source views");

  StageOutput out;
  out.level = in.level;
  out.planes = planes_for_stage(cfg, in, previous, out.global_range);

  std::vector<FeatureVolume> volumes;
  volumes.reserve(in.src_features.size());
  for (std::size_t i = 0; i < in.src_features.size(); ++i) {
    require(in.src_features[i]->same_shape(*in.ref_features), ErrorCode::ResolutionMismatch,
            "source features differ in size from the reference");
    volumes.push_back(build_feature_volume(*in.src_features[i], in.ref_view, in.src_views[i], out.planes));
  }
  const CostVolume raw = aggregate_variance(*in.ref_features, volumes);
  volumes.clear();
  const CostVolume cost = regularize(raw, cfg.reg_radius, cfg.reg_passes);
  const ProbabilityVolume prob = to_probability(cost, cfg.temperature);

  out.depth = regress_depth(prob, out.planes);
  out.depth.valid = supported_pixels(raw);
  out.sigma = sigma_map(prob, out.planes, out.depth);
  out.confidence = confidence_map(prob);
  const int d = prob.prob.dim0();
  out.max_probability = Array2<double>(out.depth.height(), out.depth.width(), 0.0);
  for (int j = 0; j < d; ++j)
    for (int y = 0; y < out.depth.height(); ++y)
      for (int x = 0; x < out.depth.width(); ++x)
        out.max_probability(y, x) = std::max(out.max_probability(y, x), prob.prob(j, y, x));
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

std::vector<int> select_sources(const SceneBundle& scene, int ref, int max_sources) {
  std::vector<int> sources;
  if (ref < static_cast<int>(scene.pair_list.size()) && !scene.pair_list[ref].empty()) {
    for (int id : scene.pair_list[ref])
      if (id != ref && id >= 0 && id < static_cast<int>(scene.views.size())) sources.push_back(id);
  } else {
    for (int i = 0; i < static_cast<int>(scene.views.size()); ++i)
      if (i != ref) sources.push_back(i);
  }
  if (max_sources > 0 && static_cast<int>(sources.size()) > max_sources) sources.resize(max_sources);
  return sources;
}

DepthRange scene_range_for(const SceneBundle& scene, int ref, const PipelineConfig& cfg) {
  const auto& hint = scene.views.at(ref).depth_hint;
  if (hint) return {hint->d_min, hint->d_max};
  require(cfg.initial_range.has_value(), ErrorCode::InvalidConfig,
          "no depth hint for the reference view and no initial_range configured");
  return *cfg.initial_range;
}

namespace {

StageInputs stage_inputs(const SceneBundle& scene, const std::vector<FeaturePyramid>& pyramids, int ref,
                         const std::vector<int>& sources, const DepthRange& scene_range, const PipelineConfig& cfg,
                         int k) {
  StageInputs in;
  in.level = k;
  const int downscale = kStageCount - 1 - k;
  in.ref_features = &pyramids[ref].levels[k];
  in.ref_view = scene.views[ref].downscaled(downscale);
  for (int s : sources) {
    in.src_features.push_back(&pyramids[s].levels[k]);
    in.src_views.push_back(scene.views[s].downscaled(downscale));
  }
  in.scene_range = scene_range;
  in.scalars = cfg.scalars;
  in.adrp = cfg.adrp;
  return in;
}

std::vector<FeaturePyramid> scene_pyramids(const SceneBundle& scene, const PipelineConfig& cfg) {
  cfg.validate();
  require(scene.views.size() >= 2, ErrorCode::InsufficientViews, "reconstruction needs at least two views");
  require(scene.images.size() == scene.views.size(), ErrorCode::ShapeMismatch, "one image per view is required");
  for (const auto& v : scene.views) v.validate();
  for (const auto& img : scene.images)
    require(img.dim0() == scene.images.front().dim0() && img.dim1() == scene.images.front().dim1(),
            ErrorCode::ShapeMismatch, "all images in a scene must share one size");

  std::vector<FeaturePyramid> pyramids(scene.images.size());
  parallel_for(0, static_cast<int>(scene.images.size()), [&](int i) {
    pyramids[i] = build_pyramid(to_grayscale(scene.images[i]), cfg.census_window);
  });
  return pyramids;
}

std::vector<int> reference_order(const SceneBundle& scene, const std::vector<int>& refs) {
  std::vector<int> order = refs;
  if (order.empty())
    for (int i = 0; i < static_cast<int>(scene.views.size()); ++i) order.push_back(i);
  for (int ref : order)
    require(ref >= 0 && ref < static_cast<int>(scene.views.size()), ErrorCode::InvalidConfig, "no such view");
  return order;
}

}  // namespace

ViewReconstruction reconstruct_view(const SceneBundle& scene, const std::vector<FeaturePyramid>& pyramids, int ref,
                                    const PipelineConfig& cfg) {
  const std::vector<int> sources = select_sources(scene, ref, cfg.max_sources);
  require(!sources.empty(), ErrorCode::InsufficientViews, "reference view has no source views");
  const DepthRange scene_range = scene_range_for(scene, ref, cfg);

  ViewReconstruction result;
  result.view = ref;
  for (int k = 0; k < kStageCount; ++k)
    result.stages[k] = run_stage(cfg.stages[k], stage_inputs(scene, pyramids, ref, sources, scene_range, cfg, k),
                                 k > 0 ? &result.stages[k - 1] : nullptr);

  const StageOutput& last = result.stages[kStageCount - 1];
  const int h = pyramids[ref].source_height;
  const int w = pyramids[ref].source_width;
  result.depth = DepthMap(h, w);
  result.confidence = ConfidenceMap(h, w);
  result.sigma = SigmaMap(h, w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      result.depth.depth(y, x) = last.depth.depth(y, x);
      result.depth.valid(y, x) = last.depth.valid(y, x);
      result.confidence(y, x) = last.confidence(y, x);
      result.sigma(y, x) = last.sigma(y, x);
    }
  }
  return result;
}

std::vector<ViewReconstruction> reconstruct(const SceneBundle& scene, const PipelineConfig& cfg,
                                            const std::vector<int>& refs) {
  const std::vector<FeaturePyramid> pyramids = scene_pyramids(scene, cfg);
  std::vector<ViewReconstruction> out;
  for (int ref : reference_order(scene, refs)) out.push_back(reconstruct_view(scene, pyramids, ref, cfg));
  return out;
}

std::vector<CalibrationScene> calibration_samples(const SceneBundle& scene, const PipelineConfig& cfg,
                                                  const std::vector<int>& refs) {
  require(scene.gt_depths.size() == scene.views.size(), ErrorCode::InsufficientData,
          "calibration needs a ground-truth depth map per view");
  const std::vector<FeaturePyramid> pyramids = scene_pyramids(scene, cfg);
  std::vector<CalibrationScene> out;
  for (int ref : reference_order(scene, refs)) {
    const std::vector<int> sources = select_sources(scene, ref, cfg.max_sources);
    require(!sources.empty(), ErrorCode::InsufficientViews, "reference view has no source views");
    const StageOutput s1 = run_stage(
        cfg.stages[0], stage_inputs(scene, pyramids, ref, sources, scene_range_for(scene, ref, cfg), cfg, 0), nullptr);
    out.push_back({s1.depth, s1.sigma, depth_range_of(scene.gt_depths[ref])});
  }
  return out;
}

std::vector<DepthMap> depth_pyramid(const DepthMap& gt) {
  const int h = (gt.height() + 7) / 8 * 8;
  const int w = (gt.width() + 7) / 8 * 8;
  std::vector<DepthMap> levels;
  for (int k = 0; k < kStageCount; ++k) {
    const int block = 1 << (kStageCount - 1 - k);
    DepthMap level(h / block, w / block, 0.0, false);
    for (int y = 0; y < level.height(); ++y) {
      for (int x = 0; x < level.width(); ++x) {
        double sum = 0.0;
        int n = 0;
        for (int yy = y * block; yy < (y + 1) * block; ++yy) {
          for (int xx = x * block; xx < (x + 1) * block; ++xx) {
            const int sy = std::min(yy, gt.height() - 1);
            const int sx = std::min(xx, gt.width() - 1);
            if (!gt.is_valid(sy, sx)) continue;
            sum += gt.depth(sy, sx);
            ++n;
          }
        }
        if (n > 0) {
          level.depth(y, x) = sum / n;
          level.valid(y, x) = 1;
        }
      }
    }
    levels.push_back(std::move(level));
  }
  return levels;
}

double stage_metric(const std::vector<DepthMap>& predictions, const std::vector<DepthMap>& gt,
                    const std::array<double, kStageCount>& weights) {
  require(predictions.size() == kStageCount && gt.size() == kStageCount, ErrorCode::ShapeMismatch,
          "stage metric needs four predictions and four ground-truth levels");
  double total = 0.0;
  for (int k = 0; k < kStageCount; ++k) {
    require(predictions[k].depth.same_shape(gt[k].depth), ErrorCode::ShapeMismatch,
            "prediction and ground truth differ in size");
    double sum = 0.0;
    long count = 0;
    for (int y = 0; y < gt[k].height(); ++y) {
      for (int x = 0; x < gt[k].width(); ++x) {
        if (!gt[k].is_valid(y, x) || !predictions[k].is_valid(y, x)) continue;
        sum += std::abs(gt[k].depth(y, x) - predictions[k].depth(y, x));
        ++count;
      }
    }
    require(count > 0, ErrorCode::NoValidPixels, "a stage has no jointly valid pixels");
    total += weights[k] * (sum / static_cast<double>(count));
  }
  return total;
}

}  // namespace amvs
