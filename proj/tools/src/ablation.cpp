#include "amvs/ablation.hpp"

#include <algorithm>

#include "amvs/metrics.hpp"

namespace amvs {

const std::vector<std::string>& ablation_mode_names() {
  static const std::vector<std::string> names{"fixed_range_32", "fixed_range_128", "fixed_range_512",
                                              "adrp",           "no_adia",         "linear_adia"};
  return names;
}

std::string to_string(AblationMode mode) { return ablation_mode_names()[static_cast<int>(mode)]; }

std::optional<AblationMode> parse_ablation_mode(const std::string& text) {
  const auto& names = ablation_mode_names();
  const auto it = std::find(names.begin(), names.end(), text);
  if (it == names.end()) return std::nullopt;
  return static_cast<AblationMode>(it - names.begin());
}

PipelineConfig ablated_config(const PipelineConfig& base, AblationMode mode, const DepthRange& view_range) {
  PipelineConfig cfg = base;
  auto fixed = [&](int planes) {
    StageConfig& s = cfg.stages[1];
    s.range_source = RangeSource::Fixed;
    s.d_num = planes;
    s.fixed_range = DepthRange{view_range.d_min, view_range.d_min + kFixedRangeInterval * planes};
  };
  switch (mode) {
    case AblationMode::FixedRange32: fixed(32); break;
    case AblationMode::FixedRange128: fixed(128); break;
    case AblationMode::FixedRange512: fixed(512); break;
    case AblationMode::Adrp: cfg.stages[1].d_num = kAdrpAblationPlanes; break;
    case AblationMode::NoAdia:
      cfg.stages[2].adjustment = PlaneAdjustment::None;
      cfg.stages[3].adjustment = PlaneAdjustment::None;
      break;
    case AblationMode::LinearAdia:
      cfg.stages[2].adjustment = PlaneAdjustment::Linear;
      cfg.stages[3].adjustment = PlaneAdjustment::Linear;
      break;
  }
  return cfg;
}

ViewMetrics evaluate_view(const ViewReconstruction& rec, const DepthMap& gt, const Settings& settings) {
  ViewMetrics m;
  m.view = rec.view;
  const DepthErrorReport err = depth_errors(rec.depth, gt, settings.error_thresholds);
  m.epe = err.epe;
  m.e1 = err.e1;
  m.e3 = err.e3;
  m.pnumd = pnumd(rec.depth, gt, settings.pnumd_tol);
  m.rel1 = relative_inlier_ratio(rec.depth, gt, 0.01);
  m.stage2_range = rec.stages[1].global_range;
  const OverlapReport ov = overlap_metrics(depth_range_of(gt), m.stage2_range);
  m.aog = ov.aog;
  m.aos = ov.aos;
  m.range_f = ov.f_score;
  std::vector<DepthMap> preds;
  for (const auto& s : rec.stages) preds.push_back(s.depth);
  m.stage_metric = stage_metric(preds, depth_pyramid(gt));
  return m;
}

std::vector<std::pair<std::string, double>> metric_rows(const ViewMetrics& m) {
  return {{"epe", m.epe},         {"e1", m.e1},   {"e3", m.e3},   {"pnumd", m.pnumd},
          {"rel1", m.rel1},       {"aog", m.aog}, {"aos", m.aos}, {"range_f", m.range_f},
          {"stage_metric", m.stage_metric}};
}

}  // namespace amvs
