#pragma once

#include <optional>
#include <string>
#include <vector>

#include "amvs/config.hpp"
#include "amvs/pipeline.hpp"

namespace amvs {

enum class AblationMode { FixedRange32, FixedRange128, FixedRange512, Adrp, NoAdia, LinearAdia };

std::string to_string(AblationMode mode);
std::optional<AblationMode> parse_ablation_mode(const std::string& text);
const std::vector<std::string>& ablation_mode_names();

// Spacing of the fixed-range baselines.
inline constexpr double kFixedRangeInterval = 2.5;
inline constexpr int kAdrpAblationPlanes = 128;

// Config for one reference view. Fixed-range modes sweep
// [hint_min, hint_min + 2.5 N] with N planes at stage 2; `adrp` keeps the
// default wiring with 128 stage-2 planes.
PipelineConfig ablated_config(const PipelineConfig& base, AblationMode mode, const DepthRange& view_range);

struct ViewMetrics {
  int view = 0;
  double epe = 0.0;
  double e1 = 0.0;
  double e3 = 0.0;
  double pnumd = 0.0;
  double rel1 = 0.0;  // % of pixels with relative error below 1%
  double aog = 0.0;   // stage-2 range against the GT range
  double aos = 0.0;
  double range_f = 0.0;
  double stage_metric = 0.0;
  DepthRange stage2_range;
};

ViewMetrics evaluate_view(const ViewReconstruction& rec, const DepthMap& gt, const Settings& settings);

// (metric, value) pairs in CSV order.
std::vector<std::pair<std::string, double>> metric_rows(const ViewMetrics& m);

}  // namespace amvs
