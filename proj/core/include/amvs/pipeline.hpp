#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "amvs/adia.hpp"
#include "amvs/adrp.hpp"
#include "amvs/cost_volume.hpp"
#include "amvs/features.hpp"
#include "amvs/fusion.hpp"
#include "amvs/geometry.hpp"

namespace amvs {

inline constexpr int kStageCount = 4;

enum class RangeSource { Fixed, Adrp, Adia };

// How pixel-wise (Adia) stages place their planes inside [L - sigma, L + sigma].
enum class PlaneAdjustment { ZScore, Linear, None };

struct StageConfig {
  int d_num = 16;
  RangeSource range_source = RangeSource::Fixed;
  PlaneAdjustment adjustment = PlaneAdjustment::ZScore;
  int reg_radius = 1;
  int reg_passes = 2;
  double temperature = 1.0;
  // Fixed stages use this range when set, otherwise the scene range.
  std::optional<DepthRange> fixed_range;
};

struct PipelineConfig {
  std::array<StageConfig, kStageCount> stages = default_stages();
  std::optional<DepthRange> initial_range;
  RangeScalars scalars;
  AdrpOptions adrp;
  int census_window = kDefaultCensusWindow;
  int max_sources = 0;  // 0: every other view
  int hint_planes = 192;
  int threads = 1;
  std::uint64_t seed = 0;
  ConsistencyThresholds consistency;
  FusionOptions fusion;

  static std::array<StageConfig, kStageCount> default_stages();
  void validate() const;
};

struct StageOutput {
  int level = 0;
  DepthMap depth;
  SigmaMap sigma;
  ConfidenceMap confidence;
  Array2<double> max_probability;
  HypothesisPlanes planes;
  // All-pixel range in force: the swept range for stages 1-2, inherited by 3-4.
  DepthRange global_range;
  double seconds = 0.0;
};

// Everything a stage needs about the reference and its sources at one
// pyramid level. Views carry intrinsics already scaled to that level.
struct StageInputs {
  int level = 0;
  const FeatureMap* ref_features = nullptr;
  std::vector<const FeatureMap*> src_features;
  CameraView ref_view;
  std::vector<CameraView> src_views;
  // Range swept by Fixed stages when the stage config has none.
  DepthRange scene_range;
  RangeScalars scalars;
  AdrpOptions adrp;
};

StageOutput run_stage(const StageConfig& cfg, const StageInputs& inputs, const StageOutput* previous);

// Bilinear 2x upsampling matched to the box-downsampling pixel grid.
Array2<double> upsample2x(const Array2<double>& map);

struct SceneBundle {
  std::vector<CameraView> views;
  std::vector<ColorImage> images;
  std::vector<DepthMap> gt_depths;         // optional; empty when unknown
  std::vector<std::vector<int>> pair_list;  // optional ranked sources per view
};

struct ViewReconstruction {
  int view = 0;
  DepthMap depth;  // source resolution
  ConfidenceMap confidence;
  SigmaMap sigma;
  std::array<StageOutput, kStageCount> stages;
};

std::vector<int> select_sources(const SceneBundle& scene, int ref, int max_sources);
DepthRange scene_range_for(const SceneBundle& scene, int ref, const PipelineConfig& cfg);

ViewReconstruction reconstruct_view(const SceneBundle& scene, const std::vector<FeaturePyramid>& pyramids, int ref,
                                    const PipelineConfig& cfg);

// Reconstructs the listed reference views (all views when empty).
std::vector<ViewReconstruction> reconstruct(const SceneBundle& scene, const PipelineConfig& cfg,
                                            const std::vector<int>& refs = {});

// Stage-1 depth and sigma of each reference view paired with the range of its
// ground truth, ready for calibrate_scalars.
std::vector<CalibrationScene> calibration_samples(const SceneBundle& scene, const PipelineConfig& cfg,
                                                  const std::vector<int>& refs = {});

inline constexpr std::array<double, kStageCount> kStageWeights{0.5, 1.0, 1.5, 2.0};

// Ground truth at each stage resolution: per-block mean of the valid depths
// of the edge-padded map.
std::vector<DepthMap> depth_pyramid(const DepthMap& gt);

// sum_i w_i * mean_{x valid} |pred_i(x) - gt_i(x)|
double stage_metric(const std::vector<DepthMap>& predictions, const std::vector<DepthMap>& gt,
                    const std::array<double, kStageCount>& weights = kStageWeights);

std::string to_string(RangeSource source);
std::string to_string(PlaneAdjustment adjustment);

}  // namespace amvs
