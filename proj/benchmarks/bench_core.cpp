#include <benchmark/benchmark.h>

#include "amvs/adia.hpp"
#include "amvs/cost_volume.hpp"
#include "amvs/features.hpp"
#include "amvs/fusion.hpp"
#include "amvs/geometry.hpp"
#include "amvs/pipeline.hpp"
#include "amvs/synth.hpp"

namespace {

using namespace amvs;

const SceneBundle& scene() {
  static const SceneBundle s = synth_scene(SynthSceneSpec{});
  return s;
}

const std::vector<FeaturePyramid>& pyramids() {
  static const std::vector<FeaturePyramid> p = [] {
    std::vector<FeaturePyramid> out;
    for (const auto& img : scene().images) out.push_back(build_pyramid(to_grayscale(img)));
    return out;
  }();
  return p;
}

// Full-resolution level with one source.
void BM_WarpImage(benchmark::State& state) {
  const auto& feats = pyramids()[1].levels[3];
  const Homography h = plane_homography(scene().views[0], scene().views[1], 650.0);
  for (auto _ : state) benchmark::DoNotOptimize(warp_map(feats, h));
}
BENCHMARK(BM_WarpImage)->Unit(benchmark::kMicrosecond);

void BM_BuildPyramid(benchmark::State& state) {
  const GrayImage gray = to_grayscale(scene().images[0]);
  for (auto _ : state) benchmark::DoNotOptimize(build_pyramid(gray));
}
BENCHMARK(BM_BuildPyramid)->Unit(benchmark::kMicrosecond);

// Variance cost over four sources at the given pyramid level and plane count.
void BM_CostVolume(benchmark::State& state) {
  const int level = static_cast<int>(state.range(0));
  const int planes_n = static_cast<int>(state.range(1));
  const int down = 3 - level;
  const HypothesisPlanes planes = equal_partition(DepthRange{425.0, 905.0}, planes_n);
  const CameraView ref = scene().views[0].downscaled(down);
  for (auto _ : state) {
    std::vector<FeatureVolume> volumes;
    for (std::size_t s = 1; s < scene().views.size(); ++s)
      volumes.push_back(build_feature_volume(pyramids()[s].levels[level], ref, scene().views[s].downscaled(down), planes));
    benchmark::DoNotOptimize(aggregate_variance(pyramids()[0].levels[level], volumes));
  }
}
BENCHMARK(BM_CostVolume)->Args({0, 16})->Args({1, 64})->Args({3, 8})->Unit(benchmark::kMicrosecond);

void BM_RegularizeAndRegress(benchmark::State& state) {
  const HypothesisPlanes planes = equal_partition(DepthRange{425.0, 905.0}, 64);
  const CameraView ref = scene().views[0].downscaled(2);
  std::vector<FeatureVolume> volumes;
  for (std::size_t s = 1; s < scene().views.size(); ++s)
    volumes.push_back(build_feature_volume(pyramids()[s].levels[1], ref, scene().views[s].downscaled(2), planes));
  const CostVolume cost = aggregate_variance(pyramids()[0].levels[1], volumes);
  for (auto _ : state) {
    const ProbabilityVolume p = to_probability(regularize(cost, 1, 2), 0.05);
    const DepthMap l = regress_depth(p, planes);
    benchmark::DoNotOptimize(sigma_map(p, planes, l));
  }
}
BENCHMARK(BM_RegularizeAndRegress)->Unit(benchmark::kMicrosecond);

void BM_AdiaPlanes(benchmark::State& state) {
  const int h = 32, w = 40;
  const DepthMap prev(h, w, 650.0);
  const SigmaMap sigma(h, w, 12.0);
  for (auto _ : state) {
    const HypothesisPlanes planes = equal_partition(pixelwise_range(prev, sigma, {425.0, 905.0}), 16);
    benchmark::DoNotOptimize(adjust_planes(planes, offsets(planes, prev, sigma)));
  }
}
BENCHMARK(BM_AdiaPlanes)->Unit(benchmark::kMicrosecond);

void BM_ReconstructView(benchmark::State& state) {
  const PipelineConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(reconstruct_view(scene(), pyramids(), 0, cfg));
}
BENCHMARK(BM_ReconstructView)->Unit(benchmark::kMillisecond);

void BM_Fuse(benchmark::State& state) {
  static const std::vector<ViewReconstruction> recs = reconstruct(scene(), PipelineConfig{});
  std::vector<DepthMap> depths;
  std::vector<ConfidenceMap> confs;
  for (const auto& r : recs) {
    depths.push_back(r.depth);
    confs.push_back(r.confidence);
  }
  for (auto _ : state) {
    const auto masks = geometric_consistency(depths, confs, scene().views, ConsistencyThresholds{});
    benchmark::DoNotOptimize(fuse(depths, masks, scene().images, scene().views));
  }
}
BENCHMARK(BM_Fuse)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
