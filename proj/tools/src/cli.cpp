#include "amvs/cli.hpp"

#include <filesystem>
#include <map>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "amvs/ablation.hpp"
#include "amvs/config.hpp"
#include "amvs/error.hpp"
#include "amvs/io_formats.hpp"
#include "amvs/metrics.hpp"
#include "amvs/parallel.hpp"
#include "amvs/synth.hpp"

namespace amvs {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

std::string dashed(std::string key) {
  for (char& c : key)
    if (c == '_') c = '-';
  return key;
}

std::string view_name(int view) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%08d", view);
  return buf;
}

fs::path depth_file(const fs::path& recon, int view) { return recon / "depth" / (view_name(view) + ".pfm"); }
fs::path confidence_file(const fs::path& recon, int view) { return recon / "confidence" / (view_name(view) + ".pfm"); }
fs::path sigma_file(const fs::path& recon, int view) { return recon / "sigma" / (view_name(view) + ".pfm"); }
fs::path stage_file(const fs::path& recon, int view, int stage) {
  return recon / "stages" / (view_name(view) + "_s" + std::to_string(stage + 1) + ".pfm");
}

std::string scene_label(const fs::path& dir) {
  fs::path p = dir.lexically_normal();
  if (p.filename().empty()) p = p.parent_path();
  return p.filename().string();
}

// Every config key as a `--dashed-name` option; flags win over --config.
class SettingFlags {
 public:
  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_file_, "Settings file of `key = value` lines");
    for (const auto& key : setting_keys())
      options_.emplace_back(key, cmd->add_option("--" + dashed(key), values_[key], "Overrides `" + key + "`"));
  }

  Settings resolve() const {
    Settings s;
    if (!config_file_.empty()) s = read_settings(config_file_, s);
    for (const auto& [key, opt] : options_)
      if (opt->count() > 0) apply_setting(s, key, values_.at(key));
    s.pipeline.validate();
    s.pipeline.consistency.validate();
    set_thread_count(s.pipeline.threads);
    return s;
  }

 private:
  std::string config_file_;
  std::map<std::string, std::string> values_;
  std::vector<std::pair<std::string, CLI::Option*>> options_;
};

// Replaces alpha_dr and beta_dr with a fit over the calibration scenes.
void apply_calibration(Settings& s) {
  if (s.calibration_scenes.empty()) return;
  std::vector<CalibrationScene> samples;
  for (const auto& dir : s.calibration_scenes) {
    const SceneBundle scene = read_scene(dir, s.pipeline.hint_planes);
    const auto part = calibration_samples(scene, s.pipeline);
    samples.insert(samples.end(), part.begin(), part.end());
  }
  s.pipeline.scalars = calibrate_scalars(samples, s.pipeline.adrp);
}

Json settings_json(const Settings& s) {
  Json j = Json::object();
  for (const auto& key : setting_keys()) j[key] = setting_value(s, key);
  return j;
}

void write_json(const fs::path& path, const Json& j) { write_file(path, j.dump(2) + "\n"); }

std::string csv_row(const std::string& metric, const std::string& scene, const std::string& view, double value) {
  return metric + ',' + scene + ',' + view + ',' + format_number(value) + '\n';
}

std::vector<int> resolve_views(const std::vector<int>& requested, int count) {
  if (requested.empty()) {
    std::vector<int> all(count);
    for (int i = 0; i < count; ++i) all[i] = i;
    return all;
  }
  for (int v : requested)
    require(v >= 0 && v < count, ErrorCode::InvalidConfig, "view " + std::to_string(v) + " is not in the scene");
  return requested;
}

ConfidenceMap read_map(const fs::path& path) {
  const Array2<float> raw = read_pfm_raw(path);
  ConfidenceMap map(raw.height(), raw.width());
  for (std::size_t i = 0; i < raw.size(); ++i) map[i] = raw[i];
  return map;
}

// ---------------------------------------------------------------- synth

struct SynthArgs {
  std::string out;
  std::string geometry = "sphere";
  std::string texture = "noise";
  SynthSceneSpec spec;
};

int cmd_synth(SynthArgs& a, std::ostream& out) {
  a.spec.geometry = parse_geometry(a.geometry);
  a.spec.texture = parse_texture(a.texture);
  a.spec.validate();
  const SceneBundle scene = synth_scene(a.spec);
  const fs::path dir = a.out;
  write_scene(dir, scene, a.spec.hint_planes);

  const SynthSceneSpec& s = a.spec;
  Json spec = {{"geometry", to_string(s.geometry)},
               {"texture", to_string(s.texture)},
               {"views", s.num_views},
               {"width", s.width},
               {"height", s.height},
               {"focal", s.focal_length()},
               {"baseline", s.baseline},
               {"near", s.near},
               {"far", s.far},
               {"slope", s.slope},
               {"sphere_radius", s.sphere_r()},
               {"converge", s.converge},
               {"supersample", s.supersample},
               {"hint_min", s.hint_min},
               {"hint_interval", s.hint_interval},
               {"hint_planes", s.hint_planes}};
  Json outputs = Json::array();
  for (int v = 0; v < s.num_views; ++v) {
    outputs.push_back(fs::relative(cam_path(dir, v), dir).generic_string());
    outputs.push_back(fs::relative(image_path(dir, v), dir).generic_string());
    outputs.push_back(fs::relative(gt_depth_path(dir, v), dir).generic_string());
  }
  outputs.push_back("pair.txt");
  write_json(dir / "manifest.json",
             {{"command", "synth"}, {"spec", spec}, {"seed", s.seed}, {"outputs", outputs}});
  out << "synth: wrote " << s.num_views << " views to " << dir.string() << '\n';
  return kExitOk;
}

// ---------------------------------------------------------- reconstruct

struct ReconstructArgs {
  std::string scene;
  std::string out;
  std::vector<int> views;
  SettingFlags flags;
};

int cmd_reconstruct(const ReconstructArgs& a, const std::vector<std::string>& argv, std::ostream& out) {
  Settings settings = a.flags.resolve();
  apply_calibration(settings);
  const SceneBundle scene = read_scene(a.scene, settings.pipeline.hint_planes);
  const std::vector<int> refs = resolve_views(a.views, static_cast<int>(scene.views.size()));
  const std::vector<ViewReconstruction> recs = reconstruct(scene, settings.pipeline, refs);

  const fs::path dir = a.out;
  write_file(dir / "resolved.cfg", format_settings(settings));
  Json views = Json::array();
  Json outputs = Json::array();
  for (const auto& rec : recs) {
    write_pfm(depth_file(dir, rec.view), rec.depth);
    write_pfm(confidence_file(dir, rec.view), rec.confidence);
    write_pfm(sigma_file(dir, rec.view), rec.sigma);
    Json seconds = Json::array();
    Json ranges = Json::array();
    Json stage_files = Json::array();
    for (int k = 0; k < kStageCount; ++k) {
      write_pfm(stage_file(dir, rec.view, k), rec.stages[k].depth);
      seconds.push_back(rec.stages[k].seconds);
      ranges.push_back({rec.stages[k].global_range.d_min, rec.stages[k].global_range.d_max});
      stage_files.push_back(fs::relative(stage_file(dir, rec.view, k), dir).generic_string());
    }
    const std::string depth_rel = fs::relative(depth_file(dir, rec.view), dir).generic_string();
    const std::string conf_rel = fs::relative(confidence_file(dir, rec.view), dir).generic_string();
    outputs.push_back(depth_rel);
    outputs.push_back(conf_rel);
    views.push_back({{"view", rec.view},
                     {"depth", depth_rel},
                     {"confidence", conf_rel},
                     {"sigma", fs::relative(sigma_file(dir, rec.view), dir).generic_string()},
                     {"stages", stage_files},
                     {"stage_ranges", ranges},
                     {"stage_seconds", seconds}});
  }
  write_json(dir / "manifest.json", {{"command", "reconstruct"},
                                     {"argv", argv},
                                     {"scene", a.scene},
                                     {"config", settings_json(settings)},
                                     {"config_file", "resolved.cfg"},
                                     {"seed", settings.pipeline.seed},
                                     {"views", views},
                                     {"outputs", outputs},
                                     {"metrics_csv", nullptr}});
  out << "reconstruct: wrote " << recs.size() << " depth maps to " << dir.string() << '\n';
  return kExitOk;
}

// ----------------------------------------------------------------- fuse

struct FuseArgs {
  std::string scene;
  std::string recon;
  std::string out;
  SettingFlags flags;
};

int cmd_fuse(const FuseArgs& a, const std::vector<std::string>& argv, std::ostream& out) {
  const Settings settings = a.flags.resolve();
  const SceneBundle scene = read_scene(a.scene, settings.pipeline.hint_planes);
  const fs::path recon = a.recon;
  std::vector<DepthMap> depths;
  std::vector<ConfidenceMap> confs;
  std::vector<CameraView> views;
  std::vector<ColorImage> images;
  std::vector<int> used;
  for (int v = 0; v < static_cast<int>(scene.views.size()); ++v) {
    if (!fs::exists(depth_file(recon, v))) continue;
    depths.push_back(read_pfm(depth_file(recon, v)));
    confs.push_back(read_map(confidence_file(recon, v)));
    views.push_back(scene.views[v]);
    images.push_back(scene.images[v]);
    used.push_back(v);
  }
  require(views.size() >= 2, ErrorCode::InsufficientViews, "fusion needs depth maps for at least two views");
  const auto masks = geometric_consistency(depths, confs, views, settings.pipeline.consistency);
  long kept = 0;
  for (const auto& m : masks)
    for (std::size_t i = 0; i < m.size(); ++i) kept += m[i] != 0;
  PointCloud cloud = fuse(depths, masks, images, views, settings.pipeline.fusion);
  for (auto& p : cloud.points) p.view = used[p.view];

  const fs::path dir = a.out;
  write_ply(dir / "fused.ply", cloud);
  write_json(dir / "manifest.json", {{"command", "fuse"},
                                     {"argv", argv},
                                     {"scene", a.scene},
                                     {"recon", a.recon},
                                     {"config", settings_json(settings)},
                                     {"seed", settings.pipeline.seed},
                                     {"views", used},
                                     {"kept_pixels", kept},
                                     {"points", cloud.size()},
                                     {"outputs", {"fused.ply"}},
                                     {"metrics_csv", nullptr}});
  out << "fuse: " << cloud.size() << " points from " << kept << " consistent pixels\n";
  return kExitOk;
}

// ----------------------------------------------------------------- eval

struct EvalArgs {
  std::string scene;
  std::string recon;
  std::string pred_dir;
  std::string csv;
  std::string ply;
  std::vector<double> range;
  SettingFlags flags;
};

PointCloud gt_cloud(const SceneBundle& scene) {
  PointCloud cloud;
  for (int v = 0; v < static_cast<int>(scene.views.size()); ++v) {
    const DepthMap& gt = scene.gt_depths[v];
    for (int y = 0; y < gt.height(); ++y)
      for (int x = 0; x < gt.width(); ++x) {
        if (!gt.is_valid(y, x)) continue;
        CloudPoint p;
        p.position = unproject(scene.views[v], x, y, gt.depth(y, x));
        p.view = v;
        cloud.points.push_back(p);
      }
  }
  return cloud;
}

int cmd_eval(const EvalArgs& a, const std::vector<std::string>& argv, std::ostream& out) {
  const Settings settings = a.flags.resolve();
  const SceneBundle scene = read_scene(a.scene, settings.pipeline.hint_planes);
  require(!scene.gt_depths.empty(), ErrorCode::IoError, "scene " + a.scene + " has no ground-truth depth maps");
  require(!a.recon.empty() || !a.pred_dir.empty(), ErrorCode::InvalidConfig, "eval needs --recon or --pred-dir");
  require(a.range.empty() || a.range.size() == 2, ErrorCode::InvalidConfig, "--range expects min,max");

  const fs::path recon = a.recon;
  const fs::path pred_dir = a.pred_dir.empty() ? recon / "depth" : fs::path(a.pred_dir);
  Json manifest;
  if (!a.recon.empty() && fs::exists(recon / "manifest.json")) {
    try {
      manifest = Json::parse(read_file(recon / "manifest.json"));
    } catch (const Json::exception& e) {
      fail(ErrorCode::ParseError, "bad manifest in " + a.recon + ": " + e.what());
    }
  }
  auto manifest_range = [&](int view) -> std::optional<DepthRange> {
    if (!manifest.contains("views")) return std::nullopt;
    for (const auto& v : manifest["views"])
      if (v.value("view", -1) == view && v.contains("stage_ranges"))
        return DepthRange{v["stage_ranges"][1][0].get<double>(), v["stage_ranges"][1][1].get<double>()};
    return std::nullopt;
  };

  const std::string label = scene_label(a.scene);
  std::string csv = "metric,scene,view,value\n";
  int evaluated = 0;
  for (int v = 0; v < static_cast<int>(scene.views.size()); ++v) {
    const fs::path pred_path = pred_dir / (view_name(v) + ".pfm");
    if (!fs::exists(pred_path)) continue;
    const DepthMap pred = read_pfm(pred_path);
    const DepthMap& gt = scene.gt_depths[v];
    const DepthErrorReport err = depth_errors(pred, gt, settings.error_thresholds);
    const std::string view = std::to_string(v);
    csv += csv_row("epe", label, view, err.epe);
    csv += csv_row("e1", label, view, err.e1);
    csv += csv_row("e3", label, view, err.e3);
    csv += csv_row("pnumd", label, view, pnumd(pred, gt, settings.pnumd_tol));
    csv += csv_row("rel1", label, view, relative_inlier_ratio(pred, gt, 0.01));

    std::optional<DepthRange> candidate;
    if (a.range.size() == 2) candidate = DepthRange{a.range[0], a.range[1]};
    else candidate = manifest_range(v);
    if (candidate) {
      const OverlapReport ov = overlap_metrics(depth_range_of(gt), *candidate);
      csv += csv_row("aog", label, view, ov.aog);
      csv += csv_row("aos", label, view, ov.aos);
      csv += csv_row("range_f", label, view, ov.f_score);
    }

    if (!a.recon.empty()) {
      std::vector<DepthMap> stages;
      for (int k = 0; k < kStageCount; ++k)
        if (fs::exists(stage_file(recon, v, k))) stages.push_back(read_pfm(stage_file(recon, v, k)));
      if (stages.size() == kStageCount) csv += csv_row("stage_metric", label, view, stage_metric(stages, depth_pyramid(gt)));
    }
    ++evaluated;
  }
  require(evaluated > 0, ErrorCode::IoError, "no predicted depth maps found in " + pred_dir.string());

  if (!a.ply.empty()) {
    const CloudMetricReport c = cloud_metrics(read_ply(a.ply), gt_cloud(scene), settings.cloud_tau);
    csv += csv_row("acc", label, "all", c.acc);
    csv += csv_row("comp", label, "all", c.comp);
    csv += csv_row("overall", label, "all", c.overall);
    csv += csv_row("precision", label, "all", c.precision);
    csv += csv_row("recall", label, "all", c.recall);
    csv += csv_row("f_score", label, "all", c.f_score);
  }

  write_file(a.csv, csv);
  write_json(a.csv + ".manifest.json", {{"command", "eval"},
                                        {"argv", argv},
                                        {"scene", a.scene},
                                        {"pred", pred_dir.string()},
                                        {"config", settings_json(settings)},
                                        {"seed", settings.pipeline.seed},
                                        {"outputs", Json::array()},
                                        {"metrics_csv", a.csv}});
  out << "eval: " << evaluated << " views -> " << a.csv << '\n';
  return kExitOk;
}

// --------------------------------------------------------------- ablate

struct AblateArgs {
  std::string scene;
  std::string mode;
  std::string csv;
  std::vector<int> views;
  SettingFlags flags;
};

int cmd_ablate(const AblateArgs& a, const std::vector<std::string>& argv, std::ostream& out) {
  Settings settings = a.flags.resolve();
  apply_calibration(settings);
  const AblationMode mode = *parse_ablation_mode(a.mode);
  const SceneBundle scene = read_scene(a.scene, settings.pipeline.hint_planes);
  require(!scene.gt_depths.empty(), ErrorCode::IoError, "scene " + a.scene + " has no ground-truth depth maps");
  const std::vector<int> refs = resolve_views(a.views, static_cast<int>(scene.views.size()));

  const std::string label = scene_label(a.scene);
  const std::array<std::string, 2> variants{"default", a.mode};
  std::array<std::map<std::string, double>, 2> sums;
  std::string csv = "metric,scene,view,value\n";
  for (int ref : refs) {
    const PipelineConfig base = settings.pipeline;
    const PipelineConfig ablated = ablated_config(base, mode, scene_range_for(scene, ref, base));
    const std::array<const PipelineConfig*, 2> cfgs{&base, &ablated};
    for (int i = 0; i < 2; ++i) {
      const ViewReconstruction rec = reconstruct(scene, *cfgs[i], {ref}).front();
      const ViewMetrics m = evaluate_view(rec, scene.gt_depths[ref], settings);
      for (const auto& [name, value] : metric_rows(m)) {
        csv += csv_row(variants[i] + '/' + name, label, std::to_string(ref), value);
        sums[i][name] += value;
      }
    }
  }
  for (int i = 0; i < 2; ++i)
    for (const auto& [name, value] : metric_rows(ViewMetrics{}))
      csv += csv_row(variants[i] + '/' + name, label, "mean", sums[i][name] / static_cast<double>(refs.size()));

  write_file(a.csv, csv);
  write_json(a.csv + ".manifest.json", {{"command", "ablate"},
                                        {"argv", argv},
                                        {"scene", a.scene},
                                        {"mode", a.mode},
                                        {"config", settings_json(settings)},
                                        {"seed", settings.pipeline.seed},
                                        {"outputs", Json::array()},
                                        {"metrics_csv", a.csv}});
  out << "ablate: " << a.mode << " on " << refs.size() << " views -> " << a.csv << '\n';
  return kExitOk;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError:
    case ErrorCode::UnsupportedVariant:
    case ErrorCode::IoError: return kExitParse;
    default: return kExitNumerical;
  }
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Adaptive-range multi-view stereo"};
  app.name("amvs");
  app.require_subcommand(1);

  SynthArgs synth;
  CLI::App* c_synth = app.add_subcommand("synth", "Render a synthetic scene directory");
  c_synth->add_option("--out", synth.out, "Output scene directory")->required();
  c_synth->add_option("--geometry", synth.geometry, "plane, sphere, two_planes or wedge")
      ->check(CLI::IsMember({"plane", "sphere", "two_planes", "wedge"}));
  c_synth->add_option("--texture", synth.texture, "noise or checker")->check(CLI::IsMember({"noise", "checker"}));
  c_synth->add_option("--views", synth.spec.num_views);
  c_synth->add_option("--width", synth.spec.width);
  c_synth->add_option("--height", synth.spec.height);
  c_synth->add_option("--focal", synth.spec.focal, "Focal length in pixels, 0 for 1.5 * width");
  c_synth->add_option("--baseline", synth.spec.baseline);
  c_synth->add_option("--near", synth.spec.near);
  c_synth->add_option("--far", synth.spec.far);
  c_synth->add_option("--slope", synth.spec.slope);
  c_synth->add_option("--sphere-radius", synth.spec.sphere_radius);
  c_synth->add_option("--converge", synth.spec.converge);
  c_synth->add_option("--supersample", synth.spec.supersample);
  c_synth->add_option("--hint-min", synth.spec.hint_min);
  c_synth->add_option("--hint-interval", synth.spec.hint_interval);
  c_synth->add_option("--hint-planes", synth.spec.hint_planes);
  c_synth->add_option("--seed", synth.spec.seed);

  ReconstructArgs rec;
  CLI::App* c_rec = app.add_subcommand("reconstruct", "Estimate a depth map for every reference view");
  c_rec->add_option("--scene", rec.scene, "Scene directory")->required();
  c_rec->add_option("--out", rec.out, "Output directory")->required();
  c_rec->add_option("--views", rec.views, "Reference views (default: all)")->delimiter(',');
  rec.flags.attach(c_rec);

  FuseArgs fuse_args;
  CLI::App* c_fuse = app.add_subcommand("fuse", "Fuse depth maps into a point cloud");
  c_fuse->add_option("--scene", fuse_args.scene, "Scene directory")->required();
  c_fuse->add_option("--recon", fuse_args.recon, "Output directory of `reconstruct`")->required();
  c_fuse->add_option("--out", fuse_args.out, "Output directory")->required();
  fuse_args.flags.attach(c_fuse);

  EvalArgs eval;
  CLI::App* c_eval = app.add_subcommand("eval", "Compare predictions with ground truth");
  c_eval->add_option("--scene", eval.scene, "Scene directory with depth_gt/")->required();
  c_eval->add_option("--recon", eval.recon, "Output directory of `reconstruct`");
  c_eval->add_option("--pred-dir", eval.pred_dir, "Directory of predicted %08d.pfm depth maps");
  c_eval->add_option("--csv", eval.csv, "Metrics CSV to write")->required();
  c_eval->add_option("--ply", eval.ply, "Fused cloud to score against the ground-truth cloud");
  c_eval->add_option("--range", eval.range, "Candidate depth range min,max for aog/aos")->delimiter(',');
  eval.flags.attach(c_eval);

  AblateArgs ablate;
  CLI::App* c_ablate = app.add_subcommand("ablate", "Compare the default pipeline with an ablated variant");
  c_ablate->add_option("--scene", ablate.scene, "Scene directory with depth_gt/")->required();
  c_ablate->add_option("--mode", ablate.mode, "Ablation mode")->required()->check(CLI::IsMember(ablation_mode_names()));
  c_ablate->add_option("--csv", ablate.csv, "Metrics CSV to write")->required();
  c_ablate->add_option("--views", ablate.views, "Reference views (default: all)")->delimiter(',');
  ablate.flags.attach(c_ablate);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  const std::vector<std::string> args(argv, argv + argc);
  try {
    if (c_synth->parsed()) return cmd_synth(synth, out);
    if (c_rec->parsed()) return cmd_reconstruct(rec, args, out);
    if (c_fuse->parsed()) return cmd_fuse(fuse_args, args, out);
    if (c_eval->parsed()) return cmd_eval(eval, args, out);
    if (c_ablate->parsed()) return cmd_ablate(ablate, args, out);
  } catch (const Error& e) {
    err << "amvs: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "amvs: " << e.what() << '\n';
    return 1;
  }
  return kExitUsage;
}

}  // namespace amvs
