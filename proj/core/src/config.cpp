#include "amvs/config.hpp"

#include <charconv>
#include <cmath>
#include <functional>

#include "amvs/error.hpp"
#include "amvs/io_formats.hpp"

namespace amvs {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_list(std::string_view value) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = value.find(',', start);
    parts.push_back(trim(value.substr(start, comma == std::string_view::npos ? value.npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return parts;
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, const char* expected) {
  fail(ErrorCode::ParseError,
       "setting '" + std::string(key) + "' expects " + expected + ", got '" + std::string(value) + "'");
}

double parse_double(std::string_view key, std::string_view text) {
  double v = 0.0;
  const auto r = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || r.ec != std::errc() || r.ptr != text.data() + text.size() || !std::isfinite(v))
    bad_value(key, text, "a number");
  return v;
}

long long parse_int(std::string_view key, std::string_view text) {
  long long v = 0;
  const auto r = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || r.ec != std::errc() || r.ptr != text.data() + text.size()) bad_value(key, text, "an integer");
  return v;
}

bool parse_bool(std::string_view key, std::string_view text) {
  if (text == "true" || text == "1" || text == "on") return true;
  if (text == "false" || text == "0" || text == "off") return false;
  bad_value(key, text, "true or false");
}

// One value for every stage, or exactly four.
template <typename T, typename Parse>
std::array<T, kStageCount> per_stage(std::string_view key, std::string_view value, Parse parse) {
  const auto parts = split_list(value);
  if (parts.size() != 1 && parts.size() != kStageCount) bad_value(key, value, "one value or four comma-separated values");
  std::array<T, kStageCount> out;
  for (int k = 0; k < kStageCount; ++k) out[k] = parse(parts[parts.size() == 1 ? 0 : k]);
  return out;
}

DepthRange parse_range(std::string_view key, std::string_view value) {
  const auto parts = split_list(value);
  if (parts.size() != 2) bad_value(key, value, "'min,max'");
  return {parse_double(key, parts[0]), parse_double(key, parts[1])};
}

template <typename Format>
std::string join_stages(const std::array<StageConfig, kStageCount>& stages, Format format) {
  std::string out;
  for (int k = 0; k < kStageCount; ++k) {
    if (k) out += ',';
    out += format(stages[k]);
  }
  return out;
}

std::string format_range(const std::optional<DepthRange>& r) {
  return r ? format_number(r->d_min) + ',' + format_number(r->d_max) : "none";
}

RangeSource parse_source(std::string_view key, std::string_view text) {
  if (text == "fixed") return RangeSource::Fixed;
  if (text == "adrp") return RangeSource::Adrp;
  if (text == "adia") return RangeSource::Adia;
  bad_value(key, text, "fixed, adrp or adia");
}

PlaneAdjustment parse_adjustment(std::string_view key, std::string_view text) {
  if (text == "zscore") return PlaneAdjustment::ZScore;
  if (text == "linear") return PlaneAdjustment::Linear;
  if (text == "none") return PlaneAdjustment::None;
  bad_value(key, text, "zscore, linear or none");
}

struct Entry {
  std::string name;
  std::function<void(Settings&, std::string_view)> set;
  std::function<std::string(const Settings&)> get;
};

const std::vector<Entry>& entries() {
  static const std::vector<Entry> table = [] {
    std::vector<Entry> t;
    auto add = [&t](std::string name, auto set, auto get) { t.push_back({std::move(name), set, get}); };
    auto stage_field = [&](std::string name, auto parse, auto assign, auto format) {
      add(name,
          [name, parse, assign](Settings& s, std::string_view v) {
            const auto values = per_stage<decltype(parse(std::string_view{}, std::string_view{}))>(
                name, v, [&](std::string_view p) { return parse(name, p); });
            for (int k = 0; k < kStageCount; ++k) assign(s.pipeline.stages[k], values[k]);
          },
          [format](const Settings& s) { return join_stages(s.pipeline.stages, format); });
    };

    stage_field(
        "planes", [](std::string_view k, std::string_view p) { return static_cast<int>(parse_int(k, p)); },
        [](StageConfig& c, int v) { c.d_num = v; }, [](const StageConfig& c) { return std::to_string(c.d_num); });
    stage_field(
        "range_sources", parse_source, [](StageConfig& c, RangeSource v) { c.range_source = v; },
        [](const StageConfig& c) { return to_string(c.range_source); });
    stage_field(
        "adjustment", parse_adjustment, [](StageConfig& c, PlaneAdjustment v) { c.adjustment = v; },
        [](const StageConfig& c) { return to_string(c.adjustment); });
    stage_field(
        "temperature", parse_double, [](StageConfig& c, double v) { c.temperature = v; },
        [](const StageConfig& c) { return format_number(c.temperature); });
    stage_field(
        "reg_radius", [](std::string_view k, std::string_view p) { return static_cast<int>(parse_int(k, p)); },
        [](StageConfig& c, int v) { c.reg_radius = v; }, [](const StageConfig& c) { return std::to_string(c.reg_radius); });
    stage_field(
        "reg_passes", [](std::string_view k, std::string_view p) { return static_cast<int>(parse_int(k, p)); },
        [](StageConfig& c, int v) { c.reg_passes = v; }, [](const StageConfig& c) { return std::to_string(c.reg_passes); });

    add("stage_ranges",
        [](Settings& s, std::string_view v) {
          const auto values = per_stage<std::optional<DepthRange>>("stage_ranges", v, [](std::string_view p) {
            if (p == "none") return std::optional<DepthRange>();
            const auto colon = p.find(':');
            if (colon == std::string_view::npos) bad_value("stage_ranges", p, "'none' or 'min:max'");
            return std::optional<DepthRange>(DepthRange{parse_double("stage_ranges", trim(p.substr(0, colon))),
                                                        parse_double("stage_ranges", trim(p.substr(colon + 1)))});
          });
          for (int k = 0; k < kStageCount; ++k) s.pipeline.stages[k].fixed_range = values[k];
        },
        [](const Settings& s) {
          return join_stages(s.pipeline.stages, [](const StageConfig& c) {
            return c.fixed_range ? format_number(c.fixed_range->d_min) + ':' + format_number(c.fixed_range->d_max)
                                 : std::string("none");
          });
        });
    add("initial_range",
        [](Settings& s, std::string_view v) {
          s.pipeline.initial_range =
              v == "none" ? std::nullopt : std::optional<DepthRange>(parse_range("initial_range", v));
        },
        [](const Settings& s) { return format_range(s.pipeline.initial_range); });
    add("alpha_dr", [](Settings& s, std::string_view v) { s.pipeline.scalars.alpha_dr = parse_double("alpha_dr", v); },
        [](const Settings& s) { return format_number(s.pipeline.scalars.alpha_dr); });
    add("beta_dr", [](Settings& s, std::string_view v) { s.pipeline.scalars.beta_dr = parse_double("beta_dr", v); },
        [](const Settings& s) { return format_number(s.pipeline.scalars.beta_dr); });
    add("robust_extremes",
        [](Settings& s, std::string_view v) { s.pipeline.adrp.robust_extremes = parse_bool("robust_extremes", v); },
        [](const Settings& s) { return std::string(s.pipeline.adrp.robust_extremes ? "true" : "false"); });
    add("census_window",
        [](Settings& s, std::string_view v) { s.pipeline.census_window = static_cast<int>(parse_int("census_window", v)); },
        [](const Settings& s) { return std::to_string(s.pipeline.census_window); });
    add("max_sources",
        [](Settings& s, std::string_view v) { s.pipeline.max_sources = static_cast<int>(parse_int("max_sources", v)); },
        [](const Settings& s) { return std::to_string(s.pipeline.max_sources); });
    add("hint_planes",
        [](Settings& s, std::string_view v) { s.pipeline.hint_planes = static_cast<int>(parse_int("hint_planes", v)); },
        [](const Settings& s) { return std::to_string(s.pipeline.hint_planes); });
    add("threads", [](Settings& s, std::string_view v) { s.pipeline.threads = static_cast<int>(parse_int("threads", v)); },
        [](const Settings& s) { return std::to_string(s.pipeline.threads); });
    add("seed",
        [](Settings& s, std::string_view v) {
          std::uint64_t seed = 0;
          const auto r = std::from_chars(v.data(), v.data() + v.size(), seed);
          if (v.empty() || r.ec != std::errc() || r.ptr != v.data() + v.size()) bad_value("seed", v, "an unsigned integer");
          s.pipeline.seed = seed;
        },
        [](const Settings& s) { return std::to_string(s.pipeline.seed); });
    add("max_reproj_err",
        [](Settings& s, std::string_view v) { s.pipeline.consistency.max_reproj_err = parse_double("max_reproj_err", v); },
        [](const Settings& s) { return format_number(s.pipeline.consistency.max_reproj_err); });
    add("max_rel_depth_diff",
        [](Settings& s, std::string_view v) {
          s.pipeline.consistency.max_rel_depth_diff = parse_double("max_rel_depth_diff", v);
        },
        [](const Settings& s) { return format_number(s.pipeline.consistency.max_rel_depth_diff); });
    add("min_consistent_views",
        [](Settings& s, std::string_view v) {
          s.pipeline.consistency.min_consistent_views = static_cast<int>(parse_int("min_consistent_views", v));
        },
        [](const Settings& s) { return std::to_string(s.pipeline.consistency.min_consistent_views); });
    add("min_confidence",
        [](Settings& s, std::string_view v) { s.pipeline.consistency.min_confidence = parse_double("min_confidence", v); },
        [](const Settings& s) { return format_number(s.pipeline.consistency.min_confidence); });
    add("merge_radius",
        [](Settings& s, std::string_view v) { s.pipeline.fusion.merge_radius = parse_double("merge_radius", v); },
        [](const Settings& s) { return format_number(s.pipeline.fusion.merge_radius); });
    add("calibration_scenes",
        [](Settings& s, std::string_view v) {
          s.calibration_scenes.clear();
          if (v == "none") return;
          for (std::string_view part : split_list(v)) {
            if (part.empty()) bad_value("calibration_scenes", v, "'none' or comma-separated directories");
            s.calibration_scenes.emplace_back(part);
          }
        },
        [](const Settings& s) {
          std::string out;
          for (const auto& dir : s.calibration_scenes) out += (out.empty() ? "" : ",") + dir;
          return out.empty() ? std::string("none") : out;
        });
    add("pnumd_tol", [](Settings& s, std::string_view v) { s.pnumd_tol = parse_double("pnumd_tol", v); },
        [](const Settings& s) { return format_number(s.pnumd_tol); });
    add("e1_threshold",
        [](Settings& s, std::string_view v) { s.error_thresholds.e1 = parse_double("e1_threshold", v); },
        [](const Settings& s) { return format_number(s.error_thresholds.e1); });
    add("e3_threshold",
        [](Settings& s, std::string_view v) { s.error_thresholds.e3 = parse_double("e3_threshold", v); },
        [](const Settings& s) { return format_number(s.error_thresholds.e3); });
    add("cloud_tau", [](Settings& s, std::string_view v) { s.cloud_tau = parse_double("cloud_tau", v); },
        [](const Settings& s) { return format_number(s.cloud_tau); });
    return t;
  }();
  return table;
}

const Entry& find_entry(std::string_view key) {
  for (const Entry& e : entries())
    if (e.name == key) return e;
  fail(ErrorCode::ParseError, "unknown setting '" + std::string(key) + "'");
}

}  // namespace

const std::vector<std::string>& setting_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const Entry& e : entries()) k.push_back(e.name);
    return k;
  }();
  return keys;
}

void apply_setting(Settings& settings, std::string_view key, std::string_view value) {
  find_entry(trim(key)).set(settings, trim(value));
}

void parse_settings(std::string_view text, Settings& settings) {
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      fail(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": expected 'key = value'");
    try {
      apply_setting(settings, line.substr(0, eq), line.substr(eq + 1));
    } catch (const Error& e) {
      fail(e.code(), "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
}

Settings read_settings(const std::string& path, Settings base) {
  parse_settings(read_file(path), base);
  return base;
}

std::string setting_value(const Settings& settings, std::string_view key) { return find_entry(key).get(settings); }

std::string format_settings(const Settings& settings) {
  std::string out;
  for (const Entry& e : entries()) out += e.name + " = " + e.get(settings) + '\n';
  return out;
}

}  // namespace amvs
