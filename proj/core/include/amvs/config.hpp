#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "amvs/metrics.hpp"
#include "amvs/pipeline.hpp"

namespace amvs {

// Pipeline settings plus the evaluation knobs used by `eval` and `ablate`.
struct Settings {
  PipelineConfig pipeline;
  double pnumd_tol = kDefaultPnumdTolerance;
  DepthErrorThresholds error_thresholds;
  double cloud_tau = 10.0;
  // Scene directories whose stage-1 output fits alpha_dr and beta_dr before
  // reconstruction; empty keeps the configured scalars.
  std::vector<std::string> calibration_scenes;
};

// Keys accepted by `key = value` config files, in the order they are written.
const std::vector<std::string>& setting_keys();

// Applies one key/value pair. Unknown keys and malformed values raise
// ParseError; values that parse but break an invariant surface later from
// validate().
void apply_setting(Settings& settings, std::string_view key, std::string_view value);

// Parses `key = value` lines on top of `settings`. Blank lines and text after
// '#' are ignored.
void parse_settings(std::string_view text, Settings& settings);
Settings read_settings(const std::string& path, Settings base = {});

std::string setting_value(const Settings& settings, std::string_view key);
std::string format_settings(const Settings& settings);

}  // namespace amvs
