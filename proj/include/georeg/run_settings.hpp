#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "georeg/experiments.hpp"

namespace georeg {

enum class Command { sweep, bias_variance, angles, perturb };

std::string_view to_string(Command c);

/// Everything a CLI invocation resolves to. JSON documents are applied on top
/// of a named preset ("desk" or "paper").
struct RunSettings {
  std::string preset = "desk";
  std::string model;  // identity | linear | relu | custom activation name
  ExperimentConfig base;
  std::optional<double> snr;  // overrides base.sigma_eps when present
  std::optional<double> nf_ratio;
  std::optional<double> np_ratio;  // single-point commands
  std::vector<double> np_grid;
  std::vector<double> nf_grid;
  std::size_t replicas = 100;
  bool normalize = true;
  std::size_t workers = 1;
  std::size_t pairs = 200;
  double eta = 1e-2;
  std::size_t bootstrap = 1000;
};

RunSettings preset_settings(std::string_view name);

/// Preset (key "preset", default "desk") followed by every other key. A run
/// manifest is also accepted; its "resolved_config" member is used.
RunSettings parse_settings(std::string_view json);

/// Fills command-specific defaults and validates. Throws ConfigError.
RunSettings resolve_settings(RunSettings settings, Command command);

std::string settings_json(const RunSettings& settings);

SweepSpec to_sweep_spec(const RunSettings& settings, Command command);
ExperimentConfig point_config(const RunSettings& settings);

}  // namespace georeg
