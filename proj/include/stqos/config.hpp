#pragma once

// Declarative scenario description in a flat "dotted.key = value" text format.
//
//   # comment
//   seed = 7
//   traffic.process = periodic
//   traffic.period_cu = 20000
//
// Unknown keys, duplicate keys and malformed values are rejected with the
// offending line. Every key has a documented default; render() echoes the
// fully resolved configuration in canonical order.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "stqos/sim.hpp"

namespace stqos::config {

struct MetricSettings {
  std::int64_t aoi_threshold_cu = 30000;
  std::int64_t delay_threshold_cu = 10000;
  double fit_prob_lo = 1e-4;
  double fit_prob_hi = 1e-1;
  int fit_grid_points = 200;
  double mellin_s = 2.0;
};

struct ScenarioConfig {
  sim::Scenario scenario = default_scenario();
  MetricSettings metrics{};
  // Set when coding.blocklength was given explicitly; sweeps then hold n fixed.
  bool blocklength_pinned = false;
  std::vector<std::string> warnings;

  static sim::Scenario default_scenario();
};

struct KeyInfo {
  std::string name;
  std::string description;
};

// All accepted keys in canonical order.
const std::vector<KeyInfo>& keys();

// Assigns one key from its text value. Throws ConfigError for an unknown key
// or a malformed value; does not run cross-field validation.
void set_value(ScenarioConfig& cfg, std::string_view key, std::string_view value);
std::string get_value(const ScenarioConfig& cfg, std::string_view key);

// Recomputes derived fields, checks every invariant and refreshes warnings.
// Throws ConfigError naming the violated invariant.
void validate(ScenarioConfig& cfg);

ScenarioConfig parse(std::string_view text, std::string_view source = "<config>");
ScenarioConfig load(const std::filesystem::path& path);

std::string render(const ScenarioConfig& cfg);

}  // namespace stqos::config
