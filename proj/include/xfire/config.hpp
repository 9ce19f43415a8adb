#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "xfire/attack.hpp"
#include "xfire/detect_corr.hpp"
#include "xfire/forest.hpp"
#include "xfire/topology.hpp"
#include "xfire/traffic.hpp"

namespace xfire {

struct TopologyConfig {
    int n_subtrees = 4;
    double capacity_bps = 2e6;
    double delay_ms = 10.0;
    std::vector<LinkOverride> overrides;
};

struct AttackConfig {
    bool enabled = true;
    double bs = 0.0;
    std::vector<double> bs_values{0, 60, 120, 180, 300}; // sync sweep
    double dur = 300.0;
    std::vector<double> dur_values; // sync_dur; empty = bracket the measured warm-up
    double attack_start = 300.0;
    RampProfile::Shape ramp_shape = RampProfile::Shape::none;
    double ramp_duration = 60.0;
    double ramp_start_fraction = 0.0; // of the budgeted rate
    // Explicit per bot->decoy flow rates; replaces the headroom budget.
    std::optional<double> flow_rate_start;
    std::optional<double> flow_rate_end;
    double overprovision = 1.2;
    DecoySpread spread = DecoySpread::all;
    int n_target_links = 1;
    std::optional<double> rolling_period;
    int rolling_sets = 0; // level-1 links dealt round-robin into this many sets
};

struct MonitorConfig {
    double poll_interval = 5.0;
    int level = 2; // links feeding the correlation detector
};

struct MlConfig {
    double svm_regularization = 1.0;
    int svm_epochs = 200;
    ForestParams forest;
    WarmupLabel warmup = WarmupLabel::attack;
    int train_runs = 2;
    int test_runs = 2;
    std::vector<int> topologies{2, 4, 8};
    std::vector<int> feature_sizes{5, 10, 20, 30, 40};
    int edge_subset = 20;
};

struct DetectConfig {
    std::size_t window = 30;
    AlarmPolicy alarm;
    MlConfig ml;
};

struct EngineConfig {
    double sim_duration = 1800.0;
    double tick = 1.0;
    double saturation_threshold = 0.999;
};

struct ScenarioConfig {
    TopologyConfig topology;
    TrafficConfig traffic;
    AttackConfig attack;
    MonitorConfig monitor;
    DetectConfig detect;
    EngineConfig engine;
    std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    std::string output_dir = "out";
};

struct ConfigError {
    std::string path; // dotted, e.g. attack.bs
    int line = 0;     // 1-based; 0 when unknown
    std::string message;
};

struct ConfigResult {
    std::optional<ScenarioConfig> config;
    std::vector<ConfigError> errors;
};

/// Parse YAML text over `base` (fields absent from the text keep their base
/// value) and check every constraint. All violations are reported, not just
/// the first; `config` is set only when there are none.
ConfigResult validate_config(const std::string& text, const ScenarioConfig& base = {});

/// Constraint checks alone, for configs assembled in code.
std::vector<ConfigError> check_config(const ScenarioConfig& config);

/// Full YAML rendering; parsing it back yields an equal config.
std::string to_yaml(const ScenarioConfig& config);

std::string format_error(const ConfigError& e);

} // namespace xfire
