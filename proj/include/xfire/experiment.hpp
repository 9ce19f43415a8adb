#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "xfire/attack.hpp"
#include "xfire/config.hpp"
#include "xfire/detect_corr.hpp"
#include "xfire/engine.hpp"

namespace xfire {

/// Everything needed to run one seeded scenario, plus the pieces that went
/// into it (kept for schedule.json and for tests).
struct BuiltScenario {
    Scenario scenario;
    std::vector<FlowSpec> normal_flows;
    BotSchedule schedule;
    double per_bot_rate = 0.0; // end rate, bits/s summed over a bot's decoys
};

BuiltScenario build_scenario(const ScenarioConfig& config, std::uint64_t seed);

struct Measurement {
    std::string scenario;
    std::uint64_t seed = 0;
    std::string metric;
    std::optional<double> value; // null when undefined (e.g. no saturation)
};

struct ExperimentOutput {
    std::string experiment;
    std::vector<std::uint64_t> seeds;
    std::vector<Measurement> measurements;

    std::optional<double> value(const std::string& scenario, std::uint64_t seed, const std::string& metric) const;
    /// Defined values of a metric across seeds, in seed order.
    std::vector<double> values(const std::string& scenario, const std::string& metric) const;
    nlohmann::json summary_json() const;
};

const std::vector<std::string>& experiment_names();
bool is_experiment(const std::string& name);

/// Defaults for an experiment; user config is layered on top of this.
ScenarioConfig experiment_preset(const std::string& name);

/// Run a named experiment over `seeds`. When `out_dir` is given, per-seed
/// files go to <out>/<scenario>/seed_<n>/ and merged files (summary.json,
/// study_*.csv) to <out>/. Throws std::invalid_argument for an unknown name.
ExperimentOutput run_experiment(const std::string& name, const ScenarioConfig& config,
                                const std::vector<std::uint64_t>& seeds,
                                const std::optional<std::filesystem::path>& out_dir = std::nullopt);

/// Correlation statistics over the warm-up windows: the windows ending at
/// the first poll carrying attack load on the target, then each following
/// poll up to one full window later (or saturation, if earlier).
struct WarmupCorrelation {
    double onset = 0.0;
    std::vector<double> mean_r;
    double first = 0.0;
    double final = 0.0;
    int dips = 0;
    double max_dip = 0.0;
};

std::optional<WarmupCorrelation> warmup_correlation(const CorrelationTrace& trace, const LinkSampleSeries& series,
                                                    LinkId target);

} // namespace xfire
