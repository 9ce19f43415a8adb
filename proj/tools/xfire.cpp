// Command-line front end: run named experiments, validate configs.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ranges.h>

#include "xfire/config.hpp"
#include "xfire/experiment.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kRuntimeError = 2;

std::optional<std::string> slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) return std::nullopt;
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

// Parse "1,2,5-8" into seeds.
std::optional<std::vector<std::uint64_t>> parse_seeds(const std::string& text) {
    std::vector<std::uint64_t> out;
    std::stringstream ss(text);
    std::string part;
    try {
        while (std::getline(ss, part, ',')) {
            if (part.empty()) return std::nullopt;
            const auto dash = part.find('-');
            if (dash == std::string::npos) {
                out.push_back(std::stoull(part));
            } else {
                const auto lo = std::stoull(part.substr(0, dash));
                const auto hi = std::stoull(part.substr(dash + 1));
                if (hi < lo) return std::nullopt;
                for (auto s = lo; s <= hi; ++s) out.push_back(s);
            }
        }
    } catch (const std::exception&) {
        return std::nullopt;
    }
    if (out.empty()) return std::nullopt;
    return out;
}

std::optional<xfire::ScenarioConfig> load(const std::string& path, const xfire::ScenarioConfig& base) {
    std::string text;
    if (!path.empty()) {
        auto t = slurp(path);
        if (!t) {
            std::cerr << fmt::format("error: cannot read config file {}\n", path);
            return std::nullopt;
        }
        text = *t;
    }
    auto result = xfire::validate_config(text, base);
    for (const auto& e : result.errors) std::cerr << fmt::format("{}: {}\n", path.empty() ? "<defaults>" : path, xfire::format_error(e));
    return result.config;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Link-flooding attack simulator and detection workbench"};
    app.require_subcommand(1);

    std::string experiment, config_path, seeds_text, out_dir;
    auto* run = app.add_subcommand("run", "Run a named experiment");
    run->add_option("experiment", experiment, "Experiment name (see list-experiments)")->required();
    run->add_option("--config", config_path, "YAML config layered over the experiment preset");
    run->add_option("--seeds", seeds_text, "Seed list, e.g. 1,2,3 or 1-10 (default: config seeds)");
    run->add_option("--out", out_dir, "Output directory (default: config output_dir)");

    std::string validate_path;
    bool print_config = false;
    auto* validate = app.add_subcommand("validate", "Check a config file and report every violation");
    validate->add_option("--config", validate_path, "YAML config file")->required();
    validate->add_option("--experiment", experiment, "Validate over this experiment's preset");
    validate->add_flag("--print", print_config, "Print the fully-defaulted config");

    auto* list = app.add_subcommand("list-experiments", "List experiment names");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kConfigError;
    }

    if (list->parsed()) {
        for (const auto& n : xfire::experiment_names()) std::cout << n << '\n';
        return kOk;
    }

    if (!experiment.empty() && !xfire::is_experiment(experiment)) {
        std::cerr << fmt::format("error: unknown experiment '{}' (known: {})\n", experiment,
                                 fmt::join(xfire::experiment_names(), ", "));
        return kConfigError;
    }
    const auto base = experiment.empty() ? xfire::ScenarioConfig{} : xfire::experiment_preset(experiment);

    if (validate->parsed()) {
        auto cfg = load(validate_path, base);
        if (!cfg) return kConfigError;
        if (print_config) std::cout << xfire::to_yaml(*cfg);
        else std::cout << "ok\n";
        return kOk;
    }

    auto cfg = load(config_path, base);
    if (!cfg) return kConfigError;
    auto seeds = cfg->seeds;
    if (!seeds_text.empty()) {
        auto parsed = parse_seeds(seeds_text);
        if (!parsed) {
            std::cerr << fmt::format("error: invalid --seeds '{}'\n", seeds_text);
            return kConfigError;
        }
        seeds = *parsed;
    }
    const std::filesystem::path out = out_dir.empty() ? cfg->output_dir : out_dir;
    try {
        const auto result = xfire::run_experiment(experiment, *cfg, seeds, out);
        std::filesystem::create_directories(out);
        std::ofstream(out / "config.yaml", std::ios::binary) << xfire::to_yaml(*cfg);
        std::cout << fmt::format("{}: {} measurements over {} seeds written to {}\n", experiment,
                                 result.measurements.size(), seeds.size(), out.string());
    } catch (const std::exception& e) {
        std::cerr << fmt::format("error: {}\n", e.what());
        return kRuntimeError;
    }
    return kOk;
}
