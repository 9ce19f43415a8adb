#include "xfire/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <set>
#include <stdexcept>

#include <fmt/format.h>

#include "parallel.hpp"
#include "xfire/rng.hpp"
#include "xfire/study.hpp"

namespace xfire {

namespace fs = std::filesystem;

BuiltScenario build_scenario(const ScenarioConfig& c, std::uint64_t seed) {
    if (auto errors = check_config(c); !errors.empty()) throw std::invalid_argument(format_error(errors.front()));
    auto topo = std::make_shared<const Topology>(
        build_topology(c.topology.n_subtrees, c.topology.capacity_bps, c.topology.delay_ms, c.topology.overrides));

    BuiltScenario b;
    TrafficConfig traffic = c.traffic;
    traffic.duration = c.engine.sim_duration;
    b.normal_flows = make_background_suite(*topo, traffic, derive_seed(seed, {100}));
    b.scenario.topology = topo;
    b.scenario.sim_duration = c.engine.sim_duration;
    b.scenario.tick = c.engine.tick;
    b.scenario.poll_interval = c.monitor.poll_interval;
    b.scenario.saturation_threshold = c.engine.saturation_threshold;
    b.scenario.flows = b.normal_flows;
    if (!c.attack.enabled) return b;

    const auto& a = c.attack;
    AttackPlan plan;
    plan.bots = topo->bots();
    const auto decoys = topo->decoys();
    plan.target_links = select_target_links(*topo, plan.bots, decoys, a.n_target_links);
    plan.bs = a.bs;
    plan.dur = a.dur;
    plan.attack_start = a.attack_start;
    plan.decoy_assignment = spread_decoys(plan.bots, decoys, a.spread);
    if (a.rolling_period) {
        plan.rolling_period = a.rolling_period;
        plan.rolling_sets.assign(static_cast<std::size_t>(a.rolling_sets), {});
        const auto branches = topo->links_at_level(1);
        for (std::size_t i = 0; i < branches.size(); ++i)
            plan.rolling_sets[i % plan.rolling_sets.size()].push_back(branches[i]);
    }

    auto& ramp = plan.per_bot_rate;
    ramp.shape = a.ramp_shape;
    ramp.ramp_duration = a.ramp_duration;
    if (a.flow_rate_start && a.flow_rate_end) {
        const double per_bot_decoys = a.spread == DecoySpread::all
                                          ? static_cast<double>(decoys.size())
                                          : static_cast<double>(decoys.size()) / static_cast<double>(plan.bots.size());
        ramp.r_start = *a.flow_rate_start * per_bot_decoys;
        ramp.r_end = *a.flow_rate_end * per_bot_decoys;
    } else {
        const double budget =
            per_bot_budget(*topo, b.normal_flows, plan.target_links.front(), plan.bots.size(), a.overprovision);
        ramp.r_start = a.ramp_start_fraction * budget;
        ramp.r_end = budget;
    }
    b.per_bot_rate = ramp.r_end;

    b.schedule = schedule_bots(plan, *topo, derive_seed(seed, {200}), c.engine.sim_duration);
    b.scenario.flows.insert(b.scenario.flows.end(), b.schedule.flows.begin(), b.schedule.flows.end());
    b.scenario.attack_plan = std::move(plan);
    return b;
}

std::optional<double> ExperimentOutput::value(const std::string& scenario, std::uint64_t seed,
                                              const std::string& metric) const {
    for (const auto& m : measurements)
        if (m.scenario == scenario && m.seed == seed && m.metric == metric) return m.value;
    return std::nullopt;
}

std::vector<double> ExperimentOutput::values(const std::string& scenario, const std::string& metric) const {
    std::vector<double> out;
    for (auto s : seeds)
        if (auto v = value(scenario, s, metric)) out.push_back(*v);
    return out;
}

nlohmann::json ExperimentOutput::summary_json() const {
    nlohmann::json ms = nlohmann::json::array();
    for (const auto& m : measurements) {
        nlohmann::json v = nullptr;
        if (m.value && std::isfinite(*m.value)) v = *m.value;
        ms.push_back({{"scenario", m.scenario}, {"seed", m.seed}, {"metric", m.metric}, {"value", v}});
    }
    return {{"experiment", experiment}, {"seeds", seeds}, {"measurements", std::move(ms)}};
}

const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> names{"sync",      "sync_dur",  "sync_long",       "distribution",
                                                "corr_exp1", "corr_exp2", "no_attack",       "ml_distribution",
                                                "ml_features", "ml_visibility"};
    return names;
}

bool is_experiment(const std::string& name) {
    const auto& n = experiment_names();
    return std::find(n.begin(), n.end(), name) != n.end();
}

namespace {

// Quiet 8-sub-tree network for the correlation detector: independent
// per-decoy generator flows and light host traffic, so decoy edges are
// uncorrelated until the attack arrives.
ScenarioConfig correlation_preset() {
    ScenarioConfig c;
    c.topology.n_subtrees = 8;
    c.traffic.host_scale = 0.02;
    c.traffic.generator_sharing = GeneratorSharing::independent;
    c.traffic.leaf_generator_scale = 0.004;
    c.traffic.injection_generator_scale = 0.0;
    c.attack.bs = 150.0;
    c.attack.dur = 900.0;
    c.attack.ramp_shape = RampProfile::Shape::linear;
    c.attack.ramp_duration = 150.0;
    c.attack.flow_rate_start = 300.0;
    c.attack.flow_rate_end = 600.0;
    return c;
}

// Quiet hosts, no injection noise, and leaf generators that mix a small
// network-wide demand swing with per-decoy noise: summing edges averages out
// the per-decoy part, so more edges help until the common swing dominates.
ScenarioConfig ml_preset() {
    ScenarioConfig c;
    c.traffic.host_scale = 0.03;
    c.traffic.leaf_generator_scale = 0.35;
    c.traffic.injection_generator_scale = 0.0;
    c.traffic.generator_sharing = GeneratorSharing::network;
    c.traffic.generator_shared_fraction = 0.15;
    c.attack.bs = 0.0;
    c.attack.dur = 600.0;
    c.attack.ramp_shape = RampProfile::Shape::none;
    return c;
}

struct SeedResult {
    std::vector<Measurement> measurements;
};

fs::path seed_dir(const fs::path& out, const std::string& scenario, std::uint64_t seed) {
    auto dir = out / scenario / fmt::format("seed_{}", seed);
    fs::create_directories(dir);
    return dir;
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error(fmt::format("cannot write {}", path.string()));
    f << text;
}

template <typename Writer>
void write_with(const fs::path& path, Writer w) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error(fmt::format("cannot write {}", path.string()));
    w(f);
}

void write_run_files(const fs::path& dir, const BuiltScenario& b, const LinkSampleSeries& series) {
    write_with(dir / "links.csv", [&](std::ostream& o) { series.write_csv(o); });
    write_file(dir / "schedule.json", b.schedule.to_json(*b.scenario.topology).dump(2) + "\n");
}

std::optional<double> opt(const std::optional<WarmupWindow>& w, double WarmupWindow::*field) {
    if (!w) return std::nullopt;
    return (*w).*field;
}

// Runs `fn(seed_index)` for each seed and concatenates the measurements in
// seed order.
template <typename Fn>
std::vector<Measurement> over_seeds(const std::vector<std::uint64_t>& seeds, Fn fn) {
    auto parts = detail::parallel_map(seeds.size(), fn);
    std::vector<Measurement> out;
    for (auto& p : parts) out.insert(out.end(), p.begin(), p.end());
    return out;
}

std::vector<Measurement> sync_run(const ScenarioConfig& c, const std::string& scenario, std::uint64_t seed,
                                  const std::optional<fs::path>& out) {
    const auto b = build_scenario(c, seed);
    const auto series = run(b.scenario);
    if (out) write_run_files(seed_dir(*out, scenario, seed), b, series);
    const LinkId target = b.scenario.attack_plan->target_links.front();
    const auto warm = series.warmup();
    const std::size_t first_poll = series.poll_index(c.attack.attack_start + c.monitor.poll_interval);
    double max_util = 0.0;
    for (std::size_t p = 0; p < series.poll_count(); ++p) max_util = std::max(max_util, series.at(p, target).utilization);
    std::optional<double> length;
    if (warm) length = warm->length();
    return {
        {scenario, seed, "warmup_length", length},
        {scenario, seed, "t_first_bot", opt(warm, &WarmupWindow::t_first_bot)},
        {scenario, seed, "t_link_down", opt(warm, &WarmupWindow::t_link_down)},
        {scenario, seed, "saturated", warm ? 1.0 : 0.0},
        {scenario, seed, "first_poll_utilization", series.at(first_poll, target).utilization},
        {scenario, seed, "max_utilization", max_util},
    };
}

std::string value_label(const std::string& prefix, double v) { return fmt::format("{}_{}", prefix, v); }

std::vector<Measurement> run_sync(const ScenarioConfig& c, const std::vector<std::uint64_t>& seeds,
                                  const std::optional<fs::path>& out) {
    std::vector<Measurement> all;
    for (double bs : c.attack.bs_values) {
        ScenarioConfig cc = c;
        cc.attack.bs = bs;
        auto part = over_seeds(seeds, [&](std::size_t i) { return sync_run(cc, value_label("bs", bs), seeds[i], out); });
        all.insert(all.end(), part.begin(), part.end());
    }
    return all;
}

std::vector<Measurement> run_sync_dur(const ScenarioConfig& c, const std::vector<std::uint64_t>& seeds,
                                      const std::optional<fs::path>& out) {
    std::vector<Measurement> all;
    std::vector<double> durs = c.attack.dur_values;
    if (durs.empty()) {
        // Reference runs with flows that outlive the horizon measure the
        // warm-up, then Dur is bracketed at half and 1.5x its mean.
        ScenarioConfig ref = c;
        ref.attack.dur = c.engine.sim_duration;
        auto part = over_seeds(seeds, [&](std::size_t i) { return sync_run(ref, "reference", seeds[i], out); });
        all.insert(all.end(), part.begin(), part.end());
        std::vector<double> w;
        for (const auto& m : part)
            if (m.metric == "warmup_length" && m.value) w.push_back(*m.value);
        if (w.empty()) throw std::runtime_error("reference attack never saturated the target link");
        const double mean = std::accumulate(w.begin(), w.end(), 0.0) / static_cast<double>(w.size());
        const double poll = c.monitor.poll_interval;
        durs = {std::max(poll, std::floor(0.5 * mean / poll) * poll), std::ceil(1.5 * mean / poll) * poll};
        for (auto s : seeds) all.push_back({"reference", s, "mean_warmup_length", mean});
    }
    for (double dur : durs) {
        ScenarioConfig cc = c;
        cc.attack.dur = dur;
        auto part =
            over_seeds(seeds, [&](std::size_t i) { return sync_run(cc, value_label("dur", dur), seeds[i], out); });
        for (auto s : seeds) part.push_back({value_label("dur", dur), s, "dur", dur});
        all.insert(all.end(), part.begin(), part.end());
    }
    return all;
}

std::vector<Measurement> run_distribution(const ScenarioConfig& c, const std::vector<std::uint64_t>& seeds,
                                          const std::optional<fs::path>& out) {
    std::vector<Measurement> all;
    for (int n : c.detect.ml.topologies) {
        ScenarioConfig cc = c;
        cc.topology.n_subtrees = n;
        const auto scenario = fmt::format("{}ST", n);
        auto part = over_seeds(seeds, [&](std::size_t i) {
            const auto seed = seeds[i];
            const auto b = build_scenario(cc, seed);
            const auto series = run(b.scenario);
            if (out) write_run_files(seed_dir(*out, scenario, seed), b, series);
            const auto& a = cc.attack;
            const double settle = a.bs + (a.ramp_shape == RampProfile::Shape::linear ? a.ramp_duration : 0.0);
            const JumpWindow w{a.attack_start - 150.0, a.attack_start, a.attack_start + settle,
                               a.attack_start + a.dur};
            auto mean_jump = [&](const std::vector<LinkId>& links) {
                double s = 0.0;
                for (auto l : links) s += downstream_jump(series, l, w);
                return s / static_cast<double>(links.size());
            };
            const auto& topo = *b.scenario.topology;
            return std::vector<Measurement>{
                {scenario, seed, "edge_jump", mean_jump(topo.links_at_level(2))},
                {scenario, seed, "level1_jump", mean_jump(topo.links_at_level(1))},
                {scenario, seed, "target_jump", mean_jump({topo.target_link()})},
                {scenario, seed, "saturated", series.warmup() ? 1.0 : 0.0},
            };
        });
        all.insert(all.end(), part.begin(), part.end());
    }
    return all;
}

std::vector<Measurement> run_correlation(const ScenarioConfig& c, const std::string& scenario,
                                         const std::vector<std::uint64_t>& seeds, const std::optional<fs::path>& out) {
    return over_seeds(seeds, [&](std::size_t i) {
        const auto seed = seeds[i];
        const auto b = build_scenario(c, seed);
        const auto series = run(b.scenario);
        const auto& topo = *b.scenario.topology;
        std::vector<std::vector<double>> volumes;
        for (auto l : topo.links_at_level(c.monitor.level)) volumes.push_back(series.volume_bits(l));
        const auto trace = sliding_mean_corr(volumes, series.times(), c.detect.window);
        if (out) {
            const auto dir = seed_dir(*out, scenario, seed);
            write_run_files(dir, b, series);
            write_with(dir / "corr.csv", [&](std::ostream& o) { trace.write_csv(o); });
        }
        const auto alarm_at = alarm(trace, c.detect.alarm);
        std::vector<Measurement> m{
            {scenario, seed, "pair_count", static_cast<double>(trace.pair_count)},
            {scenario, seed, "alarm_time", alarm_at},
        };
        double max_abs = 0.0;
        for (double r : trace.mean_r)
            if (!std::isnan(r)) max_abs = std::max(max_abs, std::abs(r));
        m.push_back({scenario, seed, "max_abs_mean_r", max_abs});
        if (!b.scenario.attack_plan) return m;

        const auto wc = warmup_correlation(trace, series, topo.target_link());
        std::optional<double> first, final, dips, max_dip, onset;
        if (wc) {
            first = wc->first;
            final = wc->final;
            dips = wc->dips;
            max_dip = wc->max_dip;
            onset = wc->onset;
        }
        const auto warm = series.warmup();
        std::optional<double> in_warmup;
        if (alarm_at && onset) in_warmup = (*alarm_at >= *onset && (!warm || *alarm_at < warm->t_link_down)) ? 1.0 : 0.0;
        m.insert(m.end(), {
                              {scenario, seed, "onset", onset},
                              {scenario, seed, "mean_r_first", first},
                              {scenario, seed, "mean_r_final", final},
                              {scenario, seed, "dips", dips},
                              {scenario, seed, "max_dip", max_dip},
                              {scenario, seed, "t_link_down", opt(warm, &WarmupWindow::t_link_down)},
                              {scenario, seed, "alarm_in_warmup", in_warmup},
                          });
        // Per-window trace so seeds can be averaged window by window.
        if (wc)
            for (std::size_t w = 0; w < wc->mean_r.size(); ++w)
                m.push_back({scenario, seed, fmt::format("warmup_r_{:02}", w), wc->mean_r[w]});
        return m;
    });
}

std::vector<Measurement> run_ml(StudyKind kind, const ScenarioConfig& c, const std::vector<std::uint64_t>& seeds,
                                const std::optional<fs::path>& out) {
    const auto rep = run_study(kind, c, seeds);
    if (out) {
        fs::create_directories(*out);
        write_with(*out / fmt::format("study_{}.csv", to_string(kind)), [&](std::ostream& o) { rep.write_csv(o); });
    }
    std::vector<Measurement> m;
    for (const auto& r : rep.rows) m.push_back({r.config, r.seed, "auc", r.auc});
    return m;
}

} // namespace

std::optional<WarmupCorrelation> warmup_correlation(const CorrelationTrace& trace, const LinkSampleSeries& series,
                                                    LinkId target) {
    std::optional<std::size_t> onset;
    for (std::size_t p = 0; p < series.poll_count(); ++p)
        if (series.at(p, target).attack_bps > 0.0) {
            onset = p;
            break;
        }
    // Trace entry w covers polls [w, w + window).
    if (!onset || *onset + 1 < trace.window) return std::nullopt;
    std::size_t last = *onset + trace.window - 1;
    if (const auto& warm = series.warmup()) last = std::min(last, series.poll_index(warm->t_link_down));
    last = std::min(last, series.poll_count() - 1);

    WarmupCorrelation wc;
    wc.onset = series.times()[*onset];
    for (std::size_t end = *onset; end <= last; ++end) wc.mean_r.push_back(trace.mean_r[end + 1 - trace.window]);
    wc.first = wc.mean_r.front();
    wc.final = wc.mean_r.back();
    for (std::size_t i = 1; i < wc.mean_r.size(); ++i) {
        const double drop = wc.mean_r[i - 1] - wc.mean_r[i];
        if (drop > 0.0) {
            ++wc.dips;
            wc.max_dip = std::max(wc.max_dip, drop);
        }
    }
    return wc;
}

ScenarioConfig experiment_preset(const std::string& name) {
    ScenarioConfig c;
    if (name == "sync" || name == "sync_dur" || name == "sync_long") {
        c.attack.ramp_shape = RampProfile::Shape::linear;
        c.attack.ramp_duration = 60.0;
        c.attack.dur = 600.0;
        if (name == "sync_dur") c.attack.bs = 300.0;
        // Attack 30 minutes in, one hour horizon.
        if (name == "sync_long") {
            c.attack.attack_start = 1800.0;
            c.engine.sim_duration = 3600.0;
        }
    } else if (name == "distribution") {
        c.attack.bs = 0.0;
        c.attack.ramp_shape = RampProfile::Shape::none;
    } else if (name == "corr_exp1" || name == "corr_exp2" || name == "no_attack") {
        c = correlation_preset();
        if (name == "corr_exp2") {
            c.attack.flow_rate_start = 60.0;
            c.attack.flow_rate_end = 150.0;
        }
        if (name == "no_attack") c.attack.enabled = false;
    } else if (name == "ml_distribution" || name == "ml_features" || name == "ml_visibility") {
        c = ml_preset();
        if (name == "ml_visibility") c.topology.n_subtrees = 8;
    } else {
        throw std::invalid_argument(fmt::format("unknown experiment '{}'", name));
    }
    return c;
}

ExperimentOutput run_experiment(const std::string& name, const ScenarioConfig& config,
                                const std::vector<std::uint64_t>& seeds, const std::optional<fs::path>& out_dir) {
    if (!is_experiment(name)) throw std::invalid_argument(fmt::format("unknown experiment '{}'", name));
    if (seeds.empty()) throw std::invalid_argument("no seeds given");
    if (auto errors = check_config(config); !errors.empty()) throw std::invalid_argument(format_error(errors.front()));
    ExperimentOutput r;
    r.experiment = name;
    r.seeds = seeds;
    if (name == "sync" || name == "sync_long") r.measurements = run_sync(config, seeds, out_dir);
    else if (name == "sync_dur") r.measurements = run_sync_dur(config, seeds, out_dir);
    else if (name == "distribution") r.measurements = run_distribution(config, seeds, out_dir);
    else if (name == "corr_exp1" || name == "corr_exp2") r.measurements = run_correlation(config, name, seeds, out_dir);
    else if (name == "no_attack") {
        ScenarioConfig c = config;
        c.attack.enabled = false;
        r.measurements = run_correlation(c, name, seeds, out_dir);
    }
    else if (name == "ml_distribution") r.measurements = run_ml(StudyKind::distribution, config, seeds, out_dir);
    else if (name == "ml_features") r.measurements = run_ml(StudyKind::feature_count, config, seeds, out_dir);
    else r.measurements = run_ml(StudyKind::visibility, config, seeds, out_dir);

    if (out_dir) {
        fs::create_directories(*out_dir);
        write_file(*out_dir / "summary.json", r.summary_json().dump(2) + "\n");
    }
    return r;
}

} // namespace xfire
