#include "xfire/config.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ranges.h>
#include <json.hpp>
#include <yaml-cpp/yaml.h>

namespace xfire {

namespace {

int line_of(const YAML::Node& n) { return n.Mark().line >= 0 ? n.Mark().line + 1 : 0; }

class Reader {
public:
    explicit Reader(std::vector<ConfigError>& errors) : errors_(errors) {}

    void error(const std::string& path, const YAML::Node& at, std::string msg) {
        errors_.push_back({path, at ? line_of(at) : 0, std::move(msg)});
    }

    // Visit a mapping section, flagging keys outside `known`.
    bool section(const YAML::Node& node, const std::string& path, const std::set<std::string>& known) {
        if (!node || node.IsNull()) return false;
        if (!node.IsMap()) {
            error(path, node, "expected a mapping");
            return false;
        }
        for (const auto& kv : node) {
            const auto key = kv.first.as<std::string>();
            if (!known.count(key)) error(join(path, key), kv.first, "unknown field");
        }
        return true;
    }

    template <typename T>
    void scalar(const YAML::Node& parent, const std::string& path, const std::string& key, T& out) {
        const auto n = parent[key];
        if (!n) return;
        try {
            out = n.as<T>();
        } catch (const YAML::Exception&) {
            error(join(path, key), n, fmt::format("expected {}", type_name<T>()));
        }
    }

    template <typename T>
    void optional(const YAML::Node& parent, const std::string& path, const std::string& key, std::optional<T>& out) {
        const auto n = parent[key];
        if (!n) return;
        if (n.IsNull()) {
            out.reset();
            return;
        }
        T v{};
        scalar(parent, path, key, v);
        out = v;
    }

    template <typename T>
    void list(const YAML::Node& parent, const std::string& path, const std::string& key, std::vector<T>& out) {
        const auto n = parent[key];
        if (!n) return;
        if (!n.IsSequence()) {
            error(join(path, key), n, "expected a list");
            return;
        }
        std::vector<T> v;
        for (std::size_t i = 0; i < n.size(); ++i) {
            try {
                v.push_back(n[i].as<T>());
            } catch (const YAML::Exception&) {
                error(fmt::format("{}[{}]", join(path, key), i), n[i], fmt::format("expected {}", type_name<T>()));
            }
        }
        out = std::move(v);
    }

    template <typename E>
    void choice(const YAML::Node& parent, const std::string& path, const std::string& key, E& out,
                const std::vector<std::pair<std::string, E>>& options) {
        const auto n = parent[key];
        if (!n) return;
        std::string s;
        try {
            s = n.as<std::string>();
        } catch (const YAML::Exception&) {
        }
        std::vector<std::string> names;
        for (const auto& [name, value] : options) {
            names.push_back(name);
            if (name == s) {
                out = value;
                return;
            }
        }
        error(join(path, key), n, fmt::format("expected one of {}", fmt::join(names, ", ")));
    }

    static std::string join(const std::string& path, const std::string& key) {
        return path.empty() ? key : path + "." + key;
    }

private:
    template <typename T>
    static const char* type_name() {
        if constexpr (std::is_same_v<T, bool>) return "a boolean";
        else if constexpr (std::is_integral_v<T>) return "an integer";
        else if constexpr (std::is_floating_point_v<T>) return "a number";
        else return "a string";
    }

    std::vector<ConfigError>& errors_;
};

const std::vector<std::pair<std::string, RampProfile::Shape>> kShapes{{"none", RampProfile::Shape::none},
                                                                      {"linear", RampProfile::Shape::linear}};
const std::vector<std::pair<std::string, DecoySpread>> kSpreads{{"all", DecoySpread::all},
                                                                {"partition", DecoySpread::partition}};
const std::vector<std::pair<std::string, GeneratorSharing>> kSharing{
    {"independent", GeneratorSharing::independent},
    {"generator", GeneratorSharing::generator},
    {"network", GeneratorSharing::network}};
const std::vector<std::pair<std::string, WarmupLabel>> kWarmup{{"attack", WarmupLabel::attack},
                                                               {"exclude", WarmupLabel::exclude}};

std::vector<std::pair<std::string, ModelKind>> model_options() {
    std::vector<std::pair<std::string, ModelKind>> out;
    for (auto k : {ModelKind::telnet, ModelKind::dns, ModelKind::csa, ModelKind::voip, ModelKind::quake3,
                   ModelKind::bot, ModelKind::background1, ModelKind::background2})
        out.emplace_back(to_string(k), k);
    return out;
}

void parse(const YAML::Node& root, ScenarioConfig& c, Reader& r) {
    if (!r.section(root, "", {"topology", "traffic", "attack", "monitor", "detect", "engine", "seeds", "output_dir"}))
        return;

    if (auto n = root["topology"]; r.section(n, "topology", {"n_subtrees", "capacity_bps", "delay_ms", "overrides"})) {
        auto& t = c.topology;
        r.scalar(n, "topology", "n_subtrees", t.n_subtrees);
        r.scalar(n, "topology", "capacity_bps", t.capacity_bps);
        r.scalar(n, "topology", "delay_ms", t.delay_ms);
        if (auto o = n["overrides"]) {
            if (!o.IsSequence()) {
                r.error("topology.overrides", o, "expected a list");
            } else {
                t.overrides.clear();
                for (std::size_t i = 0; i < o.size(); ++i) {
                    const auto path = fmt::format("topology.overrides[{}]", i);
                    if (!r.section(o[i], path, {"link", "capacity_bps", "delay_ms"})) continue;
                    LinkOverride lo{LinkId{-1}, t.capacity_bps, t.delay_ms};
                    r.scalar(o[i], path, "link", lo.link.value);
                    r.scalar(o[i], path, "capacity_bps", lo.capacity_bps);
                    r.scalar(o[i], path, "delay_ms", lo.delay_ms);
                    t.overrides.push_back(lo);
                }
            }
        }
    }

    if (auto n = root["traffic"];
        r.section(n, "traffic", {"host_background", "host_models", "host_scale", "generator_model",
                                 "leaf_generator_scale", "injection_generator_scale", "generator_sharing",
                                 "generator_shared_fraction"})) {
        auto& t = c.traffic;
        r.scalar(n, "traffic", "host_background", t.host_background);
        if (auto m = n["host_models"]) {
            if (!m.IsSequence()) {
                r.error("traffic.host_models", m, "expected a list");
            } else {
                t.host_models.clear();
                for (std::size_t i = 0; i < m.size(); ++i) {
                    YAML::Node holder;
                    holder["k"] = m[i];
                    ModelKind k = ModelKind::telnet;
                    r.choice(holder, fmt::format("traffic.host_models[{}]", i), "k", k, model_options());
                    t.host_models.push_back(k);
                }
            }
        }
        r.scalar(n, "traffic", "host_scale", t.host_scale);
        r.choice(n, "traffic", "generator_model", t.generator_model, model_options());
        r.scalar(n, "traffic", "leaf_generator_scale", t.leaf_generator_scale);
        r.scalar(n, "traffic", "injection_generator_scale", t.injection_generator_scale);
        r.choice(n, "traffic", "generator_sharing", t.generator_sharing, kSharing);
        r.scalar(n, "traffic", "generator_shared_fraction", t.generator_shared_fraction);
    }

    if (auto n = root["attack"];
        r.section(n, "attack", {"enabled", "bs", "bs_values", "dur", "dur_values", "attack_start", "ramp",
                                "flow_rate", "overprovision", "spread", "n_target_links", "rolling"})) {
        auto& a = c.attack;
        r.scalar(n, "attack", "enabled", a.enabled);
        r.scalar(n, "attack", "bs", a.bs);
        r.list(n, "attack", "bs_values", a.bs_values);
        r.scalar(n, "attack", "dur", a.dur);
        r.list(n, "attack", "dur_values", a.dur_values);
        r.scalar(n, "attack", "attack_start", a.attack_start);
        if (auto m = n["ramp"]; r.section(m, "attack.ramp", {"shape", "duration", "start_fraction"})) {
            r.choice(m, "attack.ramp", "shape", a.ramp_shape, kShapes);
            r.scalar(m, "attack.ramp", "duration", a.ramp_duration);
            r.scalar(m, "attack.ramp", "start_fraction", a.ramp_start_fraction);
        }
        if (auto m = n["flow_rate"]; m && m.IsNull()) {
            a.flow_rate_start.reset();
            a.flow_rate_end.reset();
        } else if (r.section(m, "attack.flow_rate", {"start", "end"})) {
            r.optional(m, "attack.flow_rate", "start", a.flow_rate_start);
            r.optional(m, "attack.flow_rate", "end", a.flow_rate_end);
        }
        r.scalar(n, "attack", "overprovision", a.overprovision);
        r.choice(n, "attack", "spread", a.spread, kSpreads);
        r.scalar(n, "attack", "n_target_links", a.n_target_links);
        if (auto m = n["rolling"]; r.section(m, "attack.rolling", {"period", "sets"})) {
            r.optional(m, "attack.rolling", "period", a.rolling_period);
            r.scalar(m, "attack.rolling", "sets", a.rolling_sets);
        }
    }

    if (auto n = root["monitor"]; r.section(n, "monitor", {"poll_interval", "level"})) {
        r.scalar(n, "monitor", "poll_interval", c.monitor.poll_interval);
        r.scalar(n, "monitor", "level", c.monitor.level);
    }

    if (auto n = root["detect"]; r.section(n, "detect", {"window", "alarm", "ml"})) {
        auto& d = c.detect;
        r.scalar(n, "detect", "window", d.window);
        if (auto m = n["alarm"]; r.section(m, "detect.alarm", {"threshold", "consecutive"})) {
            r.scalar(m, "detect.alarm", "threshold", d.alarm.threshold);
            r.scalar(m, "detect.alarm", "consecutive", d.alarm.consecutive);
        }
        if (auto m = n["ml"];
            r.section(m, "detect.ml", {"svm_regularization", "svm_epochs", "n_trees", "max_depth",
                                       "features_per_split", "bootstrap", "warmup", "train_runs", "test_runs",
                                       "topologies", "feature_sizes", "edge_subset"})) {
            auto& ml = d.ml;
            const std::string p = "detect.ml";
            r.scalar(m, p, "svm_regularization", ml.svm_regularization);
            r.scalar(m, p, "svm_epochs", ml.svm_epochs);
            r.scalar(m, p, "n_trees", ml.forest.n_trees);
            r.scalar(m, p, "max_depth", ml.forest.max_depth);
            r.scalar(m, p, "features_per_split", ml.forest.features_per_split);
            r.scalar(m, p, "bootstrap", ml.forest.bootstrap);
            r.choice(m, p, "warmup", ml.warmup, kWarmup);
            r.scalar(m, p, "train_runs", ml.train_runs);
            r.scalar(m, p, "test_runs", ml.test_runs);
            r.list(m, p, "topologies", ml.topologies);
            r.list(m, p, "feature_sizes", ml.feature_sizes);
            r.scalar(m, p, "edge_subset", ml.edge_subset);
        }
    }

    if (auto n = root["engine"]; r.section(n, "engine", {"sim_duration", "tick", "saturation_threshold"})) {
        r.scalar(n, "engine", "sim_duration", c.engine.sim_duration);
        r.scalar(n, "engine", "tick", c.engine.tick);
        r.scalar(n, "engine", "saturation_threshold", c.engine.saturation_threshold);
    }

    r.list(root, "", "seeds", c.seeds);
    r.scalar(root, "", "output_dir", c.output_dir);
}

// Line of the node at a dotted path, for constraint errors found after parsing.
int find_line(const YAML::Node& root, const std::string& path) {
    if (!root || !root.IsMap()) return 0;
    YAML::Node n = root;
    std::stringstream ss(path);
    std::string part;
    while (std::getline(ss, part, '.')) {
        const auto bracket = part.find('[');
        const std::string key = part.substr(0, bracket);
        if (!n.IsMap() || !n[key]) return 0;
        n.reset(n[key]);
        if (bracket != std::string::npos) {
            const auto idx = std::stoul(part.substr(bracket + 1));
            if (!n.IsSequence() || idx >= n.size()) return 0;
            n.reset(n[idx]);
        }
    }
    return line_of(n);
}

std::string num(double v) { return fmt::format("{}", v); }

template <typename T>
std::string seq(const std::vector<T>& v) {
    return fmt::format("[{}]", fmt::join(v, ", "));
}

} // namespace

std::vector<ConfigError> check_config(const ScenarioConfig& c) {
    std::vector<ConfigError> e;
    auto need = [&](bool ok, std::string path, std::string msg) {
        if (!ok) e.push_back({std::move(path), 0, std::move(msg)});
    };
    need(c.topology.n_subtrees >= 1, "topology.n_subtrees", "must be at least 1");
    need(c.topology.capacity_bps > 0, "topology.capacity_bps", "must be positive");
    need(c.topology.delay_ms >= 0, "topology.delay_ms", "must be non-negative");
    for (std::size_t i = 0; i < c.topology.overrides.size(); ++i) {
        const auto& o = c.topology.overrides[i];
        const auto p = fmt::format("topology.overrides[{}]", i);
        need(o.link.value >= 0, p + ".link", "must name a link id");
        need(o.capacity_bps > 0, p + ".capacity_bps", "must be positive");
        need(o.delay_ms >= 0, p + ".delay_ms", "must be non-negative");
    }

    need(c.traffic.host_scale >= 0, "traffic.host_scale", "must be non-negative");
    need(c.traffic.leaf_generator_scale >= 0, "traffic.leaf_generator_scale", "must be non-negative");
    need(c.traffic.injection_generator_scale >= 0, "traffic.injection_generator_scale", "must be non-negative");
    need(c.traffic.generator_shared_fraction >= 0 && c.traffic.generator_shared_fraction <= 1,
         "traffic.generator_shared_fraction", "must be in [0, 1]");

    const auto& a = c.attack;
    need(a.bs >= 0, "attack.bs", "must be >= 0");
    for (std::size_t i = 0; i < a.bs_values.size(); ++i)
        need(a.bs_values[i] >= 0, fmt::format("attack.bs_values[{}]", i), "must be >= 0");
    need(a.dur > 0, "attack.dur", "must be > 0");
    for (std::size_t i = 0; i < a.dur_values.size(); ++i)
        need(a.dur_values[i] > 0, fmt::format("attack.dur_values[{}]", i), "must be > 0");
    need(a.attack_start >= 0, "attack.attack_start", "must be >= 0");
    need(a.attack_start < c.engine.sim_duration, "attack.attack_start", "must fall inside engine.sim_duration");
    if (a.ramp_shape == RampProfile::Shape::linear)
        need(a.ramp_duration > 0, "attack.ramp.duration", "must be > 0 for a linear ramp");
    need(a.ramp_start_fraction >= 0 && a.ramp_start_fraction <= 1, "attack.ramp.start_fraction", "must be in [0, 1]");
    need(a.flow_rate_start.has_value() == a.flow_rate_end.has_value(), "attack.flow_rate",
         "start and end must be given together");
    if (a.flow_rate_start && a.flow_rate_end)
        need(*a.flow_rate_end >= *a.flow_rate_start && *a.flow_rate_start >= 0, "attack.flow_rate",
             "requires end >= start >= 0");
    need(a.overprovision > 0, "attack.overprovision", "must be > 0");
    need(a.n_target_links >= 1, "attack.n_target_links", "must be at least 1");
    if (a.rolling_period) {
        need(*a.rolling_period > 0, "attack.rolling.period", "must be > 0");
        need(a.rolling_sets >= 2, "attack.rolling.sets", "rolling needs at least 2 sets");
        need(a.rolling_sets <= c.topology.n_subtrees, "attack.rolling.sets", "cannot exceed topology.n_subtrees");
    }

    need(c.monitor.poll_interval > 0, "monitor.poll_interval", "must be > 0");
    need(c.monitor.level >= 1, "monitor.level", "must be a server-side level (>= 1)");

    need(c.detect.window >= 2, "detect.window", "must be at least 2");
    need(c.detect.alarm.threshold > -1 && c.detect.alarm.threshold < 1, "detect.alarm.threshold",
         "must be in (-1, 1)");
    need(c.detect.alarm.consecutive >= 1, "detect.alarm.consecutive", "must be at least 1");
    const auto& ml = c.detect.ml;
    need(ml.svm_regularization > 0, "detect.ml.svm_regularization", "must be > 0");
    need(ml.svm_epochs >= 1, "detect.ml.svm_epochs", "must be at least 1");
    need(ml.forest.n_trees >= 1, "detect.ml.n_trees", "must be at least 1");
    need(ml.forest.features_per_split >= 0, "detect.ml.features_per_split", "must be >= 0 (0 = ceil(sqrt(d)))");
    need(ml.train_runs >= 1, "detect.ml.train_runs", "must be at least 1");
    need(ml.test_runs >= 1, "detect.ml.test_runs", "must be at least 1");
    for (std::size_t i = 0; i < ml.topologies.size(); ++i)
        need(ml.topologies[i] >= 1, fmt::format("detect.ml.topologies[{}]", i), "must be at least 1");
    for (std::size_t i = 0; i < ml.feature_sizes.size(); ++i)
        need(ml.feature_sizes[i] >= 1, fmt::format("detect.ml.feature_sizes[{}]", i), "must be at least 1");
    need(ml.edge_subset >= 1, "detect.ml.edge_subset", "must be at least 1");

    need(c.engine.tick > 0, "engine.tick", "must be > 0");
    if (c.engine.tick > 0 && c.monitor.poll_interval > 0) {
        const double q = c.monitor.poll_interval / c.engine.tick;
        need(q >= 1 && std::abs(q - std::round(q)) < 1e-9, "engine.tick", "must divide monitor.poll_interval");
    }
    need(c.engine.sim_duration >= c.monitor.poll_interval, "engine.sim_duration", "must be >= monitor.poll_interval");
    need(c.engine.saturation_threshold > 0 && c.engine.saturation_threshold <= 1, "engine.saturation_threshold",
         "must be in (0, 1]");
    need(!c.seeds.empty(), "seeds", "must list at least one seed");
    return e;
}

ConfigResult validate_config(const std::string& text, const ScenarioConfig& base) {
    ConfigResult out;
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& ex) {
        out.errors.push_back({"", ex.mark.line + 1, ex.msg});
        return out;
    }
    ScenarioConfig c = base;
    Reader r(out.errors);
    if (root && !root.IsNull()) parse(root, c, r);
    for (auto e : check_config(c)) {
        e.line = find_line(root, e.path);
        out.errors.push_back(std::move(e));
    }
    if (out.errors.empty()) out.config = std::move(c);
    return out;
}

std::string format_error(const ConfigError& e) {
    const std::string where = e.path.empty() ? "config" : e.path;
    return e.line > 0 ? fmt::format("line {}: {}: {}", e.line, where, e.message)
                      : fmt::format("{}: {}", where, e.message);
}

std::string to_yaml(const ScenarioConfig& c) {
    std::string y;
    auto line = [&](const std::string& s) { y += s + "\n"; };
    auto opt = [](const std::optional<double>& v) { return v ? num(*v) : std::string("null"); };
    const auto shape = c.attack.ramp_shape == RampProfile::Shape::linear ? "linear" : "none";

    line("topology:");
    line(fmt::format("  n_subtrees: {}", c.topology.n_subtrees));
    line(fmt::format("  capacity_bps: {}", num(c.topology.capacity_bps)));
    line(fmt::format("  delay_ms: {}", num(c.topology.delay_ms)));
    if (c.topology.overrides.empty()) {
        line("  overrides: []");
    } else {
        line("  overrides:");
        for (const auto& o : c.topology.overrides)
            line(fmt::format("    - {{link: {}, capacity_bps: {}, delay_ms: {}}}", o.link.value, num(o.capacity_bps),
                             num(o.delay_ms)));
    }

    const auto& t = c.traffic;
    std::vector<std::string> models;
    for (auto k : t.host_models) models.push_back(to_string(k));
    line("traffic:");
    line(fmt::format("  host_background: {}", t.host_background));
    line(fmt::format("  host_models: {}", seq(models)));
    line(fmt::format("  host_scale: {}", num(t.host_scale)));
    line(fmt::format("  generator_model: {}", to_string(t.generator_model)));
    line(fmt::format("  leaf_generator_scale: {}", num(t.leaf_generator_scale)));
    line(fmt::format("  injection_generator_scale: {}", num(t.injection_generator_scale)));
    line(fmt::format("  generator_sharing: {}", to_string(t.generator_sharing)));
    line(fmt::format("  generator_shared_fraction: {}", num(t.generator_shared_fraction)));

    const auto& a = c.attack;
    line("attack:");
    line(fmt::format("  enabled: {}", a.enabled));
    line(fmt::format("  bs: {}", num(a.bs)));
    line(fmt::format("  bs_values: {}", seq(a.bs_values)));
    line(fmt::format("  dur: {}", num(a.dur)));
    line(fmt::format("  dur_values: {}", seq(a.dur_values)));
    line(fmt::format("  attack_start: {}", num(a.attack_start)));
    line("  ramp:");
    line(fmt::format("    shape: {}", shape));
    line(fmt::format("    duration: {}", num(a.ramp_duration)));
    line(fmt::format("    start_fraction: {}", num(a.ramp_start_fraction)));
    line("  flow_rate:");
    line(fmt::format("    start: {}", opt(a.flow_rate_start)));
    line(fmt::format("    end: {}", opt(a.flow_rate_end)));
    line(fmt::format("  overprovision: {}", num(a.overprovision)));
    line(fmt::format("  spread: {}", a.spread == DecoySpread::all ? "all" : "partition"));
    line(fmt::format("  n_target_links: {}", a.n_target_links));
    line("  rolling:");
    line(fmt::format("    period: {}", opt(a.rolling_period)));
    line(fmt::format("    sets: {}", a.rolling_sets));

    line("monitor:");
    line(fmt::format("  poll_interval: {}", num(c.monitor.poll_interval)));
    line(fmt::format("  level: {}", c.monitor.level));

    const auto& ml = c.detect.ml;
    line("detect:");
    line(fmt::format("  window: {}", c.detect.window));
    line("  alarm:");
    line(fmt::format("    threshold: {}", num(c.detect.alarm.threshold)));
    line(fmt::format("    consecutive: {}", c.detect.alarm.consecutive));
    line("  ml:");
    line(fmt::format("    svm_regularization: {}", num(ml.svm_regularization)));
    line(fmt::format("    svm_epochs: {}", ml.svm_epochs));
    line(fmt::format("    n_trees: {}", ml.forest.n_trees));
    line(fmt::format("    max_depth: {}", ml.forest.max_depth));
    line(fmt::format("    features_per_split: {}", ml.forest.features_per_split));
    line(fmt::format("    bootstrap: {}", ml.forest.bootstrap));
    line(fmt::format("    warmup: {}", ml.warmup == WarmupLabel::attack ? "attack" : "exclude"));
    line(fmt::format("    train_runs: {}", ml.train_runs));
    line(fmt::format("    test_runs: {}", ml.test_runs));
    line(fmt::format("    topologies: {}", seq(ml.topologies)));
    line(fmt::format("    feature_sizes: {}", seq(ml.feature_sizes)));
    line(fmt::format("    edge_subset: {}", ml.edge_subset));

    line("engine:");
    line(fmt::format("  sim_duration: {}", num(c.engine.sim_duration)));
    line(fmt::format("  tick: {}", num(c.engine.tick)));
    line(fmt::format("  saturation_threshold: {}", num(c.engine.saturation_threshold)));

    line(fmt::format("seeds: {}", seq(c.seeds)));
    line(fmt::format("output_dir: {}", nlohmann::json(c.output_dir).dump()));
    return y;
}

} // namespace xfire
