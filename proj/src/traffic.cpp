#include "xfire/traffic.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "xfire/rng.hpp"

namespace xfire {

namespace {

constexpr ModelKind kAllKinds[] = {ModelKind::telnet,      ModelKind::dns,        ModelKind::csa,
                                   ModelKind::voip,        ModelKind::quake3,     ModelKind::bot,
                                   ModelKind::background1, ModelKind::background2, ModelKind::constant};

TrafficModel make(ModelKind kind, double smin, double smax, double rmin, double rmax, Protocol p,
                  double duration) {
    TrafficModel m;
    m.kind = kind;
    m.pkt_size_min = smin;
    m.pkt_size_max = smax;
    m.rate_min = rmin;
    m.rate_max = rmax;
    m.protocol = p;
    m.duration = duration;
    return m;
}

} // namespace

const char* to_string(ModelKind kind) {
    switch (kind) {
    case ModelKind::telnet: return "telnet";
    case ModelKind::dns: return "dns";
    case ModelKind::csa: return "csa";
    case ModelKind::voip: return "voip";
    case ModelKind::quake3: return "quake3";
    case ModelKind::bot: return "bot";
    case ModelKind::background1: return "background1";
    case ModelKind::background2: return "background2";
    case ModelKind::constant: return "constant";
    }
    return "?";
}

std::optional<ModelKind> model_kind_from_string(const std::string& name) {
    for (auto k : kAllKinds)
        if (name == to_string(k)) return k;
    return std::nullopt;
}

const char* to_string(GeneratorSharing sharing) {
    switch (sharing) {
    case GeneratorSharing::independent: return "independent";
    case GeneratorSharing::generator: return "generator";
    case GeneratorSharing::network: return "network";
    }
    return "?";
}

double TrafficModel::mean_bps() const {
    if (kind == ModelKind::constant) return constant_bps;
    return 8.0 * 0.25 * (pkt_size_min + pkt_size_max) * (rate_min + rate_max) * scale;
}

double TrafficModel::peak_bps() const {
    if (kind == ModelKind::constant) return constant_bps;
    return 8.0 * pkt_size_max * rate_max * scale;
}

void TrafficModel::validate() const {
    if (pkt_size_min > pkt_size_max) throw std::invalid_argument("pkt_size_min exceeds pkt_size_max");
    if (rate_min > rate_max) throw std::invalid_argument("rate_min exceeds rate_max");
    if (pkt_size_min < 0.0 || rate_min < 0.0) throw std::invalid_argument("negative model bound");
    if (!(duration > 0.0)) throw std::invalid_argument("model duration must be positive");
    if (scale < 0.0) throw std::invalid_argument("model scale must be non-negative");
    if (constant_bps < 0.0) throw std::invalid_argument("constant rate must be non-negative");
}

TrafficModel default_model(ModelKind kind, double duration) {
    switch (kind) {
    case ModelKind::telnet: return make(kind, 20, 80, 1, 9, Protocol::tcp, duration);
    case ModelKind::dns: return make(kind, 50, 200, 0, 2, Protocol::tcp_udp, duration);
    case ModelKind::csa: return make(kind, 40, 160, 10, 90, Protocol::udp, duration);
    case ModelKind::voip: return make(kind, 60, 140, 25, 50, Protocol::udp, duration);
    case ModelKind::quake3: return make(kind, 50, 150, 25, 100, Protocol::udp, duration);
    case ModelKind::bot: return make(kind, 100, 2000, 15, 200, Protocol::tcp, duration);
    case ModelKind::background1: return make(kind, 50, 1000, 1, 80, Protocol::tcp, duration);
    case ModelKind::background2: return make(kind, 10, 2500, 1, 80, Protocol::tcp, duration);
    case ModelKind::constant: return constant_model(0.0, duration);
    }
    throw std::invalid_argument("unknown model kind");
}

TrafficModel constant_model(double bps, double duration) {
    TrafficModel m;
    m.kind = ModelKind::constant;
    m.constant_bps = bps;
    m.duration = duration;
    return m;
}

void RampProfile::validate() const {
    if (shape == Shape::none) return;
    if (!(ramp_duration > 0.0)) throw std::invalid_argument("ramp_duration must be positive");
    if (r_start < 0.0 || r_end < r_start) throw std::invalid_argument("ramp requires r_end >= r_start >= 0");
}

double rate_at(const FlowSpec& flow, double t) {
    const double since = t - flow.start_offset;
    if (since < 0.0 || since >= flow.model.duration) return 0.0;
    const auto& ramp = flow.ramp;
    if (ramp.shape == RampProfile::Shape::linear && since < ramp.ramp_duration)
        return ramp.r_start + (ramp.r_end - ramp.r_start) * since / ramp.ramp_duration;
    const auto& m = flow.model;
    if (m.kind == ModelKind::constant) return m.constant_bps;
    const auto tick = static_cast<std::uint64_t>(static_cast<std::int64_t>(std::floor(t)));
    const double u_rate = uniform01(derive_seed(flow.seed, {tick, 0}));
    const double u_size = uniform01(derive_seed(flow.seed, {tick, 1}));
    const double pkts = m.rate_min + u_rate * (m.rate_max - m.rate_min);
    const double size = m.pkt_size_min + u_size * (m.pkt_size_max - m.pkt_size_min);
    return 8.0 * pkts * size * m.scale;
}

std::vector<FlowSpec> make_background_suite(const Topology& topology, const TrafficConfig& config,
                                            std::uint64_t seed) {
    std::vector<FlowSpec> flows;
    const auto decoys = topology.decoys();
    if (decoys.empty()) return flows;
    std::uint64_t index = 0;

    if (config.host_background) {
        std::vector<HostId> sources = topology.bots();
        for (auto c : topology.clients()) sources.push_back(c);
        std::size_t slot = 0;
        for (auto src : sources) {
            for (auto kind : config.host_models) {
                FlowSpec f;
                f.src = src;
                f.dst = decoys[slot++ % decoys.size()];
                f.model = default_model(kind, config.duration);
                f.model.scale = config.host_scale;
                f.seed = derive_seed(seed, {1, index++});
                flows.push_back(f);
            }
        }
    }

    const auto generators = topology.hosts_with_role(HostRole::bg_generator);
    for (auto gen : generators) {
        const int at = topology.host(gen).attach_switch;
        const bool injection = at == 6;
        const double scale = injection ? config.injection_generator_scale : config.leaf_generator_scale;
        if (scale <= 0.0) continue;
        const auto dsts = injection ? decoys : topology.decoys_on_leaf(at);
        std::uint64_t shared = derive_seed(seed, {2, static_cast<std::uint64_t>(gen.value)});
        if (config.generator_sharing == GeneratorSharing::network && !injection) shared = derive_seed(seed, {4});
        const bool independent = config.generator_sharing == GeneratorSharing::independent;
        const double frac = independent ? 0.0 : config.generator_shared_fraction;
        for (auto dst : dsts) {
            FlowSpec f;
            f.src = gen;
            f.dst = dst;
            f.model = default_model(config.generator_model, config.duration);
            if (frac > 0.0) {
                f.model.scale = scale * frac;
                f.seed = shared;
                flows.push_back(f);
            }
            if (frac < 1.0) {
                f.model.scale = scale * (1.0 - frac);
                f.seed = derive_seed(seed, {3, index});
                flows.push_back(f);
            }
            ++index;
        }
    }
    return flows;
}

double expected_load(const Topology& topology, const std::vector<FlowSpec>& flows, LinkId link) {
    double total = 0.0;
    for (const auto& f : flows) {
        const auto path = topology.route(f.src, f.dst);
        for (auto l : path)
            if (l == link) {
                total += f.ramp.shape == RampProfile::Shape::none ? f.model.mean_bps() : f.ramp.r_end;
                break;
            }
    }
    return total;
}

} // namespace xfire
