#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "xfire/topology.hpp"

namespace xfire {

enum class ModelKind { telnet, dns, csa, voip, quake3, bot, background1, background2, constant };
enum class Protocol { tcp, udp, tcp_udp };

const char* to_string(ModelKind kind);
std::optional<ModelKind> model_kind_from_string(const std::string& name);

/// Per-tick rate process: packets/s and packet size are drawn uniformly from
/// their bounds each tick, and the product is multiplied by `scale`.
struct TrafficModel {
    ModelKind kind = ModelKind::constant;
    double pkt_size_min = 0.0; // bytes
    double pkt_size_max = 0.0;
    double rate_min = 0.0; // packets/s
    double rate_max = 0.0;
    Protocol protocol = Protocol::tcp;
    double duration = 0.0; // s
    double scale = 1.0;
    double constant_bps = 0.0; // only for ModelKind::constant

    /// Long-run mean in bits/s.
    double mean_bps() const;
    /// Largest value a single draw can take, in bits/s.
    double peak_bps() const;
    void validate() const;
};

/// Table-driven defaults. The bot and Background rows carry the packet-size
/// and rate bounds of the reference setup; the five application models are
/// shaped so their means are Telnet 2 kbps, DNS 1 kbps, CSa 40 kbps, VoIP
/// 30 kbps and Quake3 50 kbps.
TrafficModel default_model(ModelKind kind, double duration);
TrafficModel constant_model(double bps, double duration);

struct RampProfile {
    enum class Shape { none, linear };
    Shape shape = Shape::none;
    double r_start = 0.0; // bits/s
    double r_end = 0.0;
    double ramp_duration = 0.0; // s

    void validate() const;
};

struct FlowSpec {
    HostId src;
    HostId dst;
    TrafficModel model;
    double start_offset = 0.0; // s
    RampProfile ramp;
    std::uint64_t seed = 0;
    bool attack = false;
};

/// Offered rate of a flow at time t (bits/s). Zero outside
/// [start_offset, start_offset + duration); linear inside a ramp; otherwise
/// a draw keyed on (seed, floor(t)), so repeated calls agree.
double rate_at(const FlowSpec& flow, double t);

enum class GeneratorSharing {
    independent, // every generator flow has its own rate process
    generator,   // a generator's flows share one process: one source split evenly
    network,     // all leaf generators follow one process (common demand swing)
};
const char* to_string(GeneratorSharing sharing);

struct TrafficConfig {
    double duration = 1800.0; // s; background flows run for the whole horizon
    bool host_background = true;
    std::vector<ModelKind> host_models{ModelKind::telnet, ModelKind::dns,        ModelKind::csa,
                                       ModelKind::voip,   ModelKind::quake3,     ModelKind::background1,
                                       ModelKind::background2};
    double host_scale = 0.06;
    // Per-decoy scale of the generator model.
    ModelKind generator_model = ModelKind::background2;
    double leaf_generator_scale = 0.2;
    double injection_generator_scale = 0.05;
    GeneratorSharing generator_sharing = GeneratorSharing::generator;
    // Fraction of each generator flow that follows the shared process; the
    // rest is a per-decoy independent flow. Ignored for `independent`.
    double generator_shared_fraction = 1.0;
};

/// Normal traffic: every bot and client runs each host model toward a decoy
/// (assigned round-robin), each leaf generator sends to the decoys of its
/// leaf, and the injection generator behind switch 6 sends to every decoy.
std::vector<FlowSpec> make_background_suite(const Topology& topology, const TrafficConfig& config,
                                            std::uint64_t seed);

/// Expected offered load on a link from a set of flows, using model means.
double expected_load(const Topology& topology, const std::vector<FlowSpec>& flows, LinkId link);

} // namespace xfire
