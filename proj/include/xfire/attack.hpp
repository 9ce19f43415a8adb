#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include <json.hpp>

#include "xfire/topology.hpp"
#include "xfire/traffic.hpp"

namespace xfire {

class LinkSampleSeries;

enum class DecoySpread {
    all,       // every bot sends to every decoy
    partition, // decoys dealt round-robin, each decoy served by one bot
};

struct AttackPlan {
    std::vector<LinkId> target_links;
    std::vector<HostId> bots;
    double bs = 0.0;   // s, spread of bot start offsets
    double dur = 300.0; // s, lifetime of each bot flow
    RampProfile per_bot_rate; // bits/s summed over a bot's decoys
    double attack_start = 300.0;
    std::optional<double> rolling_period;
    std::vector<std::vector<LinkId>> rolling_sets;
    std::map<HostId, std::vector<HostId>> decoy_assignment;

    void validate(const Topology& topology) const;
};

/// First bot arrival at the target link and the first saturated poll.
struct WarmupWindow {
    double t_first_bot = 0.0;
    double t_link_down = 0.0;
    double length() const { return t_link_down - t_first_bot; }
};

struct BotStart {
    HostId bot;
    std::size_t slot = 0;
    double start = 0.0;
    double end = 0.0;
    std::size_t n_decoys = 0;
};

struct BotSchedule {
    std::vector<BotStart> starts;
    std::vector<FlowSpec> flows;

    nlohmann::json to_json(const Topology& topology) const;
};

struct RollingSlot {
    double begin = 0.0;
    double end = 0.0;
    std::size_t set_index = 0;
};

/// Rank links by the number of distinct bot->decoy routes crossing them and
/// return the top k (ties by lowest link id).
std::vector<LinkId> select_target_links(const Topology& topology, const std::vector<HostId>& bots,
                                        const std::vector<HostId>& decoys, int k);

std::map<HostId, std::vector<HostId>> spread_decoys(const std::vector<HostId>& bots,
                                                    const std::vector<HostId>& decoys, DecoySpread mode);

/// Per-bot rate that fills the target link's headroom after normal traffic,
/// times `overprovision`.
double per_bot_budget(const Topology& topology, const std::vector<FlowSpec>& normal_flows, LinkId target,
                      std::size_t n_bots, double overprovision);

/// Round-robin activation of the plan's rolling sets from attack_start to
/// `horizon`. Without rolling this is a single slot on set 0.
std::vector<RollingSlot> rolling_schedule(const AttackPlan& plan, double horizon);

/// Realize the plan: each bot starts at attack_start + U(0, bs) (redrawn per
/// rolling slot), ramps per `per_bot_rate`, and splits its rate evenly over
/// its decoys that sit behind the active target set.
BotSchedule schedule_bots(const AttackPlan& plan, const Topology& topology, std::uint64_t seed,
                          double horizon);

/// Warm-up on a link: first poll carrying attack load, first poll at or above
/// the saturation threshold. Absent if either never happens.
std::optional<WarmupWindow> measure_warmup(const LinkSampleSeries& series, LinkId target,
                                           double saturation_threshold = 0.999);

} // namespace xfire
