#include "xfire/attack.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include <fmt/format.h>

#include "xfire/engine.hpp"
#include "xfire/rng.hpp"

namespace xfire {

void AttackPlan::validate(const Topology& topology) const {
    if (bs < 0.0) throw std::invalid_argument("bs must be non-negative");
    if (!(dur > 0.0)) throw std::invalid_argument("dur must be positive");
    if (attack_start < 0.0) throw std::invalid_argument("attack_start must be non-negative");
    if (bots.empty()) throw std::invalid_argument("attack plan has no bots");
    per_bot_rate.validate();
    for (auto l : target_links) topology.link(l);
    if (rolling_period) {
        if (!(*rolling_period > 0.0)) throw std::invalid_argument("rolling_period must be positive");
        if (rolling_sets.size() < 2) throw std::invalid_argument("rolling requires at least two target-link sets");
        for (const auto& set : rolling_sets)
            for (auto l : set) topology.link(l);
    }
    // Every assigned decoy must sit behind some target link.
    std::set<HostId> reachable;
    std::vector<LinkId> all_targets = target_links;
    for (const auto& set : rolling_sets) all_targets.insert(all_targets.end(), set.begin(), set.end());
    if (all_targets.empty()) all_targets.push_back(topology.target_link());
    for (auto l : all_targets)
        for (auto d : topology.decoys_behind(l)) reachable.insert(d);
    for (const auto& [bot, decoys] : decoy_assignment) {
        topology.host(bot);
        for (auto d : decoys)
            if (!reachable.count(d))
                throw std::invalid_argument(
                    fmt::format("decoy {} is not reachable through any target link", topology.host(d).name));
    }
}

nlohmann::json BotSchedule::to_json(const Topology& topology) const {
    nlohmann::json starts_json = nlohmann::json::array();
    for (const auto& s : starts)
        starts_json.push_back({{"bot", topology.host(s.bot).name},
                               {"slot", s.slot},
                               {"start", s.start},
                               {"end", s.end},
                               {"n_decoys", s.n_decoys}});
    return {{"bot_starts", std::move(starts_json)}, {"n_attack_flows", flows.size()}};
}

std::vector<LinkId> select_target_links(const Topology& topology, const std::vector<HostId>& bots,
                                        const std::vector<HostId>& decoys, int k) {
    if (bots.empty()) throw std::invalid_argument("no bots to route from");
    if (decoys.empty()) throw std::invalid_argument("no decoys to route to");
    if (k < 1 || static_cast<std::size_t>(k) > topology.links().size())
        throw std::invalid_argument(fmt::format("k={} outside [1, {}]", k, topology.links().size()));
    std::vector<long> count(topology.links().size(), 0);
    for (auto b : bots)
        for (auto d : decoys)
            for (auto l : topology.route(b, d)) ++count[static_cast<std::size_t>(l.value)];
    std::vector<LinkId> ids;
    for (const auto& l : topology.links()) ids.push_back(l.id);
    std::stable_sort(ids.begin(), ids.end(), [&](LinkId x, LinkId y) {
        return count[static_cast<std::size_t>(x.value)] > count[static_cast<std::size_t>(y.value)];
    });
    ids.resize(static_cast<std::size_t>(k));
    return ids;
}

std::map<HostId, std::vector<HostId>> spread_decoys(const std::vector<HostId>& bots,
                                                    const std::vector<HostId>& decoys, DecoySpread mode) {
    std::map<HostId, std::vector<HostId>> out;
    if (bots.empty()) return out;
    for (auto b : bots) out[b];
    if (mode == DecoySpread::all) {
        for (auto b : bots) out[b] = decoys;
    } else {
        for (std::size_t i = 0; i < decoys.size(); ++i) out[bots[i % bots.size()]].push_back(decoys[i]);
    }
    return out;
}

double per_bot_budget(const Topology& topology, const std::vector<FlowSpec>& normal_flows, LinkId target,
                      std::size_t n_bots, double overprovision) {
    if (n_bots == 0) throw std::invalid_argument("no bots");
    const double headroom = topology.link(target).capacity_bps - expected_load(topology, normal_flows, target);
    return std::max(0.0, headroom) * overprovision / static_cast<double>(n_bots);
}

std::vector<RollingSlot> rolling_schedule(const AttackPlan& plan, double horizon) {
    if (!plan.rolling_period) return {{plan.attack_start, horizon, 0}};
    if (plan.rolling_sets.size() < 2) throw std::invalid_argument("rolling requires at least two target-link sets");
    const double period = *plan.rolling_period;
    if (!(period > 0.0)) throw std::invalid_argument("rolling_period must be positive");
    std::vector<RollingSlot> slots;
    std::size_t i = 0;
    for (double t = plan.attack_start; t < horizon - 1e-9; t += period, ++i)
        slots.push_back({t, std::min(t + period, horizon), i % plan.rolling_sets.size()});
    return slots;
}

BotSchedule schedule_bots(const AttackPlan& plan, const Topology& topology, std::uint64_t seed, double horizon) {
    plan.validate(topology);
    const TrafficModel bot_model = default_model(ModelKind::bot, 1.0);
    const auto slots = rolling_schedule(plan, horizon);

    BotSchedule out;
    for (std::size_t si = 0; si < slots.size(); ++si) {
        const auto& slot = slots[si];
        std::set<HostId> behind;
        if (plan.rolling_period) {
            for (auto l : plan.rolling_sets[slot.set_index])
                for (auto d : topology.decoys_behind(l)) behind.insert(d);
        }
        for (std::size_t b = 0; b < plan.bots.size(); ++b) {
            const HostId bot = plan.bots[b];
            std::vector<HostId> dsts;
            auto it = plan.decoy_assignment.find(bot);
            const auto& assigned = it != plan.decoy_assignment.end() ? it->second : topology.decoys();
            for (auto d : assigned)
                if (!plan.rolling_period || behind.count(d)) dsts.push_back(d);

            const double offset = plan.bs * uniform01(derive_seed(seed, {7, si, b}));
            const double start = slot.begin + offset;
            double end = start + plan.dur;
            if (plan.rolling_period) end = std::min(end, slot.end);
            if (end <= start || dsts.empty()) continue;
            out.starts.push_back({bot, si, start, end, dsts.size()});

            const double share = 1.0 / static_cast<double>(dsts.size());
            RampProfile ramp = plan.per_bot_rate;
            ramp.r_start *= share;
            ramp.r_end *= share;
            TrafficModel model = bot_model;
            model.duration = end - start;
            // Same packet/rate family as background TCP traffic, scaled to the
            // per-flow budget.
            model.scale = ramp.r_end / bot_model.mean_bps();
            if (model.scale > 1.0)
                throw std::invalid_argument(
                    fmt::format("per-flow attack rate {:.0f} bps exceeds the bot model mean", ramp.r_end));
            for (std::size_t d = 0; d < dsts.size(); ++d) {
                FlowSpec f;
                f.src = bot;
                f.dst = dsts[d];
                f.model = model;
                f.start_offset = start;
                f.ramp = ramp;
                // One rate process per bot, split evenly over its decoys.
                f.seed = derive_seed(seed, {8, si, b});
                f.attack = true;
                out.flows.push_back(f);
            }
        }
    }
    return out;
}

std::optional<WarmupWindow> measure_warmup(const LinkSampleSeries& series, LinkId target,
                                           double saturation_threshold) {
    series.topology().link(target);
    std::optional<double> first;
    for (std::size_t p = 0; p < series.poll_count(); ++p) {
        const auto& s = series.at(p, target);
        if (!first && s.attack_bps > 0.0) first = s.t;
        if (first && s.utilization >= saturation_threshold) return WarmupWindow{*first, s.t};
    }
    return std::nullopt;
}

} // namespace xfire
