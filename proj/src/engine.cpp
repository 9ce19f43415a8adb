#include "xfire/engine.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <tuple>

#include <fmt/format.h>

namespace xfire {

const char* to_string(SampleLabel label) {
    switch (label) {
    case SampleLabel::normal: return "normal";
    case SampleLabel::warmup: return "warmup";
    case SampleLabel::attack: return "attack";
    }
    return "?";
}

namespace {

// Number of whole `step`s in `span`, or nullopt if it is not a whole multiple.
std::optional<long> whole_multiple(double span, double step) {
    const double q = span / step;
    const double r = std::round(q);
    if (r < 1.0 || std::abs(q - r) > 1e-9 * std::max(1.0, q)) return std::nullopt;
    return static_cast<long>(r);
}

} // namespace

void Scenario::validate() const {
    if (!topology) throw std::invalid_argument("scenario has no topology");
    if (!(tick > 0.0)) throw std::invalid_argument("tick must be positive");
    if (!(poll_interval > 0.0)) throw std::invalid_argument("poll_interval must be positive");
    if (!whole_multiple(poll_interval, tick)) throw std::invalid_argument("tick must divide poll_interval");
    if (sim_duration < poll_interval) throw std::invalid_argument("sim_duration must be at least poll_interval");
    if (!(saturation_threshold > 0.0 && saturation_threshold <= 1.0))
        throw std::invalid_argument("saturation_threshold must be in (0, 1]");
    for (const auto& f : flows) {
        topology->host(f.src);
        topology->host(f.dst);
        f.model.validate();
        f.ramp.validate();
        if (f.start_offset < 0.0) throw std::invalid_argument("flow start_offset must be non-negative");
    }
    if (attack_plan) attack_plan->validate(*topology);
}

LinkSampleSeries::LinkSampleSeries(std::shared_ptr<const Topology> topology, std::vector<double> times,
                                   double poll_interval)
    : topology_(std::move(topology)),
      times_(std::move(times)),
      poll_interval_(poll_interval),
      n_links_(topology_->links().size()),
      samples_(times_.size() * n_links_) {
    for (std::size_t p = 0; p < times_.size(); ++p)
        for (std::size_t l = 0; l < n_links_; ++l) {
            auto& s = samples_[p * n_links_ + l];
            s.t = times_[p];
            s.link = LinkId{static_cast<int>(l)};
        }
}

LinkSample& LinkSampleSeries::at(std::size_t poll, LinkId link) {
    if (poll >= times_.size() || link.value < 0 || static_cast<std::size_t>(link.value) >= n_links_)
        throw std::out_of_range(fmt::format("no sample for poll {} link {}", poll, link.value));
    return samples_[poll * n_links_ + static_cast<std::size_t>(link.value)];
}

const LinkSample& LinkSampleSeries::at(std::size_t poll, LinkId link) const {
    return const_cast<LinkSampleSeries*>(this)->at(poll, link);
}

std::vector<double> LinkSampleSeries::utilization(LinkId link) const {
    std::vector<double> out(times_.size());
    for (std::size_t p = 0; p < times_.size(); ++p) out[p] = at(p, link).utilization;
    return out;
}

std::vector<double> LinkSampleSeries::offered(LinkId link) const {
    std::vector<double> out(times_.size());
    for (std::size_t p = 0; p < times_.size(); ++p) out[p] = at(p, link).offered_bps;
    return out;
}

std::vector<double> LinkSampleSeries::volume_bits(LinkId link) const {
    std::vector<double> out(times_.size());
    for (std::size_t p = 0; p < times_.size(); ++p) out[p] = at(p, link).carried_bits;
    return out;
}

std::vector<SampleLabel> LinkSampleSeries::labels() const {
    std::vector<SampleLabel> out(times_.size(), SampleLabel::normal);
    if (n_links_ == 0) return out;
    for (std::size_t p = 0; p < times_.size(); ++p) out[p] = samples_[p * n_links_].label;
    return out;
}

std::size_t LinkSampleSeries::poll_index(double t) const {
    auto it = std::lower_bound(times_.begin(), times_.end(), t - 1e-9);
    if (it == times_.end() || std::abs(*it - t) > 1e-9)
        throw std::out_of_range(fmt::format("{} is not a poll instant", t));
    return static_cast<std::size_t>(it - times_.begin());
}

void LinkSampleSeries::write_csv(std::ostream& out) const {
    out << "t,link_id,offered_bps,utilization,flow_count,label\n";
    for (const auto& s : samples_)
        out << fmt::format("{:.0f},{},{:.3f},{:.6f},{},{}\n", s.t, s.link.value, s.offered_bps, s.utilization,
                           s.flow_count, to_string(s.label));
}

LinkSampleSeries run(const Scenario& scenario) {
    scenario.validate();
    const Topology& topo = *scenario.topology;
    const std::size_t n_links = topo.links().size();
    const std::size_t n_dir = 2 * n_links;
    const long ticks_per_poll = *whole_multiple(scenario.poll_interval, scenario.tick);
    const auto n_polls = static_cast<std::size_t>(std::floor(scenario.sim_duration / scenario.poll_interval + 1e-9));
    const long n_ticks = static_cast<long>(n_polls) * ticks_per_poll;

    // Directed edge 2*l is a->b, 2*l+1 is b->a. Any tree path climbs toward
    // switch 7 and then descends, so ordering edges by (up first, deeper
    // first; then down, shallower first) processes every path hop-by-hop.
    std::vector<std::tuple<int, int, std::size_t>> keyed;
    for (const auto& l : topo.links()) {
        for (int dir = 0; dir < 2; ++dir) {
            NodeId from = dir == 0 ? l.a : l.b;
            NodeId to = dir == 0 ? l.b : l.a;
            const bool up = topo.depth(to) < topo.depth(from);
            keyed.emplace_back(up ? 0 : 1, up ? -topo.depth(from) : topo.depth(from),
                               2 * static_cast<std::size_t>(l.id.value) + static_cast<std::size_t>(dir));
        }
    }
    std::sort(keyed.begin(), keyed.end());

    const auto& flows = scenario.flows;
    std::vector<std::vector<std::size_t>> on_edge(n_dir);
    for (std::size_t f = 0; f < flows.size(); ++f)
        for (const auto& hop : topo.route_hops(flows[f].src, flows[f].dst))
            on_edge[2 * static_cast<std::size_t>(hop.link.value) + (hop.forward ? 0 : 1)].push_back(f);

    std::vector<double> times(n_polls);
    for (std::size_t p = 0; p < n_polls; ++p) times[p] = static_cast<double>(p + 1) * scenario.poll_interval;
    LinkSampleSeries series(scenario.topology, times, scenario.poll_interval);

    std::vector<double> sum_offered(n_links, 0.0), sum_attack(n_links, 0.0), sum_carried(n_links, 0.0);
    std::vector<std::vector<bool>> seen(n_links);
    for (std::size_t l = 0; l < n_links; ++l) seen[l].assign(on_edge[2 * l].size(), false);

    std::vector<double> rate(flows.size());
    for (long k = 0; k < n_ticks; ++k) {
        const double t = static_cast<double>(k) * scenario.tick;
        for (std::size_t f = 0; f < flows.size(); ++f) rate[f] = rate_at(flows[f], t);

        for (const auto& [up, depth, e] : keyed) {
            const auto& members = on_edge[e];
            if (members.empty()) continue;
            const std::size_t l = e / 2;
            const double cap = topo.links()[l].capacity_bps;
            double agg = 0.0;
            double attack = 0.0;
            for (auto f : members) {
                agg += rate[f];
                if (flows[f].attack) attack += rate[f];
            }
            if (e % 2 == 0) {
                sum_offered[l] += agg;
                sum_attack[l] += attack;
                sum_carried[l] += std::min(agg, cap) * scenario.tick;
                for (std::size_t i = 0; i < members.size(); ++i)
                    if (rate[members[i]] > 0.0) seen[l][i] = true;
            }
            if (agg > cap) {
                const double factor = cap / agg;
                for (auto f : members) rate[f] *= factor;
            }
        }

        if ((k + 1) % ticks_per_poll == 0) {
            const auto p = static_cast<std::size_t>((k + 1) / ticks_per_poll - 1);
            for (std::size_t l = 0; l < n_links; ++l) {
                auto& s = series.at(p, LinkId{static_cast<int>(l)});
                const double cap = topo.links()[l].capacity_bps;
                s.offered_bps = sum_offered[l] / static_cast<double>(ticks_per_poll);
                s.attack_bps = sum_attack[l] / static_cast<double>(ticks_per_poll);
                s.utilization = std::min(s.offered_bps, cap) / cap;
                s.carried_bits = sum_carried[l];
                s.flow_count = static_cast<int>(std::count(seen[l].begin(), seen[l].end(), true));
                sum_offered[l] = sum_attack[l] = sum_carried[l] = 0.0;
                std::fill(seen[l].begin(), seen[l].end(), false);
            }
        }
    }

    if (scenario.attack_plan) {
        const LinkId target = scenario.attack_plan->target_links.empty() ? topo.target_link()
                                                                         : scenario.attack_plan->target_links.front();
        const auto warm = measure_warmup(series, target, scenario.saturation_threshold);
        std::optional<std::size_t> first, last;
        for (std::size_t p = 0; p < n_polls; ++p)
            if (series.at(p, target).attack_bps > 0.0) {
                if (!first) first = p;
                last = p;
            }
        if (first) {
            for (std::size_t p = *first; p <= *last; ++p) {
                const auto label =
                    warm && times[p] >= warm->t_link_down ? SampleLabel::attack : SampleLabel::warmup;
                for (std::size_t l = 0; l < n_links; ++l) series.at(p, LinkId{static_cast<int>(l)}).label = label;
            }
        }
        series.set_warmup(warm);
    }
    return series;
}

double downstream_jump(const LinkSampleSeries& series, LinkId link, const JumpWindow& w) {
    if (series.poll_count() == 0) throw std::out_of_range("empty series");
    const double first = series.times().front() - series.poll_interval();
    const double last = series.times().back();
    if (w.before_begin < first || w.during_end > last + 1e-9 || w.before_end <= w.before_begin ||
        w.during_end <= w.during_begin)
        throw std::out_of_range("jump window outside series range");
    auto mean_in = [&](double begin, double end) {
        double sum = 0.0;
        int n = 0;
        for (std::size_t p = 0; p < series.poll_count(); ++p) {
            const double t = series.times()[p];
            if (t >= begin && t < end) {
                sum += series.at(p, link).utilization;
                ++n;
            }
        }
        if (n == 0) throw std::out_of_range("jump window contains no poll instant");
        return sum / n;
    };
    return mean_in(w.during_begin, w.during_end) - mean_in(w.before_begin, w.before_end);
}

} // namespace xfire
