#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <vector>

#include "xfire/attack.hpp"
#include "xfire/topology.hpp"
#include "xfire/traffic.hpp"

namespace xfire {

enum class SampleLabel { normal, warmup, attack };
const char* to_string(SampleLabel label);

struct LinkSample {
    double t = 0.0;
    LinkId link;
    double offered_bps = 0.0; // mean offered load over the poll interval
    double utilization = 0.0; // min(offered, capacity) / capacity
    int flow_count = 0;       // flows with traffic on the link during the interval
    SampleLabel label = SampleLabel::normal;
    double attack_bps = 0.0;   // part of offered_bps that comes from attack flows
    double carried_bits = 0.0; // bits forwarded over the interval
};

struct Scenario {
    std::shared_ptr<const Topology> topology;
    std::vector<FlowSpec> flows;
    std::optional<AttackPlan> attack_plan;
    double sim_duration = 1800.0;
    double tick = 1.0;
    double poll_interval = 5.0;
    double saturation_threshold = 0.999;

    void validate() const;
};

/// Polled link statistics, sample-major: all links at poll 0, then poll 1...
class LinkSampleSeries {
public:
    LinkSampleSeries() = default;
    LinkSampleSeries(std::shared_ptr<const Topology> topology, std::vector<double> times, double poll_interval);

    const Topology& topology() const { return *topology_; }
    std::size_t poll_count() const { return times_.size(); }
    std::size_t link_count() const { return n_links_; }
    const std::vector<double>& times() const { return times_; }
    double poll_interval() const { return poll_interval_; }

    LinkSample& at(std::size_t poll, LinkId link);
    const LinkSample& at(std::size_t poll, LinkId link) const;

    std::vector<double> utilization(LinkId link) const;
    std::vector<double> offered(LinkId link) const;
    std::vector<double> volume_bits(LinkId link) const;
    std::vector<SampleLabel> labels() const;

    /// Index of the poll at time t; throws if t is not a poll instant.
    std::size_t poll_index(double t) const;

    const std::optional<WarmupWindow>& warmup() const { return warmup_; }
    void set_warmup(std::optional<WarmupWindow> w) { warmup_ = w; }

    /// `t,link_id,offered_bps,utilization,flow_count,label`
    void write_csv(std::ostream& out) const;

private:
    std::shared_ptr<const Topology> topology_;
    std::vector<double> times_;
    double poll_interval_ = 5.0;
    std::size_t n_links_ = 0;
    std::vector<LinkSample> samples_;
    std::optional<WarmupWindow> warmup_;
};

/// Fluid simulation. Each tick, flows are pushed through their routes in
/// path order; a link whose aggregate exceeds capacity scales every flow on
/// it by capacity/aggregate before the traffic moves on.
LinkSampleSeries run(const Scenario& scenario);

struct JumpWindow {
    double before_begin = 0.0;
    double before_end = 0.0;
    double during_begin = 0.0;
    double during_end = 0.0;
};

/// Mean utilization over polls in [during_begin, during_end) minus the mean
/// over [before_begin, before_end).
double downstream_jump(const LinkSampleSeries& series, LinkId link, const JumpWindow& window);

} // namespace xfire
