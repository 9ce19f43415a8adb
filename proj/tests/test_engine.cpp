#include <catch_amalgamated.hpp>

#include <algorithm>
#include <memory>
#include <sstream>

#include "xfire/attack.hpp"
#include "xfire/engine.hpp"

using namespace xfire;
using Catch::Approx;

namespace {

std::shared_ptr<const Topology> topo(int n) { return std::make_shared<const Topology>(build_topology(n, 2e6, 10)); }

FlowSpec constant_flow(HostId src, HostId dst, double bps, double start = 0, double duration = 1e9) {
    FlowSpec f;
    f.src = src;
    f.dst = dst;
    f.model = constant_model(bps, duration);
    f.start_offset = start;
    return f;
}

Scenario scenario(std::shared_ptr<const Topology> t, std::vector<FlowSpec> flows, double horizon = 100) {
    Scenario s;
    s.topology = std::move(t);
    s.flows = std::move(flows);
    s.sim_duration = horizon;
    return s;
}

// Every bot sends `per_bot` to every decoy, split evenly, from t = start.
std::vector<FlowSpec> bot_flood(const Topology& t, double per_bot, double start = 0) {
    std::vector<FlowSpec> flows;
    const auto decoys = t.decoys();
    for (auto b : t.bots())
        for (auto d : decoys) {
            auto f = constant_flow(b, d, per_bot / static_cast<double>(decoys.size()), start);
            f.attack = true;
            flows.push_back(f);
        }
    return flows;
}

} // namespace

TEST_CASE("single flow uses half of every link on its path") {
    auto t = topo(2);
    const auto bot = t->bots().front();
    const auto decoy = t->decoys().back();
    const auto series = run(scenario(t, {constant_flow(bot, decoy, 1e6)}));
    const auto path = t->route(bot, decoy);
    for (std::size_t p = 0; p < series.poll_count(); ++p)
        for (const auto& l : t->links()) {
            const bool on = std::find(path.begin(), path.end(), l.id) != path.end();
            CHECK(series.at(p, l.id).utilization == Approx(on ? 0.5 : 0.0));
            CHECK(series.at(p, l.id).flow_count == (on ? 1 : 0));
        }
}

TEST_CASE("ten bots at 0.25 Mbps saturate the target") {
    auto t = topo(4);
    const auto series = run(scenario(t, bot_flood(*t, 0.25e6)));
    for (std::size_t p = 0; p < series.poll_count(); ++p) {
        CHECK(series.at(p, t->target_link()).offered_bps == Approx(2.5e6));
        CHECK(series.at(p, t->target_link()).utilization == Approx(1.0));
    }
}

TEST_CASE("poll samples average the ticks since the previous poll") {
    auto t = topo(2);
    // Active from t=2: ticks 2,3,4 fall in the first poll interval [0,5).
    const auto series = run(scenario(t, {constant_flow(t->bots()[0], t->decoys()[0], 1e6, 2)}));
    CHECK(series.times().front() == 5.0);
    CHECK(series.at(0, t->target_link()).offered_bps == Approx(3e6 / 5));
    CHECK(series.at(0, t->target_link()).carried_bits == Approx(3e6));
    CHECK(series.at(1, t->target_link()).offered_bps == Approx(1e6));
}

TEST_CASE("clipping at the target conserves bits across the split") {
    auto t = topo(4);
    const auto series = run(scenario(t, bot_flood(*t, 0.4e6), 200));
    for (std::size_t p = 0; p < series.poll_count(); ++p) {
        const double into = series.at(p, t->target_link()).carried_bits;
        double out = 0.0, edges = 0.0;
        for (auto l : t->links_at_level(1)) out += series.at(p, l).offered_bps * series.poll_interval();
        for (auto l : t->links_at_level(2)) edges += series.at(p, l).carried_bits;
        CHECK(out == Approx(into).epsilon(1e-12));
        CHECK(edges == Approx(into).epsilon(1e-12));
        CHECK(into == Approx(2e6 * series.poll_interval()));
    }
}

TEST_CASE("utilization stays in [0, 1] under random overload") {
    auto t = topo(2);
    std::vector<FlowSpec> flows;
    std::uint64_t k = 0;
    for (auto s : t->bots())
        for (auto d : t->decoys()) {
            FlowSpec f;
            f.src = s;
            f.dst = d;
            f.model = default_model(ModelKind::bot, 1e9);
            f.model.scale = 0.05;
            f.seed = ++k;
            flows.push_back(f);
        }
    const auto series = run(scenario(t, flows, 300));
    bool saturated = false;
    for (std::size_t p = 0; p < series.poll_count(); ++p)
        for (const auto& l : t->links()) {
            const auto& s = series.at(p, l.id);
            REQUIRE(s.utilization >= 0.0);
            REQUIRE(s.utilization <= 1.0);
            REQUIRE(s.flow_count >= 0);
            REQUIRE(s.carried_bits <= l.capacity_bps * series.poll_interval() * (1 + 1e-12));
            saturated = saturated || s.utilization == 1.0;
        }
    CHECK(saturated);
}

TEST_CASE("adding a flow never lowers offered load") {
    auto t = topo(4);
    std::vector<FlowSpec> base;
    std::uint64_t k = 0;
    for (auto s : t->clients())
        for (auto d : t->decoys_on_leaf(8 + static_cast<int>(k++ % 4))) {
            FlowSpec f;
            f.src = s;
            f.dst = d;
            f.model = default_model(ModelKind::background1, 1e9);
            f.model.scale = 0.03;
            f.seed = k;
            base.push_back(f);
        }
    auto more = base;
    more.push_back(constant_flow(t->bots()[3], t->decoys()[17], 3e5, 40));
    const auto a = run(scenario(t, base, 200));
    const auto b = run(scenario(t, more, 200));

    // Nothing saturates here, so the rule holds on every link.
    for (std::size_t p = 0; p < a.poll_count(); ++p)
        for (const auto& l : t->links()) {
            REQUIRE(a.at(p, l.id).utilization < 1.0);
            REQUIRE(b.at(p, l.id).offered_bps >= a.at(p, l.id).offered_bps);
        }
}

TEST_CASE("added load never lowers offered load at or above the target, even when it saturates") {
    auto t = topo(4);
    auto base = bot_flood(*t, 0.15e6);
    auto more = base;
    for (auto c : t->clients()) more.push_back(constant_flow(c, t->decoys()[3], 2e5, 30));
    const auto a = run(scenario(t, base, 200));
    const auto b = run(scenario(t, more, 200));
    std::vector<LinkId> upstream{t->target_link()};
    for (const auto& l : t->links())
        if (l.level < 0) upstream.push_back(l.id);
    for (std::size_t p = 0; p < a.poll_count(); ++p)
        for (auto l : upstream) REQUIRE(b.at(p, l).offered_bps >= a.at(p, l).offered_bps);
    CHECK(b.at(a.poll_count() - 1, t->target_link()).utilization == 1.0);
}

TEST_CASE("identical scenarios produce identical series") {
    auto t = topo(2);
    std::vector<FlowSpec> flows;
    for (std::uint64_t i = 0; i < 20; ++i) {
        FlowSpec f;
        f.src = t->bots()[i % 10];
        f.dst = t->decoys()[i];
        f.model = default_model(ModelKind::background2, 1e9);
        f.model.scale = 0.1;
        f.seed = i;
        flows.push_back(f);
    }
    std::ostringstream x, y;
    run(scenario(t, flows, 300)).write_csv(x);
    run(scenario(t, flows, 300)).write_csv(y);
    CHECK(x.str() == y.str());
}

TEST_CASE("scenario validation") {
    auto t = topo(2);
    auto s = scenario(t, {});
    s.poll_interval = 5;
    s.tick = 2;
    CHECK_THROWS_AS(run(s), std::invalid_argument);
    s.tick = 1;
    s.sim_duration = 3;
    CHECK_THROWS_AS(run(s), std::invalid_argument);
    s.sim_duration = 100;
    s.flows.push_back(constant_flow(t->bots()[0], HostId{9999}, 1));
    CHECK_THROWS(run(s));
}

TEST_CASE("simultaneous full-rate bots saturate at the first poll") {
    auto t = topo(4);
    auto s = scenario(t, bot_flood(*t, 0.25e6, 300), 600);
    AttackPlan plan;
    plan.bots = t->bots();
    plan.target_links = {t->target_link()};
    plan.attack_start = 300;
    s.attack_plan = plan;
    const auto series = run(s);
    const auto warm = series.warmup();
    REQUIRE(warm);
    CHECK(warm->t_first_bot == 305);
    CHECK(warm->t_link_down == 305);
    CHECK(warm->length() <= series.poll_interval());
    CHECK(series.at(series.poll_index(305), t->target_link()).utilization >= 0.999);
}

TEST_CASE("downstream jump") {
    auto t = topo(2);
    auto flows = bot_flood(*t, 0.25e6, 300);
    flows.push_back(constant_flow(t->clients()[0], t->decoys()[0], 1e5));
    const auto series = run(scenario(t, flows, 600));
    const JumpWindow w{150, 300, 300, 600};

    // Client-side links of the access switch with no bots see nothing new.
    for (const auto& l : t->links())
        if (l.kind == LinkKind::access && l.level < 0) {
            bool carries_bots = false;
            for (auto b : t->bots()) {
                const auto p = t->route(b, t->decoys()[0]);
                carries_bots = carries_bots || std::find(p.begin(), p.end(), l.id) != p.end();
            }
            if (!carries_bots) CHECK(downstream_jump(series, l.id, w) == Approx(0.0).margin(1e-12));
        }
    // The clipped 2 Mbps splits evenly over the two branches. The client flow
    // (leaf 8 only) loses its share to clipping, so allow its 5% size.
    for (auto l : t->links_at_level(1)) CHECK(downstream_jump(series, l, w) == Approx(0.5).margin(0.05));
    CHECK_THROWS_AS(downstream_jump(series, t->target_link(), {-10, 100, 300, 600}), std::out_of_range);
    CHECK_THROWS_AS(downstream_jump(series, t->target_link(), {0, 100, 300, 900}), std::out_of_range);
}

TEST_CASE("labels follow the attack on the target") {
    auto t = topo(2);
    auto s = scenario(t, bot_flood(*t, 0.25e6, 300), 600);
    for (auto& f : s.flows) f.ramp = {RampProfile::Shape::linear, 0, f.model.constant_bps, 60};
    AttackPlan plan;
    plan.bots = t->bots();
    plan.attack_start = 300;
    s.attack_plan = plan;
    const auto series = run(s);
    const auto warm = series.warmup();
    REQUIRE(warm);
    const auto labels = series.labels();
    for (std::size_t p = 0; p < labels.size(); ++p) {
        const double tt = series.times()[p];
        const auto expect = tt < warm->t_first_bot    ? SampleLabel::normal
                            : tt < warm->t_link_down ? SampleLabel::warmup
                                                     : SampleLabel::attack;
        CHECK(labels[p] == expect);
    }
}
