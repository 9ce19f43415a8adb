#include "xfire/topology.hpp"

#include <algorithm>
#include <queue>
#include <stdexcept>

#include <fmt/format.h>

namespace xfire {

const char* to_string(HostRole role) {
    switch (role) {
    case HostRole::bot: return "bot";
    case HostRole::client: return "client";
    case HostRole::decoy: return "decoy";
    case HostRole::bg_generator: return "bg_generator";
    }
    return "?";
}

const char* to_string(LinkKind kind) {
    switch (kind) {
    case LinkKind::host_edge: return "host_edge";
    case LinkKind::access: return "access";
    case LinkKind::target: return "target";
    case LinkKind::branch: return "branch";
    case LinkKind::injection: return "injection";
    case LinkKind::decoy_edge: return "decoy_edge";
    case LinkKind::generator_edge: return "generator_edge";
    }
    return "?";
}

const Host& Topology::host(HostId id) const {
    if (id.value < 0 || static_cast<std::size_t>(id.value) >= hosts_.size())
        throw std::out_of_range(fmt::format("unknown host id {}", id.value));
    return hosts_[static_cast<std::size_t>(id.value)];
}

const Link& Topology::link(LinkId id) const {
    if (id.value < 0 || static_cast<std::size_t>(id.value) >= links_.size())
        throw std::out_of_range(fmt::format("unknown link id {}", id.value));
    return links_[static_cast<std::size_t>(id.value)];
}

std::vector<HostId> Topology::hosts_with_role(HostRole role) const {
    std::vector<HostId> out;
    for (const auto& h : hosts_)
        if (h.role == role) out.push_back(h.id);
    return out;
}

std::vector<int> Topology::leaf_switches() const {
    std::vector<int> out;
    for (int s = kCoreSwitches + 1; s <= switch_count(); ++s) out.push_back(s);
    return out;
}

std::vector<HostId> Topology::decoys_on_leaf(int leaf_switch) const {
    std::vector<HostId> out;
    for (const auto& h : hosts_)
        if (h.role == HostRole::decoy && h.attach_switch == leaf_switch) out.push_back(h.id);
    return out;
}

NodeId Topology::switch_node(int switch_number) const {
    if (switch_number < 1 || switch_number > switch_count())
        throw std::out_of_range(fmt::format("unknown switch {}", switch_number));
    return NodeId{switch_number - 1};
}

NodeId Topology::host_node(HostId id) const {
    host(id);
    return NodeId{switch_count() + id.value};
}

std::string Topology::node_name(NodeId node) const {
    if (is_switch(node)) return fmt::format("s{}", node.value + 1);
    return host(HostId{node.value - switch_count()}).name;
}

std::vector<Hop> Topology::route_hops(HostId src, HostId dst) const {
    NodeId u = host_node(src);
    NodeId v = host_node(dst);
    std::vector<Hop> up;
    std::vector<Hop> down;
    // Climb from the deeper end until both meet at the lowest common ancestor.
    while (u != v) {
        if (depth(u) >= depth(v)) {
            LinkId l = parent_link(u);
            up.push_back({l, links_[static_cast<std::size_t>(l.value)].a == u});
            u = parent(u);
        } else {
            LinkId l = parent_link(v);
            down.push_back({l, links_[static_cast<std::size_t>(l.value)].b == v});
            v = parent(v);
        }
    }
    up.insert(up.end(), down.rbegin(), down.rend());
    return up;
}

std::vector<LinkId> Topology::route(HostId src, HostId dst) const {
    std::vector<LinkId> out;
    for (const auto& hop : route_hops(src, dst)) out.push_back(hop.link);
    return out;
}

std::vector<LinkId> Topology::links_at_level(int level) const {
    std::vector<LinkId> out;
    for (const auto& l : links_) {
        if (l.level != level) continue;
        if (level > 0 && !leads_to_decoy_[static_cast<std::size_t>(l.id.value)]) continue;
        out.push_back(l.id);
    }
    return out;
}

std::vector<HostId> Topology::decoys_behind(LinkId id) const {
    const Link& l = link(id);
    std::vector<HostId> out;
    for (const auto& h : hosts_) {
        if (h.role != HostRole::decoy) continue;
        // Walk up from the decoy; the link is "in front" of it if crossed in
        // the forward direction on the way from the target link.
        NodeId n = host_node(h.id);
        bool found = l.kind == LinkKind::target || l.level < 0;
        while (!found && n != switch_node(7)) {
            if (parent_link(n) == id) found = true;
            n = parent(n);
        }
        if (found) out.push_back(h.id);
    }
    return out;
}

void Topology::index() {
    const std::size_t n = node_count();
    std::vector<std::vector<std::pair<int, int>>> adj(n); // (neighbor, link)
    for (const auto& l : links_) {
        adj[static_cast<std::size_t>(l.a.value)].push_back({l.b.value, l.id.value});
        adj[static_cast<std::size_t>(l.b.value)].push_back({l.a.value, l.id.value});
    }
    parent_.assign(n, -1);
    parent_link_.assign(n, -1);
    depth_.assign(n, -1);
    const int root = switch_node(7).value;
    depth_[static_cast<std::size_t>(root)] = 0;
    std::queue<int> q;
    q.push(root);
    std::vector<int> order;
    while (!q.empty()) {
        int u = q.front();
        q.pop();
        order.push_back(u);
        for (auto [v, l] : adj[static_cast<std::size_t>(u)]) {
            if (depth_[static_cast<std::size_t>(v)] >= 0) continue;
            depth_[static_cast<std::size_t>(v)] = depth_[static_cast<std::size_t>(u)] + 1;
            parent_[static_cast<std::size_t>(v)] = u;
            parent_link_[static_cast<std::size_t>(v)] = l;
            q.push(v);
        }
    }
    if (order.size() != n) throw std::logic_error("topology is not connected");

    // A link leads to a decoy if the subtree below it (away from switch 7)
    // contains one.
    std::vector<bool> has_decoy(n, false);
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        int u = *it;
        if (!is_switch(NodeId{u}) && hosts_[static_cast<std::size_t>(u - switch_count())].role == HostRole::decoy)
            has_decoy[static_cast<std::size_t>(u)] = true;
        int p = parent_[static_cast<std::size_t>(u)];
        if (p >= 0 && has_decoy[static_cast<std::size_t>(u)]) has_decoy[static_cast<std::size_t>(p)] = true;
    }
    leads_to_decoy_.assign(links_.size(), false);
    for (std::size_t u = 0; u < n; ++u)
        if (parent_link_[u] >= 0)
            leads_to_decoy_[static_cast<std::size_t>(parent_link_[u])] = has_decoy[u];
}

nlohmann::json Topology::to_json() const {
    nlohmann::json nodes = nlohmann::json::array();
    for (int s = 1; s <= switch_count(); ++s)
        nodes.push_back({{"id", fmt::format("s{}", s)}, {"type", "switch"}});
    for (const auto& h : hosts_)
        nodes.push_back({{"id", h.name},
                         {"type", "host"},
                         {"role", to_string(h.role)},
                         {"attach_switch", fmt::format("s{}", h.attach_switch)}});
    nlohmann::json links = nlohmann::json::array();
    for (const auto& l : links_)
        links.push_back({{"id", l.id.value},
                         {"a", node_name(l.a)},
                         {"b", node_name(l.b)},
                         {"capacity_bps", l.capacity_bps},
                         {"delay_ms", l.delay_ms},
                         {"level", l.level},
                         {"kind", to_string(l.kind)}});
    return {{"n_subtrees", n_subtrees_},
            {"nodes", std::move(nodes)},
            {"links", std::move(links)},
            {"target_link", target_link_.value}};
}

Topology build_topology(int n_subtrees, double capacity_bps, double delay_ms,
                        const std::vector<LinkOverride>& overrides) {
    if (n_subtrees < 1) throw std::invalid_argument("n_subtrees must be at least 1");
    if (!(capacity_bps > 0.0)) throw std::invalid_argument("link capacity must be positive");
    if (delay_ms < 0.0) throw std::invalid_argument("link delay must be non-negative");

    Topology t;
    t.n_subtrees_ = n_subtrees;
    const int n_switches = Topology::kCoreSwitches + n_subtrees;

    auto add_host = [&](HostRole role, int sw, std::string name) {
        HostId id{static_cast<int>(t.hosts_.size())};
        t.hosts_.push_back({id, role, sw, std::move(name)});
        return id;
    };
    for (int i = 0; i < Topology::kBots; ++i)
        add_host(HostRole::bot, i < Topology::kBots / 2 ? 1 : 2, fmt::format("bot{}", i + 1));
    for (int i = 0; i < Topology::kClients; ++i)
        add_host(HostRole::client, i < Topology::kClients / 2 ? 3 : 4, fmt::format("client{}", i + 1));
    int decoy_no = 1;
    for (int leaf = Topology::kCoreSwitches + 1; leaf <= n_switches; ++leaf)
        for (int i = 0; i < Topology::kDecoysPerLeaf; ++i)
            add_host(HostRole::decoy, leaf, fmt::format("decoy{}", decoy_no++));
    for (int leaf = Topology::kCoreSwitches + 1; leaf <= n_switches; ++leaf)
        add_host(HostRole::bg_generator, leaf, fmt::format("gen{}", leaf));
    add_host(HostRole::bg_generator, 6, "gen6");

    auto sw = [](int number) { return NodeId{number - 1}; };
    auto hn = [&](const Host& h) { return NodeId{n_switches + h.id.value}; };
    auto add_link = [&](NodeId a, NodeId b, int level, LinkKind kind) {
        LinkId id{static_cast<int>(t.links_.size())};
        t.links_.push_back({id, a, b, capacity_bps, delay_ms, level, kind});
        return id;
    };

    for (int s = 1; s <= 4; ++s) add_link(sw(s), sw(5), -1, LinkKind::access);
    t.target_link_ = add_link(sw(5), sw(7), 0, LinkKind::target);
    add_link(sw(6), sw(7), 1, LinkKind::injection);
    for (int leaf = Topology::kCoreSwitches + 1; leaf <= n_switches; ++leaf)
        add_link(sw(7), sw(leaf), 1, LinkKind::branch);
    for (const auto& h : t.hosts_) {
        switch (h.role) {
        case HostRole::bot:
        case HostRole::client:
            add_link(hn(h), sw(h.attach_switch), -2, LinkKind::host_edge);
            break;
        case HostRole::decoy:
            add_link(sw(h.attach_switch), hn(h), 2, LinkKind::decoy_edge);
            break;
        case HostRole::bg_generator:
            add_link(hn(h), sw(h.attach_switch), 2, LinkKind::generator_edge);
            break;
        }
    }

    for (const auto& o : overrides) {
        if (o.link.value < 0 || static_cast<std::size_t>(o.link.value) >= t.links_.size())
            throw std::invalid_argument(fmt::format("override for unknown link {}", o.link.value));
        if (!(o.capacity_bps > 0.0) || o.delay_ms < 0.0)
            throw std::invalid_argument(fmt::format("invalid override for link {}", o.link.value));
        auto& l = t.links_[static_cast<std::size_t>(o.link.value)];
        l.capacity_bps = o.capacity_bps;
        l.delay_ms = o.delay_ms;
    }

    t.index();
    return t;
}

} // namespace xfire
