#pragma once

#include <compare>
#include <cstddef>
#include <string>
#include <vector>

#include <json.hpp>

namespace xfire {

struct NodeId {
    int value = -1;
    auto operator<=>(const NodeId&) const = default;
};

struct HostId {
    int value = -1;
    auto operator<=>(const HostId&) const = default;
};

struct LinkId {
    int value = -1;
    auto operator<=>(const LinkId&) const = default;
};

enum class HostRole { bot, client, decoy, bg_generator };

enum class LinkKind {
    host_edge,      // bot/client to access switch
    access,         // access switch to aggregation switch 5
    target,         // switch 5 to switch 7
    branch,         // switch 7 to a leaf switch
    injection,      // switch 6 to switch 7
    decoy_edge,     // leaf switch to decoy server
    generator_edge, // background generator to its switch
};

const char* to_string(HostRole role);
const char* to_string(LinkKind kind);

struct Host {
    HostId id;
    HostRole role = HostRole::client;
    int attach_switch = 0; // 1-based switch number
    std::string name;
};

/// Undirected link. Endpoint a is the upstream side (toward the traffic
/// sources), b the downstream side (toward the decoys).
struct Link {
    LinkId id;
    NodeId a;
    NodeId b;
    double capacity_bps = 0.0;
    double delay_ms = 0.0;
    int level = 0; // 0 = target link, >0 server side hops, <0 client side
    LinkKind kind = LinkKind::host_edge;
};

/// One traversal step of a route.
struct Hop {
    LinkId link;
    bool forward = true; // traversed a -> b
};

/// Per-link overrides applied after the uniform build.
struct LinkOverride {
    LinkId link;
    double capacity_bps = 0.0;
    double delay_ms = 0.0;
};

/// Sub-tree topology: access switches 1-4 feed aggregation switch 5, the
/// target link joins 5 to the server-side root 7, switch 6 hangs off 7 as the
/// background injection point, and leaf switches 8.. each serve 10 decoys.
class Topology {
public:
    static constexpr int kBots = 10;
    static constexpr int kClients = 10;
    static constexpr int kDecoysPerLeaf = 10;
    static constexpr int kCoreSwitches = 7;

    int n_subtrees() const { return n_subtrees_; }
    int switch_count() const { return kCoreSwitches + n_subtrees_; }
    std::size_t node_count() const { return static_cast<std::size_t>(switch_count()) + hosts_.size(); }

    const std::vector<Host>& hosts() const { return hosts_; }
    const std::vector<Link>& links() const { return links_; }
    const Host& host(HostId id) const;
    const Link& link(LinkId id) const;
    LinkId target_link() const { return target_link_; }

    std::vector<HostId> hosts_with_role(HostRole role) const;
    std::vector<HostId> bots() const { return hosts_with_role(HostRole::bot); }
    std::vector<HostId> clients() const { return hosts_with_role(HostRole::client); }
    std::vector<HostId> decoys() const { return hosts_with_role(HostRole::decoy); }
    std::vector<int> leaf_switches() const;
    std::vector<HostId> decoys_on_leaf(int leaf_switch) const;

    NodeId switch_node(int switch_number) const;
    NodeId host_node(HostId id) const;
    bool is_switch(NodeId node) const { return node.value < switch_count(); }
    std::string node_name(NodeId node) const;

    /// The unique tree path between two hosts, in traversal order.
    std::vector<Hop> route_hops(HostId src, HostId dst) const;
    std::vector<LinkId> route(HostId src, HostId dst) const;

    /// Server-side links at the given hop distance from the target link that
    /// lead toward decoys. Level 0 is the target link; negative levels return
    /// client-side links.
    std::vector<LinkId> links_at_level(int level) const;

    /// Decoys whose route from the client side crosses the link.
    std::vector<HostId> decoys_behind(LinkId link) const;

    int depth(NodeId node) const { return depth_.at(static_cast<std::size_t>(node.value)); }

    nlohmann::json to_json() const;

    friend Topology build_topology(int, double, double, const std::vector<LinkOverride>&);

private:
    void index();
    NodeId parent(NodeId node) const { return NodeId{parent_[static_cast<std::size_t>(node.value)]}; }
    LinkId parent_link(NodeId node) const { return LinkId{parent_link_[static_cast<std::size_t>(node.value)]}; }

    int n_subtrees_ = 0;
    std::vector<Host> hosts_;
    std::vector<Link> links_;
    LinkId target_link_;
    // Tree rooted at switch 7.
    std::vector<int> parent_;
    std::vector<int> parent_link_;
    std::vector<int> depth_;
    std::vector<bool> leads_to_decoy_;
};

/// Build the n-sub-tree topology with uniform link capacity (bits/s) and
/// delay (ms). Throws std::invalid_argument for n_subtrees < 1 or
/// non-positive capacity.
Topology build_topology(int n_subtrees, double capacity_bps, double delay_ms,
                        const std::vector<LinkOverride>& overrides = {});

} // namespace xfire
