/*
 * Copyright 2026 The ibnsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include "ibnsim/ids.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <vector>

namespace ibnsim {

class ReservationLedger;

/// Electrical-layer view of a node.
struct RouterView {
    NodeId node;
    std::uint32_t port_count{};
    double port_rate{};     // Gbps per port
    std::uint32_t ports_used{};

    bool operator==(const RouterView&) const = default;
};

/// Optical-layer view of a node.
struct OxcView {
    NodeId node;
    std::uint32_t add_drop_capacity{};
    std::uint32_t add_drop_used{};

    bool operator==(const OxcView&) const = default;
};

/// One operating point of a pluggable transceiver.
struct TransmissionMode {
    double rate{};          // Gbps
    double reach{};         // km
    std::uint32_t slots{};  // contiguous spectrum slots

    bool operator==(const TransmissionMode&) const = default;
};

/// Overridable defaults loosely following OpenZR+ operating points.
std::vector<TransmissionMode> default_mode_table();

/// Contiguous spectrum block. Slot indices are 1-based: [first, first+width-1].
struct SlotRange {
    std::uint32_t first{};
    std::uint32_t width{};

    std::uint32_t last() const { return first + width - 1; }
    bool contains(std::uint32_t slot) const { return slot >= first && slot <= last(); }

    bool operator==(const SlotRange&) const = default;
};

using Path = std::vector<NodeId>;

struct FiberLink {
    LinkKey endpoints;
    double length{};  // km
    // slots[i] holds slot index i+1.
    std::vector<std::optional<IntentId>> slots;
    bool operational = true;

    bool operator==(const FiberLink&) const = default;
};

/// Electrical adjacency created by an installed lightpath.
struct VirtualLink {
    LinkKey endpoints;
    double capacity{};  // Gbps
    IntentId lightpath;

    bool operator==(const VirtualLink&) const = default;
};

/// Restrictions applied during path search. Empty predicates admit everything.
struct PathFilter {
    std::function<bool(const FiberLink&)> link_allowed;
    // Consulted for intermediate nodes only; endpoints are always allowed.
    std::function<bool(NodeId)> transit_allowed;
};

/// Two-layer topology of one domain. Spectrum and port usage are written only
/// by ReservationLedger, which is the authoritative record of holdings.
class NetworkGraph {
public:
    static constexpr std::uint32_t kDefaultGridSize = 80;

    explicit NetworkGraph(std::uint32_t grid_size = kDefaultGridSize);

    std::uint32_t grid_size() const { return grid_size_; }

    void add_node(const RouterView& router, const OxcView& oxc);
    void add_fiber_link(NodeId a, NodeId b, double length_km);

    bool has_node(NodeId id) const { return routers_.contains(id); }
    std::size_t node_count() const { return routers_.size(); }
    std::vector<NodeId> nodes() const;

    const RouterView& router(NodeId id) const;
    const OxcView& oxc(NodeId id) const;
    const std::map<NodeId, RouterView>& routers() const { return routers_; }
    const std::map<NodeId, OxcView>& oxcs() const { return oxcs_; }

    const std::map<LinkKey, FiberLink>& fiber_links() const { return links_; }
    const FiberLink* find_link(NodeId a, NodeId b) const;
    const FiberLink& link(const LinkKey& key) const;
    void set_operational(const LinkKey& key, bool up);

    const std::vector<VirtualLink>& virtual_links() const { return virtual_links_; }
    void add_virtual_link(const VirtualLink& vl);
    void remove_virtual_links_of(IntentId lightpath);

    /// Links traversed by consecutive hops; throws kBrokenPath on a gap.
    std::vector<LinkKey> path_links(std::span<const NodeId> path) const;

    /// Sum of link lengths, accumulated from the first hop onward.
    double path_length(std::span<const NodeId> path) const;

    /// Up to k loop-free paths ordered by (length, node sequence).
    std::vector<Path> k_shortest_paths(NodeId src, NodeId dst, std::size_t k,
                                       const PathFilter& filter = {}) const;

    /// Sorted 1-based slot indices free on every link of the path.
    std::vector<std::uint32_t> free_slot_blocks(std::span<const NodeId> path) const;

    std::size_t reserved_slot_count() const;

    bool operator==(const NetworkGraph&) const = default;

private:
    friend class ReservationLedger;

    FiberLink& mutable_link(const LinkKey& key);
    RouterView& mutable_router(NodeId id);
    OxcView& mutable_oxc(NodeId id);

    std::uint32_t grid_size_;
    std::map<NodeId, RouterView> routers_;
    std::map<NodeId, OxcView> oxcs_;
    std::map<LinkKey, FiberLink> links_;
    std::vector<VirtualLink> virtual_links_;
};

} // namespace ibnsim
