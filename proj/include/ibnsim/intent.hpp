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
#include "ibnsim/network_graph.hpp"

#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace ibnsim {

enum class IntentState { kUncompiled, kCompiled, kInstalled, kFailed };

std::string_view to_string(IntentState state);
std::optional<IntentState> parse_intent_state(std::string_view text);

/// Lifecycle edges accepted by IntentDAG::transition.
bool is_allowed_transition(IntentState from, IntentState to);

/// High-level objective: connect src to dst at `rate` Gbps.
struct ConnectivityIntent {
    NodeId src;
    NodeId dst;
    double rate{};
    std::vector<LinkKey> excluded_links;

    bool operator==(const ConnectivityIntent&) const = default;
};

/// Low-level spectrum allocation along a fiber path.
struct LightpathIntent {
    Path path;
    TransmissionMode mode;
    SlotRange slots;

    bool operator==(const LightpathIntent&) const = default;
};

/// Low-level router port allocation.
struct RouterPortIntent {
    NodeId node;
    double rate{};

    bool operator==(const RouterPortIntent&) const = default;
};

/// Stand-in for an intent delegated to a neighbor domain. `remote_id` is
/// unknown until the neighbor's first state notification arrives.
struct RemoteIntent {
    DomainId neighbor{};
    std::optional<IntentId> remote_id;
    IntentState mirrored_state = IntentState::kUncompiled;

    bool operator==(const RemoteIntent&) const = default;
};

using IntentPayload = std::variant<ConnectivityIntent, LightpathIntent, RouterPortIntent, RemoteIntent>;

std::string_view kind_name(const IntentPayload& payload);

/// Intent store of one domain. Leaves carry authoritative lifecycle states;
/// interior nodes cache the aggregate of their subtree.
class IntentDAG {
public:
    struct Node {
        IntentPayload payload;
        IntentState state = IntentState::kUncompiled;
        std::vector<IntentId> children;  // sorted
        std::vector<IntentId> parents;   // sorted

        bool operator==(const Node&) const = default;
    };

    explicit IntentDAG(DomainId owner = 0);

    /// Rebuilds a DAG from stored parts, validating ids, edges and acyclicity.
    static IntentDAG from_parts(DomainId owner, std::uint64_t next_serial, std::map<IntentId, Node> nodes);

    DomainId owner() const { return owner_; }
    std::uint64_t next_serial() const { return next_serial_; }

    IntentId add_intent(IntentPayload payload);
    IntentId add_child(IntentId parent, IntentPayload payload);
    void link_nodes(IntentId parent, IntentId child);

    /// Moves a leaf along an allowed lifecycle edge and refreshes ancestors.
    IntentState transition(IntentId id, IntentState to);

    /// Pure recomputation from leaf states.
    IntentState aggregate_state(IntentId id) const;

    /// Removes an uncompiled/compiled intent together with descendants that
    /// no surviving node still references.
    void remove_intent(IntentId id);

    /// Structural removal without the lifecycle check; the caller must have
    /// released every resource held in the subtree.
    void erase_subtree(IntentId id);

    /// Drops every exclusive descendant and turns `id` into a leaf in `state`.
    void detach_children(IntentId id, IntentState state);

    void set_mirrored_state(IntentId id, IntentState state);
    void bind_remote_id(IntentId id, IntentId remote_id);

    bool contains(IntentId id) const { return nodes_.contains(id); }
    std::size_t size() const { return nodes_.size(); }
    bool empty() const { return nodes_.empty(); }

    const Node& node(IntentId id) const;
    const IntentPayload& payload(IntentId id) const { return node(id).payload; }
    /// Cached state (own state for leaves, last aggregate for interior nodes).
    IntentState state(IntentId id) const { return node(id).state; }
    const std::vector<IntentId>& children(IntentId id) const { return node(id).children; }
    const std::vector<IntentId>& parents(IntentId id) const { return node(id).parents; }
    bool is_leaf(IntentId id) const { return node(id).children.empty(); }

    const std::map<IntentId, Node>& nodes() const { return nodes_; }
    std::vector<IntentId> ids() const;
    std::vector<IntentId> roots() const;
    std::vector<std::pair<IntentId, IntentId>> edges() const;
    /// Descendants of `id` (excluding `id`) in ascending id order.
    std::vector<IntentId> descendants(IntentId id) const;
    /// Topmost ancestors of `id`; `id` itself when it has no parents.
    std::vector<IntentId> root_ancestors(IntentId id) const;

    /// Kahn's algorithm over the stored edges.
    bool is_acyclic() const;

    bool operator==(const IntentDAG&) const = default;

private:
    IntentId allocate_id();
    Node& mutable_node(IntentId id);
    void validate_payload(const IntentPayload& payload) const;
    bool reachable(IntentId from, IntentId to) const;
    void refresh_ancestors(IntentId id);
    void erase_nodes(const std::vector<IntentId>& doomed);
    std::vector<IntentId> exclusive_descendants(IntentId id) const;

    DomainId owner_;
    std::uint64_t next_serial_ = 1;
    std::map<IntentId, Node> nodes_;
};

} // namespace ibnsim
