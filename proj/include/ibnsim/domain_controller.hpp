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
#include "ibnsim/intent.hpp"
#include "ibnsim/ledger.hpp"
#include "ibnsim/network_graph.hpp"

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace ibnsim {

enum class RecoveryPolicy { kNone, kAutoRecompile };

std::string_view to_string(RecoveryPolicy policy);
std::optional<RecoveryPolicy> parse_recovery_policy(std::string_view text);

struct DomainConfig {
    std::vector<TransmissionMode> modes = default_mode_table();
    std::size_t k_paths = 3;
    RecoveryPolicy recovery = RecoveryPolicy::kAutoRecompile;
};

/// Fiber link whose endpoints live in different domains, seen from one side.
struct BorderLink {
    NodeId local;
    NodeId remote;
    double length{};

    bool operator==(const BorderLink&) const = default;
};

enum class MessageKind { kDelegate, kStateNotify, kInstall, kUninstall, kAck };

std::string_view to_string(MessageKind kind);

/// Inter-domain protocol unit.
///
///   DELEGATE      payload + parent_ref (sender's RemoteIntent id)
///   STATE_NOTIFY  remote_id (sender's intent) + parent_ref + state
///   INSTALL       remote_id (receiver's intent)
///   UNINSTALL     remote_id (receiver's intent); withdraw also deletes it
///   ACK           remote_id (sender's former intent), answers a withdraw
struct Message {
    MessageKind kind = MessageKind::kAck;
    DomainId from{};
    DomainId to{};
    std::uint64_t seq{};
    std::optional<IntentId> remote_id;
    std::optional<IntentId> parent_ref;
    IntentState state = IntentState::kUncompiled;
    std::optional<ConnectivityIntent> payload;
    bool withdraw = false;

    bool operator==(const Message&) const = default;
};

std::string to_string(const Message& msg);

/// Book-keeping for an intent received through DELEGATE.
struct Delegation {
    DomainId origin{};
    IntentId origin_ref;
    std::optional<IntentState> last_notified;
    bool reply_due = true;
};

/// One autonomous domain: centralized state for its own nodes, plus stubs of
/// neighbor border nodes whose border links it administers.
class DomainController {
public:
    DomainController(DomainId id, NetworkGraph graph, DomainConfig config = {});

    DomainId id() const { return id_; }

    NetworkGraph& graph() { return graph_; }
    const NetworkGraph& graph() const { return graph_; }
    IntentDAG& dag() { return dag_; }
    const IntentDAG& dag() const { return dag_; }
    ReservationLedger& ledger() { return ledger_; }
    const ReservationLedger& ledger() const { return ledger_; }
    const DomainConfig& config() const { return config_; }
    void set_config(DomainConfig config) { config_ = std::move(config); }

    // Global node ownership. NodeIds embed their domain, but only nodes listed
    // here are known to exist.
    void register_node(NodeId node) { registry_.insert(node); }
    bool knows_node(NodeId node) const { return registry_.contains(node); }
    const std::set<NodeId>& registry() const { return registry_; }

    void add_border_link(const BorderLink& link);
    const std::vector<BorderLink>& border_links() const { return border_links_; }
    std::vector<DomainId> neighbors() const;

    /// Static routing table: hop count to `destination` when leaving via `neighbor`.
    void set_route(DomainId destination, DomainId neighbor, std::uint32_t hops);
    /// Neighbor with the fewest hops to `destination`, lower id on ties.
    std::optional<DomainId> next_hop(DomainId destination) const;

    void set_node_name(NodeId node, std::string name) { names_[node] = std::move(name); }
    const std::map<NodeId, std::string>& node_names() const { return names_; }

    /// A node of this domain (as opposed to a border stub).
    bool owns(NodeId node) const { return node.domain == id_; }

    // Mailboxes.
    void post(Message msg);
    std::vector<Message> take_outgoing();
    bool has_outgoing() const;

    // Coordination state.
    std::map<IntentId, Delegation>& delegations() { return delegations_; }
    const std::map<IntentId, Delegation>& delegations() const { return delegations_; }
    std::set<IntentId>& awaiting_reply() { return awaiting_; }
    const std::set<IntentId>& awaiting_reply() const { return awaiting_; }
    std::set<IntentId>& pending_installs() { return pending_installs_; }
    const std::set<IntentId>& pending_installs() const { return pending_installs_; }
    std::uint64_t acks_received() const { return acks_received_; }
    void count_ack() { ++acks_received_; }

private:
    DomainId id_;
    NetworkGraph graph_;
    IntentDAG dag_;
    ReservationLedger ledger_;
    DomainConfig config_;
    std::set<NodeId> registry_;
    std::vector<BorderLink> border_links_;
    std::map<DomainId, std::map<DomainId, std::uint32_t>> routes_;
    std::map<NodeId, std::string> names_;

    std::map<DomainId, std::deque<Message>> outbox_;
    std::uint64_t next_seq_ = 1;

    std::map<IntentId, Delegation> delegations_;
    std::set<IntentId> awaiting_;
    std::set<IntentId> pending_installs_;
    std::uint64_t acks_received_ = 0;
};

} // namespace ibnsim
