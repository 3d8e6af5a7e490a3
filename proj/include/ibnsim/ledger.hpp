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
#include <string>
#include <utility>
#include <vector>

namespace ibnsim {

/// A batch of claims committed all-or-nothing by ReservationLedger::commit.
class ReservationTransaction {
public:
    struct SpectrumClaim {
        IntentId holder;
        std::vector<LinkKey> links;
        SlotRange range;
    };
    struct PortClaim {
        IntentId holder;
        NodeId node;
        double rate{};
        std::uint32_t ports{};
    };
    struct AddDropClaim {
        IntentId holder;
        NodeId node;
    };

    void claim_spectrum(IntentId holder, std::vector<LinkKey> links, SlotRange range)
    {
        spectrum_.push_back({holder, std::move(links), range});
    }
    void claim_ports(IntentId holder, NodeId node, double rate, std::uint32_t ports)
    {
        ports_.push_back({holder, node, rate, ports});
    }
    void claim_add_drop(IntentId holder, NodeId node) { add_drop_.push_back({holder, node}); }

    const std::vector<SpectrumClaim>& spectrum() const { return spectrum_; }
    const std::vector<PortClaim>& ports() const { return ports_; }
    const std::vector<AddDropClaim>& add_drop() const { return add_drop_; }
    bool empty() const { return spectrum_.empty() && ports_.empty() && add_drop_.empty(); }

private:
    std::vector<SpectrumClaim> spectrum_;
    std::vector<PortClaim> ports_;
    std::vector<AddDropClaim> add_drop_;
};

enum class ConflictKind { kSpectrum, kPorts, kAddDrop, kLinkDown, kUnknownResource };

struct Conflict {
    ConflictKind kind;
    std::string detail;
};

/// Authoritative record of which intent holds which spectrum slots, router
/// ports and OXC add/drop terminations. The graph's slot grids and usage
/// counters are kept as a derived view.
class ReservationLedger {
public:
    struct PortHolding {
        IntentId holder;
        double rate{};
        std::uint32_t ports{};

        bool operator==(const PortHolding&) const = default;
    };

    /// Validates every claim against the current holdings, then applies them
    /// all. On conflict nothing is changed.
    std::optional<Conflict> commit(NetworkGraph& graph, const ReservationTransaction& txn);

    /// Releases everything held by `holder`. Returns true if anything was held.
    bool release(NetworkGraph& graph, IntentId holder);

    bool holds_anything(IntentId holder) const;
    bool empty() const { return spectrum_.empty() && ports_.empty() && add_drop_.empty(); }

    const std::map<std::pair<LinkKey, std::uint32_t>, IntentId>& spectrum_holdings() const { return spectrum_; }
    const std::map<NodeId, std::vector<PortHolding>>& port_holdings() const { return ports_; }
    const std::map<NodeId, std::vector<IntentId>>& add_drop_holdings() const { return add_drop_; }

    /// True when the graph's derived views match the ledger exactly.
    bool consistent_with(const NetworkGraph& graph) const;

    bool operator==(const ReservationLedger&) const = default;

private:
    std::map<std::pair<LinkKey, std::uint32_t>, IntentId> spectrum_;
    std::map<NodeId, std::vector<PortHolding>> ports_;
    std::map<NodeId, std::vector<IntentId>> add_drop_;
};

} // namespace ibnsim
