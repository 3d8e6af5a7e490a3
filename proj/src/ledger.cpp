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

#include "ibnsim/ledger.hpp"

#include <algorithm>
#include <set>

namespace ibnsim {

std::optional<Conflict> ReservationLedger::commit(NetworkGraph& graph, const ReservationTransaction& txn)
{
    // Validate against ledger holdings plus earlier claims of the same batch.
    std::set<std::pair<LinkKey, std::uint32_t>> claimed;
    for (const auto& c : txn.spectrum()) {
        for (const auto& key : c.links) {
            const FiberLink* link = graph.find_link(key.a, key.b);
            if (link == nullptr) {
                return Conflict{ConflictKind::kUnknownResource, "no link " + to_string(key)};
            }
            if (!link->operational) {
                return Conflict{ConflictKind::kLinkDown, to_string(key) + " is down"};
            }
            if (c.range.first == 0 || c.range.last() > graph.grid_size()) {
                return Conflict{ConflictKind::kUnknownResource, "slot range outside grid on " + to_string(key)};
            }
            for (std::uint32_t s = c.range.first; s <= c.range.last(); ++s) {
                auto slot = std::make_pair(link->endpoints, s);
                if (spectrum_.contains(slot) || !claimed.insert(slot).second) {
                    return Conflict{ConflictKind::kSpectrum,
                                    "slot " + std::to_string(s) + " on " + to_string(key) + " is held"};
                }
            }
        }
    }
    std::map<NodeId, std::uint32_t> port_demand;
    for (const auto& c : txn.ports()) {
        if (!graph.has_node(c.node)) {
            return Conflict{ConflictKind::kUnknownResource, "no router " + to_string(c.node)};
        }
        const RouterView& r = graph.router(c.node);
        std::uint32_t& demand = port_demand[c.node];
        demand += c.ports;
        if (r.ports_used + demand > r.port_count) {
            return Conflict{ConflictKind::kPorts, "router " + to_string(c.node) + " is out of ports"};
        }
    }
    std::map<NodeId, std::uint32_t> add_drop_demand;
    for (const auto& c : txn.add_drop()) {
        if (!graph.has_node(c.node)) {
            return Conflict{ConflictKind::kUnknownResource, "no OXC " + to_string(c.node)};
        }
        const OxcView& o = graph.oxc(c.node);
        if (o.add_drop_used + ++add_drop_demand[c.node] > o.add_drop_capacity) {
            return Conflict{ConflictKind::kAddDrop, "OXC " + to_string(c.node) + " has no free add/drop"};
        }
    }

    for (const auto& c : txn.spectrum()) {
        for (const auto& key : c.links) {
            FiberLink& link = graph.mutable_link(key);
            for (std::uint32_t s = c.range.first; s <= c.range.last(); ++s) {
                spectrum_.emplace(std::make_pair(link.endpoints, s), c.holder);
                link.slots[s - 1] = c.holder;
            }
        }
    }
    for (const auto& c : txn.ports()) {
        ports_[c.node].push_back({c.holder, c.rate, c.ports});
        graph.mutable_router(c.node).ports_used += c.ports;
    }
    for (const auto& c : txn.add_drop()) {
        add_drop_[c.node].push_back(c.holder);
        graph.mutable_oxc(c.node).add_drop_used += 1;
    }
    return std::nullopt;
}

bool ReservationLedger::release(NetworkGraph& graph, IntentId holder)
{
    bool any = false;
    for (auto it = spectrum_.begin(); it != spectrum_.end();) {
        if (it->second == holder) {
            graph.mutable_link(it->first.first).slots[it->first.second - 1] = std::nullopt;
            it = spectrum_.erase(it);
            any = true;
        } else {
            ++it;
        }
    }
    for (auto it = ports_.begin(); it != ports_.end();) {
        auto& holdings = it->second;
        for (auto h = holdings.begin(); h != holdings.end();) {
            if (h->holder == holder) {
                graph.mutable_router(it->first).ports_used -= h->ports;
                h = holdings.erase(h);
                any = true;
            } else {
                ++h;
            }
        }
        it = holdings.empty() ? ports_.erase(it) : std::next(it);
    }
    for (auto it = add_drop_.begin(); it != add_drop_.end();) {
        auto& holders = it->second;
        auto removed = std::erase(holders, holder);
        if (removed > 0) {
            graph.mutable_oxc(it->first).add_drop_used -= static_cast<std::uint32_t>(removed);
            any = true;
        }
        it = holders.empty() ? add_drop_.erase(it) : std::next(it);
    }
    return any;
}

bool ReservationLedger::holds_anything(IntentId holder) const
{
    for (const auto& [_, h] : spectrum_) {
        if (h == holder) {
            return true;
        }
    }
    for (const auto& [_, hs] : ports_) {
        for (const auto& h : hs) {
            if (h.holder == holder) {
                return true;
            }
        }
    }
    for (const auto& [_, hs] : add_drop_) {
        if (std::find(hs.begin(), hs.end(), holder) != hs.end()) {
            return true;
        }
    }
    return false;
}

bool ReservationLedger::consistent_with(const NetworkGraph& graph) const
{
    for (const auto& [key, link] : graph.fiber_links()) {
        for (std::uint32_t s = 1; s <= graph.grid_size(); ++s) {
            auto it = spectrum_.find({key, s});
            std::optional<IntentId> expected;
            if (it != spectrum_.end()) {
                expected = it->second;
            }
            if (link.slots[s - 1] != expected) {
                return false;
            }
        }
    }
    for (const auto& [slot, _] : spectrum_) {
        if (graph.find_link(slot.first.a, slot.first.b) == nullptr) {
            return false;
        }
    }
    for (const auto& [node, router] : graph.routers()) {
        std::uint32_t used = 0;
        if (auto it = ports_.find(node); it != ports_.end()) {
            for (const auto& h : it->second) {
                used += h.ports;
            }
        }
        if (used != router.ports_used) {
            return false;
        }
    }
    for (const auto& [node, oxc] : graph.oxcs()) {
        std::uint32_t used = 0;
        if (auto it = add_drop_.find(node); it != add_drop_.end()) {
            used = static_cast<std::uint32_t>(it->second.size());
        }
        if (used != oxc.add_drop_used) {
            return false;
        }
    }
    return true;
}

} // namespace ibnsim
