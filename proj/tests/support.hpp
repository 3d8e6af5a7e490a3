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

#include "ibnsim/compilation.hpp"
#include "ibnsim/domain_controller.hpp"
#include "ibnsim/intent.hpp"
#include "ibnsim/network_graph.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include <fmt/format.h>

namespace ibnsim::testing {

inline NodeId n(DomainId d, std::uint32_t l)
{
    return NodeId{d, l};
}

inline void add_plain_node(NetworkGraph& g, NodeId id, std::uint32_t ports = 64, double port_rate = 100.0,
                           std::uint32_t add_drop = 64)
{
    g.add_node(RouterView{id, ports, port_rate, 0}, OxcView{id, add_drop, 0});
}

struct Edge {
    std::uint32_t a;
    std::uint32_t b;
    double length;
};

/// Single-domain graph with nodes 1..count of domain `d`.
inline NetworkGraph make_graph(std::uint32_t count, const std::vector<Edge>& edges,
                               std::uint32_t grid = NetworkGraph::kDefaultGridSize, DomainId d = 1)
{
    NetworkGraph g(grid);
    for (std::uint32_t i = 1; i <= count; ++i) {
        add_plain_node(g, n(d, i));
    }
    for (const auto& e : edges) {
        g.add_fiber_link(n(d, e.a), n(d, e.b), e.length);
    }
    return g;
}

inline DomainController make_domain(NetworkGraph g, DomainConfig config = {}, DomainId d = 1)
{
    DomainController dc(d, std::move(g), std::move(config));
    for (NodeId node : dc.graph().nodes()) {
        dc.register_node(node);
    }
    return dc;
}

/// Marks slots busy by committing a dummy holder through the ledger.
inline void occupy(DomainController& dc, IntentId holder, NodeId a, NodeId b, SlotRange range)
{
    ReservationTransaction txn;
    txn.claim_spectrum(holder, {LinkKey::of(a, b)}, range);
    if (dc.ledger().commit(dc.graph(), txn)) {
        throw std::logic_error("occupy failed");
    }
}

// Brute-force oracles -------------------------------------------------------

/// Every simple path from src to dst over operational links, transit limited
/// to nodes accepted by `transit`, sorted by (length, node sequence).
inline std::vector<std::pair<double, Path>> all_simple_paths(const NetworkGraph& g, NodeId src, NodeId dst,
                                                             const std::function<bool(const FiberLink&)>& link_ok = {},
                                                             const std::function<bool(NodeId)>& transit = {})
{
    std::vector<std::pair<double, Path>> out;
    Path cur{src};
    std::set<NodeId> seen{src};
    std::function<void()> dfs = [&]() {
        NodeId at = cur.back();
        if (at == dst) {
            // Sum in path order to match the library's accumulation.
            out.emplace_back(g.path_length(cur), cur);
            return;
        }
        if (at != src && transit && !transit(at)) {
            return;
        }
        for (const auto& [key, link] : g.fiber_links()) {
            if (!link.operational || !key.touches(at) || (link_ok && !link_ok(link))) {
                continue;
            }
            NodeId next = key.a == at ? key.b : key.a;
            if (seen.contains(next)) {
                continue;
            }
            seen.insert(next);
            cur.push_back(next);
            dfs();
            cur.pop_back();
            seen.erase(next);
        }
    };
    if (src != dst) {
        dfs();
    }
    std::sort(out.begin(), out.end());
    return out;
}

struct RsaChoice {
    Path path;
    TransmissionMode mode;
    std::uint32_t start{};

    bool operator==(const RsaChoice&) const = default;
};

/// Exhaustive RSA under the declared ordering: candidate paths in
/// (length, sequence) order truncated to k; per path the feasible mode with
/// fewest slots, then lower rate, then table order; lowest free start.
inline std::optional<RsaChoice> rsa_oracle(const NetworkGraph& g, std::span<const TransmissionMode> modes,
                                           std::size_t k, NodeId src, NodeId dst, double rate,
                                           const std::function<bool(NodeId)>& transit = {})
{
    auto paths = all_simple_paths(g, src, dst, {}, transit);
    if (paths.size() > k) {
        paths.resize(k);
    }
    for (const auto& [length, path] : paths) {
        std::optional<std::tuple<std::uint32_t, double, std::size_t>> best;
        for (std::size_t i = 0; i < modes.size(); ++i) {
            if (modes[i].rate >= rate && modes[i].reach >= length) {
                auto key = std::make_tuple(modes[i].slots, modes[i].rate, i);
                if (!best || key < *best) {
                    best = key;
                }
            }
        }
        if (!best) {
            continue;
        }
        const TransmissionMode& mode = modes[std::get<2>(*best)];
        for (std::uint32_t s = 1; s + mode.slots - 1 <= g.grid_size(); ++s) {
            bool ok = true;
            for (std::size_t h = 0; h + 1 < path.size() && ok; ++h) {
                const FiberLink& link = *g.find_link(path[h], path[h + 1]);
                for (std::uint32_t x = s; x < s + mode.slots; ++x) {
                    if (link.slots[x - 1]) {
                        ok = false;
                        break;
                    }
                }
            }
            if (ok) {
                return RsaChoice{path, mode, s};
            }
        }
    }
    return std::nullopt;
}

// Invariant checkers --------------------------------------------------------

/// Resource invariants of one domain; returns human-readable violations.
inline std::vector<std::string> resource_violations(const DomainController& dc)
{
    std::vector<std::string> out;
    const NetworkGraph& g = dc.graph();
    const IntentDAG& dag = dc.dag();
    if (!dc.ledger().consistent_with(g)) {
        out.push_back(fmt::format("domain {}: ledger and graph disagree", dc.id()));
    }
    std::map<std::pair<LinkKey, std::uint32_t>, IntentId> expected;
    for (const auto& [id, node] : dag.nodes()) {
        const auto* lp = std::get_if<LightpathIntent>(&node.payload);
        if (lp == nullptr || (node.state != IntentState::kInstalled && node.state != IntentState::kFailed)) {
            continue;
        }
        if (lp->slots.width != lp->mode.slots || lp->slots.first < 1 || lp->slots.last() > g.grid_size()) {
            out.push_back(fmt::format("{}: bad slot range", to_string(id)));
            continue;
        }
        for (std::size_t h = 0; h + 1 < lp->path.size(); ++h) {
            const FiberLink* link = g.find_link(lp->path[h], lp->path[h + 1]);
            if (link == nullptr) {
                out.push_back(fmt::format("{}: discontinuous path", to_string(id)));
                continue;
            }
            for (std::uint32_t s = lp->slots.first; s <= lp->slots.last(); ++s) {
                auto [it, fresh] = expected.emplace(std::make_pair(link->endpoints, s), id);
                if (!fresh) {
                    out.push_back(fmt::format("{} and {} share slot {} on {}", to_string(it->second),
                                              to_string(id), s, to_string(link->endpoints)));
                }
                if (link->slots[s - 1] != id) {
                    out.push_back(fmt::format("{}: slot {} on {} not held", to_string(id), s,
                                              to_string(link->endpoints)));
                }
            }
        }
        double length = 0.0;
        try {
            length = g.path_length(lp->path);
        } catch (...) {
            continue;
        }
        if (length > lp->mode.reach) {
            out.push_back(fmt::format("{}: path {} km beyond reach {}", to_string(id), length, lp->mode.reach));
        }
    }
    for (const auto& [key, link] : g.fiber_links()) {
        for (std::uint32_t s = 1; s <= g.grid_size(); ++s) {
            if (link.slots[s - 1] && !expected.contains({key, s})) {
                out.push_back(fmt::format("stray holder {} on {} slot {}", to_string(*link.slots[s - 1]),
                                          to_string(key), s));
            }
        }
    }
    return out;
}

/// Every bound RemoteIntent mirror must equal the aggregate of the intent it
/// references; unbound mirrors must still read uncompiled.
inline std::vector<std::string> mirror_violations(std::span<const DomainController> domains)
{
    std::vector<std::string> out;
    auto find = [&](DomainId id) -> const DomainController* {
        for (const auto& d : domains) {
            if (d.id() == id) {
                return &d;
            }
        }
        return nullptr;
    };
    for (const auto& d : domains) {
        for (const auto& [id, node] : d.dag().nodes()) {
            const auto* r = std::get_if<RemoteIntent>(&node.payload);
            if (r == nullptr) {
                continue;
            }
            if (!r->remote_id) {
                out.push_back(fmt::format("{}: unbound at quiescence", to_string(id)));
                continue;
            }
            const DomainController* peer = find(r->neighbor);
            if (peer == nullptr || !peer->dag().contains(*r->remote_id)) {
                out.push_back(fmt::format("{}: references missing {}", to_string(id), to_string(*r->remote_id)));
                continue;
            }
            IntentState actual = peer->dag().aggregate_state(*r->remote_id);
            if (actual != r->mirrored_state) {
                out.push_back(fmt::format("{}: mirror {} but {} is {}", to_string(id), to_string(r->mirrored_state),
                                          to_string(*r->remote_id), to_string(actual)));
            }
        }
    }
    return out;
}

/// Random connected graph on `count` nodes with integer lengths.
inline NetworkGraph random_graph(std::mt19937_64& rng, std::uint32_t count, std::uint32_t grid, double max_length)
{
    std::uniform_int_distribution<int> len(1, static_cast<int>(max_length));
    std::bernoulli_distribution extra(0.5);
    std::vector<Edge> edges;
    std::set<std::pair<std::uint32_t, std::uint32_t>> have;
    for (std::uint32_t i = 2; i <= count; ++i) {
        std::uniform_int_distribution<std::uint32_t> pick(1, i - 1);
        std::uint32_t j = pick(rng);
        edges.push_back({j, i, static_cast<double>(len(rng))});
        have.insert({j, i});
    }
    for (std::uint32_t i = 1; i <= count; ++i) {
        for (std::uint32_t j = i + 1; j <= count; ++j) {
            if (!have.contains({i, j}) && extra(rng)) {
                edges.push_back({i, j, static_cast<double>(len(rng))});
            }
        }
    }
    return make_graph(count, edges, grid);
}

} // namespace ibnsim::testing
