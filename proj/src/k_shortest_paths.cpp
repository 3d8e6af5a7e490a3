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

// Yen's loop-free k-shortest-paths over the operational fiber layer.
//
// Paths are totally ordered by (length, node sequence). The spur search is a
// label-setting Dijkstra whose labels carry the full path, so among equally
// short spur paths it settles on the lexicographically smallest one. That
// makes the enumeration order, including ties, fully deterministic.

#include "ibnsim/network_graph.hpp"

#include "ibnsim/error.hpp"

#include <algorithm>
#include <set>

namespace ibnsim {

namespace {

using Adjacency = std::map<NodeId, std::vector<const FiberLink*>>;

struct SpurRestrictions {
    std::set<NodeId> removed_nodes;
    std::set<LinkKey> removed_links;
};

NodeId other_end(const FiberLink& link, NodeId from)
{
    return link.endpoints.a == from ? link.endpoints.b : link.endpoints.a;
}

std::optional<Path> lexicographic_dijkstra(const Adjacency& adjacency, NodeId src, NodeId dst,
                                           const SpurRestrictions& restrictions,
                                           const PathFilter& filter)
{
    std::set<std::pair<double, Path>> frontier;
    std::set<NodeId> settled;
    frontier.emplace(0.0, Path{src});

    while (!frontier.empty()) {
        auto node = frontier.extract(frontier.begin());
        auto& [dist, path] = node.value();
        NodeId at = path.back();
        if (!settled.insert(at).second) {
            continue;
        }
        if (at == dst) {
            return std::move(path);
        }
        if (at != src && filter.transit_allowed && !filter.transit_allowed(at)) {
            continue;
        }
        auto it = adjacency.find(at);
        if (it == adjacency.end()) {
            continue;
        }
        for (const FiberLink* link : it->second) {
            if (restrictions.removed_links.contains(link->endpoints)) {
                continue;
            }
            NodeId next = other_end(*link, at);
            if (settled.contains(next) || restrictions.removed_nodes.contains(next)) {
                continue;
            }
            Path extended = path;
            extended.push_back(next);
            frontier.emplace(dist + link->length, std::move(extended));
        }
    }
    return std::nullopt;
}

} // namespace

std::vector<Path> NetworkGraph::k_shortest_paths(NodeId src, NodeId dst, std::size_t k,
                                                 const PathFilter& filter) const
{
    if (!has_node(src)) {
        throw Error(ErrorCode::kUnknownNode, to_string(src));
    }
    if (!has_node(dst)) {
        throw Error(ErrorCode::kUnknownNode, to_string(dst));
    }
    std::vector<Path> accepted;
    if (src == dst || k == 0) {
        return accepted;
    }

    Adjacency adjacency;
    for (const auto& [key, link] : links_) {
        if (!link.operational || (filter.link_allowed && !filter.link_allowed(link))) {
            continue;
        }
        adjacency[key.a].push_back(&link);
        adjacency[key.b].push_back(&link);
    }

    auto first = lexicographic_dijkstra(adjacency, src, dst, {}, filter);
    if (!first) {
        return accepted;
    }
    accepted.push_back(std::move(*first));

    std::set<std::pair<double, Path>> candidates;
    while (accepted.size() < k) {
        const Path last = accepted.back();
        for (std::size_t i = 0; i + 1 < last.size(); ++i) {
            NodeId spur = last[i];
            SpurRestrictions restrictions;
            for (const Path& p : accepted) {
                if (p.size() > i + 1 && std::equal(last.begin(), last.begin() + i + 1, p.begin())) {
                    restrictions.removed_links.insert(LinkKey::of(p[i], p[i + 1]));
                }
            }
            restrictions.removed_nodes.insert(last.begin(), last.begin() + i);

            auto spur_path = lexicographic_dijkstra(adjacency, spur, dst, restrictions, filter);
            if (!spur_path) {
                continue;
            }
            Path total(last.begin(), last.begin() + i);
            total.insert(total.end(), spur_path->begin(), spur_path->end());
            // Re-sum from the source so equal paths always get equal lengths.
            double length = path_length(total);
            candidates.emplace(length, std::move(total));
        }

        bool advanced = false;
        while (!candidates.empty()) {
            auto best = candidates.extract(candidates.begin());
            if (std::find(accepted.begin(), accepted.end(), best.value().second) == accepted.end()) {
                accepted.push_back(std::move(best.value().second));
                advanced = true;
                break;
            }
        }
        if (!advanced) {
            break;
        }
    }
    return accepted;
}

} // namespace ibnsim
