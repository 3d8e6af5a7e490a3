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

#include "ibnsim/network_graph.hpp"

#include "ibnsim/error.hpp"

#include <algorithm>
#include <set>
#include <utility>

namespace ibnsim {

std::vector<TransmissionMode> default_mode_table()
{
    return {
        {400.0, 600.0, 8},
        {300.0, 1800.0, 8},
        {200.0, 3000.0, 8},
        {100.0, 5000.0, 4},
    };
}

NetworkGraph::NetworkGraph(std::uint32_t grid_size)
    : grid_size_(grid_size)
{
    if (grid_size_ == 0) {
        throw Error(ErrorCode::kInvalidConfig, "spectrum grid must have at least one slot");
    }
}

void NetworkGraph::add_node(const RouterView& router, const OxcView& oxc)
{
    if (router.node != oxc.node) {
        throw Error(ErrorCode::kInvalidPayload,
                    "router " + to_string(router.node) + " and OXC " + to_string(oxc.node) +
                        " must share a node id");
    }
    if (has_node(router.node)) {
        throw Error(ErrorCode::kDuplicateNode, to_string(router.node));
    }
    if (router.ports_used > router.port_count || oxc.add_drop_used > oxc.add_drop_capacity) {
        throw Error(ErrorCode::kInvalidPayload, "usage exceeds capacity at " + to_string(router.node));
    }
    routers_.emplace(router.node, router);
    oxcs_.emplace(oxc.node, oxc);
}

void NetworkGraph::add_fiber_link(NodeId a, NodeId b, double length_km)
{
    if (!has_node(a)) {
        throw Error(ErrorCode::kMissingEndpoint, to_string(a));
    }
    if (!has_node(b)) {
        throw Error(ErrorCode::kMissingEndpoint, to_string(b));
    }
    if (a == b) {
        throw Error(ErrorCode::kInvalidPayload, "self-loop at " + to_string(a));
    }
    if (!(length_km > 0.0)) {
        throw Error(ErrorCode::kNonPositiveLength, to_string(LinkKey::of(a, b)));
    }
    auto key = LinkKey::of(a, b);
    if (links_.contains(key)) {
        throw Error(ErrorCode::kDuplicateLink, to_string(key));
    }
    FiberLink link;
    link.endpoints = key;
    link.length = length_km;
    link.slots.assign(grid_size_, std::nullopt);
    links_.emplace(key, std::move(link));
}

std::vector<NodeId> NetworkGraph::nodes() const
{
    std::vector<NodeId> out;
    out.reserve(routers_.size());
    for (const auto& [id, _] : routers_) {
        out.push_back(id);
    }
    return out;
}

const RouterView& NetworkGraph::router(NodeId id) const
{
    auto it = routers_.find(id);
    if (it == routers_.end()) {
        throw Error(ErrorCode::kUnknownNode, to_string(id));
    }
    return it->second;
}

const OxcView& NetworkGraph::oxc(NodeId id) const
{
    auto it = oxcs_.find(id);
    if (it == oxcs_.end()) {
        throw Error(ErrorCode::kUnknownNode, to_string(id));
    }
    return it->second;
}

RouterView& NetworkGraph::mutable_router(NodeId id)
{
    return const_cast<RouterView&>(std::as_const(*this).router(id));
}

OxcView& NetworkGraph::mutable_oxc(NodeId id)
{
    return const_cast<OxcView&>(std::as_const(*this).oxc(id));
}

const FiberLink* NetworkGraph::find_link(NodeId a, NodeId b) const
{
    auto it = links_.find(LinkKey::of(a, b));
    return it == links_.end() ? nullptr : &it->second;
}

const FiberLink& NetworkGraph::link(const LinkKey& key) const
{
    auto it = links_.find(LinkKey::of(key.a, key.b));
    if (it == links_.end()) {
        throw Error(ErrorCode::kUnknownLink, to_string(key));
    }
    return it->second;
}

FiberLink& NetworkGraph::mutable_link(const LinkKey& key)
{
    return const_cast<FiberLink&>(std::as_const(*this).link(key));
}

void NetworkGraph::set_operational(const LinkKey& key, bool up)
{
    mutable_link(key).operational = up;
}

void NetworkGraph::add_virtual_link(const VirtualLink& vl)
{
    if (!has_node(vl.endpoints.a) || !has_node(vl.endpoints.b)) {
        throw Error(ErrorCode::kMissingEndpoint, "virtual link " + to_string(vl.endpoints));
    }
    virtual_links_.push_back(vl);
}

void NetworkGraph::remove_virtual_links_of(IntentId lightpath)
{
    std::erase_if(virtual_links_, [&](const VirtualLink& vl) { return vl.lightpath == lightpath; });
}

std::vector<LinkKey> NetworkGraph::path_links(std::span<const NodeId> path) const
{
    std::vector<LinkKey> out;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        const FiberLink* link = find_link(path[i], path[i + 1]);
        if (link == nullptr) {
            throw Error(ErrorCode::kBrokenPath,
                        "no fiber link between " + to_string(path[i]) + " and " + to_string(path[i + 1]));
        }
        out.push_back(link->endpoints);
    }
    return out;
}

double NetworkGraph::path_length(std::span<const NodeId> path) const
{
    double total = 0.0;
    for (const auto& key : path_links(path)) {
        total += links_.at(key).length;
    }
    return total;
}

std::vector<std::uint32_t> NetworkGraph::free_slot_blocks(std::span<const NodeId> path) const
{
    std::vector<bool> free(grid_size_, true);
    for (const auto& key : path_links(path)) {
        const auto& slots = links_.at(key).slots;
        for (std::uint32_t i = 0; i < grid_size_; ++i) {
            if (slots[i].has_value()) {
                free[i] = false;
            }
        }
    }
    std::vector<std::uint32_t> out;
    for (std::uint32_t i = 0; i < grid_size_; ++i) {
        if (free[i]) {
            out.push_back(i + 1);
        }
    }
    return out;
}

std::size_t NetworkGraph::reserved_slot_count() const
{
    std::size_t n = 0;
    for (const auto& [_, link] : links_) {
        n += static_cast<std::size_t>(
            std::count_if(link.slots.begin(), link.slots.end(), [](const auto& s) { return s.has_value(); }));
    }
    return n;
}

} // namespace ibnsim
