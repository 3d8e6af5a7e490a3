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

#include "ibnsim/domain_controller.hpp"

#include "ibnsim/error.hpp"

#include <algorithm>
#include <tuple>

#include <fmt/format.h>

namespace ibnsim {

std::string_view to_string(RecoveryPolicy policy)
{
    return policy == RecoveryPolicy::kNone ? "none" : "auto-recompile";
}

std::optional<RecoveryPolicy> parse_recovery_policy(std::string_view text)
{
    if (text == "none") {
        return RecoveryPolicy::kNone;
    }
    if (text == "auto-recompile") {
        return RecoveryPolicy::kAutoRecompile;
    }
    return std::nullopt;
}

std::string_view to_string(MessageKind kind)
{
    switch (kind) {
    case MessageKind::kDelegate: return "DELEGATE";
    case MessageKind::kStateNotify: return "STATE_NOTIFY";
    case MessageKind::kInstall: return "INSTALL";
    case MessageKind::kUninstall: return "UNINSTALL";
    case MessageKind::kAck: return "ACK";
    }
    return "?";
}

std::string to_string(const Message& msg)
{
    std::string out = fmt::format("{} {}->{} seq={}", to_string(msg.kind), msg.from, msg.to, msg.seq);
    if (msg.remote_id) {
        out += " remote=" + to_string(*msg.remote_id);
    }
    if (msg.parent_ref) {
        out += " parent=" + to_string(*msg.parent_ref);
    }
    if (msg.kind == MessageKind::kStateNotify) {
        out += fmt::format(" state={}", to_string(msg.state));
    }
    if (msg.payload) {
        out += fmt::format(" demand={}->{}@{}", to_string(msg.payload->src), to_string(msg.payload->dst),
                           msg.payload->rate);
    }
    if (msg.withdraw) {
        out += " withdraw";
    }
    return out;
}

DomainController::DomainController(DomainId id, NetworkGraph graph, DomainConfig config)
    : id_(id)
    , graph_(std::move(graph))
    , dag_(id)
    , config_(std::move(config))
{
    for (NodeId n : graph_.nodes()) {
        registry_.insert(n);
    }
}

void DomainController::add_border_link(const BorderLink& link)
{
    if (!owns(link.local) || owns(link.remote)) {
        throw Error(ErrorCode::kInvalidPayload,
                    "border link " + to_string(LinkKey::of(link.local, link.remote)) + " must cross into domain " +
                        std::to_string(id_));
    }
    if (!graph_.has_node(link.local)) {
        throw Error(ErrorCode::kMissingEndpoint, to_string(link.local));
    }
    border_links_.push_back(link);
    std::sort(border_links_.begin(), border_links_.end(), [](const BorderLink& x, const BorderLink& y) {
        return std::tie(x.local, x.remote) < std::tie(y.local, y.remote);
    });
    registry_.insert(link.remote);
}

std::vector<DomainId> DomainController::neighbors() const
{
    std::set<DomainId> out;
    for (const auto& b : border_links_) {
        out.insert(b.remote.domain);
    }
    return {out.begin(), out.end()};
}

void DomainController::set_route(DomainId destination, DomainId neighbor, std::uint32_t hops)
{
    routes_[destination][neighbor] = hops;
}

std::optional<DomainId> DomainController::next_hop(DomainId destination) const
{
    auto it = routes_.find(destination);
    if (it == routes_.end()) {
        return std::nullopt;
    }
    std::optional<std::pair<std::uint32_t, DomainId>> best;
    for (const auto& [neighbor, hops] : it->second) {
        auto candidate = std::make_pair(hops, neighbor);
        if (!best || candidate < *best) {
            best = candidate;
        }
    }
    if (!best) {
        return std::nullopt;
    }
    return best->second;
}

void DomainController::post(Message msg)
{
    msg.from = id_;
    msg.seq = next_seq_++;
    outbox_[msg.to].push_back(std::move(msg));
}

std::vector<Message> DomainController::take_outgoing()
{
    std::vector<Message> out;
    for (auto& [_, queue] : outbox_) {
        out.insert(out.end(), queue.begin(), queue.end());
        queue.clear();
    }
    std::sort(out.begin(), out.end(), [](const Message& a, const Message& b) { return a.seq < b.seq; });
    return out;
}

bool DomainController::has_outgoing() const
{
    return std::any_of(outbox_.begin(), outbox_.end(), [](const auto& kv) { return !kv.second.empty(); });
}

} // namespace ibnsim
