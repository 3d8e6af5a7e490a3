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

#include "ibnsim/multidomain.hpp"

#include "ibnsim/error.hpp"

#include <algorithm>
#include <tuple>

namespace ibnsim {

namespace {

bool awaiting_below(const DomainController& domain, IntentId root)
{
    const auto& awaiting = domain.awaiting_reply();
    if (awaiting.empty()) {
        return false;
    }
    if (awaiting.contains(root)) {
        return true;
    }
    for (IntentId d : domain.dag().descendants(root)) {
        if (awaiting.contains(d)) {
            return true;
        }
    }
    return false;
}

const RemoteIntent& remote_of(const IntentDAG& dag, IntentId id)
{
    return std::get<RemoteIntent>(dag.payload(id));
}

IntentId require_delegated(DomainController& domain, const Message& msg)
{
    if (!msg.remote_id || !domain.delegations().contains(*msg.remote_id) ||
        !domain.dag().contains(*msg.remote_id) ||
        domain.delegations().at(*msg.remote_id).origin != msg.from) {
        throw Error(ErrorCode::kUnknownRemoteId, to_string(msg));
    }
    return *msg.remote_id;
}

void compensate(DomainController& domain, IntentId root)
{
    release_local_resources(domain, root);
    for (IntentId r : remote_parts(domain.dag(), root)) {
        const auto& remote = remote_of(domain.dag(), r);
        if (remote.mirrored_state == IntentState::kInstalled || remote.mirrored_state == IntentState::kFailed) {
            Message m;
            m.kind = MessageKind::kUninstall;
            m.to = remote.neighbor;
            m.remote_id = remote.remote_id;
            domain.post(m);
            domain.awaiting_reply().insert(r);
        }
    }
}

void resolve_pending_installs(DomainController& domain)
{
    std::vector<IntentId> ready;
    for (IntentId root : domain.pending_installs()) {
        if (!awaiting_below(domain, root)) {
            ready.push_back(root);
        }
    }
    for (IntentId root : ready) {
        domain.pending_installs().erase(root);
        if (domain.dag().aggregate_state(root) != IntentState::kInstalled) {
            compensate(domain, root);
        }
    }
}

} // namespace

DomainController& find_domain(std::span<DomainController> domains, DomainId id)
{
    for (auto& d : domains) {
        if (d.id() == id) {
            return d;
        }
    }
    throw Error(ErrorCode::kUnknownNode, "no controller for domain " + std::to_string(id));
}

CompilationResult compile_crossdomain(DomainController& domain, IntentId id)
{
    IntentDAG& dag = domain.dag();
    const auto* payload = std::get_if<ConnectivityIntent>(&dag.payload(id));
    if (payload == nullptr) {
        throw Error(ErrorCode::kInvalidPayload, to_string(id) + " is not a connectivity intent");
    }
    const ConnectivityIntent intent = *payload;
    const NetworkGraph& graph = domain.graph();
    if (graph.has_node(intent.dst)) {
        return compile_connectivity(domain, id);
    }
    if (!dag.is_leaf(id) || dag.state(id) != IntentState::kUncompiled) {
        throw Error(ErrorCode::kWrongState, to_string(id) + " is " + std::string(to_string(dag.state(id))));
    }
    if (!graph.has_node(intent.src)) {
        throw Error(ErrorCode::kNotLocalSource, to_string(intent.src));
    }

    CompilationResult blocked;
    blocked.reason = BlockReason::kNoPath;
    if (!domain.knows_node(intent.dst)) {
        return blocked;
    }
    auto hop = domain.next_hop(intent.dst.domain);
    if (!hop) {
        return blocked;
    }

    // Split node: the far-side stub when this domain administers the border
    // link, otherwise the local border node.
    const bool administers = domain.id() < *hop;
    auto filter = compile_filter(domain, intent);
    std::optional<std::tuple<double, NodeId, NodeId>> best;
    for (const BorderLink& b : domain.border_links()) {
        if (b.remote.domain != *hop) {
            continue;
        }
        NodeId split = administers ? b.remote : b.local;
        double distance = 0.0;
        if (split != intent.src) {
            auto paths = graph.k_shortest_paths(intent.src, split, 1, filter);
            if (paths.empty()) {
                continue;
            }
            distance = graph.path_length(paths.front());
        }
        auto candidate = std::make_tuple(distance, b.local, b.remote);
        if (!best || candidate < *best) {
            best = candidate;
        }
    }
    if (!best) {
        return blocked;
    }
    NodeId split = administers ? std::get<2>(*best) : std::get<1>(*best);

    CompilationResult result;
    result.outcome = CompileOutcome::kDelegated;
    if (split != intent.src) {
        ConnectivityIntent segment{intent.src, split, intent.rate, intent.excluded_links};
        IntentId seg = dag.add_child(id, segment);
        auto local = compile_connectivity(domain, seg);
        if (local.outcome != CompileOutcome::kCompiled) {
            dag.detach_children(id, IntentState::kUncompiled);
            return local;
        }
        result.children.push_back(seg);
    }

    IntentId remote = dag.add_child(id, RemoteIntent{*hop, std::nullopt, IntentState::kUncompiled});
    result.children.push_back(remote);
    domain.awaiting_reply().insert(remote);

    Message m;
    m.kind = MessageKind::kDelegate;
    m.to = *hop;
    m.parent_ref = remote;
    m.payload = ConnectivityIntent{split, intent.dst, intent.rate, intent.excluded_links};
    domain.post(m);
    return result;
}

InstallOutcome install_crossdomain(DomainController& domain, IntentId id)
{
    IntentDAG& dag = domain.dag();
    IntentState s = dag.aggregate_state(id);
    if (s != IntentState::kCompiled) {
        throw Error(ErrorCode::kWrongState, to_string(id) + " is " + std::string(to_string(s)));
    }
    auto remotes = remote_parts(dag, id);
    if (remotes.empty()) {
        return install_intent(domain, id);
    }
    if (reserve_local_resources(domain, id)) {
        return InstallOutcome::kConflict;
    }
    for (IntentId r : remotes) {
        const auto& remote = remote_of(dag, r);
        Message m;
        m.kind = MessageKind::kInstall;
        m.to = remote.neighbor;
        m.remote_id = remote.remote_id;
        domain.post(m);
        domain.awaiting_reply().insert(r);
    }
    domain.pending_installs().insert(id);
    return InstallOutcome::kPending;
}

void uninstall_crossdomain(DomainController& domain, IntentId id)
{
    IntentDAG& dag = domain.dag();
    IntentState s = dag.aggregate_state(id);
    if (s != IntentState::kInstalled && s != IntentState::kFailed) {
        throw Error(ErrorCode::kWrongState, to_string(id) + " is " + std::string(to_string(s)));
    }
    domain.pending_installs().erase(id);
    compensate(domain, id);
}

void withdraw_intent(DomainController& domain, IntentId id)
{
    IntentDAG& dag = domain.dag();
    auto remotes = remote_parts(dag, id);
    for (IntentId r : remotes) {
        if (!remote_of(dag, r).remote_id) {
            throw Error(ErrorCode::kWrongState, to_string(r) + " still awaits its delegation reply");
        }
    }
    release_local_resources(domain, id);
    for (IntentId r : remotes) {
        const auto& remote = remote_of(dag, r);
        Message m;
        m.kind = MessageKind::kUninstall;
        m.to = remote.neighbor;
        m.remote_id = remote.remote_id;
        m.withdraw = true;
        domain.post(m);
        domain.awaiting_reply().erase(r);
    }
    domain.pending_installs().erase(id);
    domain.delegations().erase(id);
    dag.erase_subtree(id);
}

void handle_message(DomainController& domain, const Message& msg)
{
    if (msg.to != domain.id()) {
        throw Error(ErrorCode::kUnknownRemoteId, "misrouted " + to_string(msg));
    }
    IntentDAG& dag = domain.dag();
    switch (msg.kind) {
    case MessageKind::kDelegate: {
        if (!msg.payload || !msg.parent_ref) {
            throw Error(ErrorCode::kInvalidPayload, "incomplete " + to_string(msg));
        }
        IntentId root = dag.add_intent(*msg.payload);
        domain.delegations()[root] = Delegation{msg.from, *msg.parent_ref, std::nullopt, true};
        compile_crossdomain(domain, root);
        break;
    }
    case MessageKind::kStateNotify: {
        if (!msg.parent_ref || !msg.remote_id || !dag.contains(*msg.parent_ref)) {
            throw Error(ErrorCode::kUnknownRemoteId, to_string(msg));
        }
        IntentId ref = *msg.parent_ref;
        const auto* remote = std::get_if<RemoteIntent>(&dag.payload(ref));
        if (remote == nullptr || remote->neighbor != msg.from ||
            (remote->remote_id && *remote->remote_id != *msg.remote_id)) {
            throw Error(ErrorCode::kUnknownRemoteId, to_string(msg));
        }
        if (!remote->remote_id) {
            dag.bind_remote_id(ref, *msg.remote_id);
        }
        dag.set_mirrored_state(ref, msg.state);
        domain.awaiting_reply().erase(ref);
        resolve_pending_installs(domain);
        break;
    }
    case MessageKind::kInstall: {
        IntentId id = require_delegated(domain, msg);
        domain.delegations().at(id).reply_due = true;
        if (dag.aggregate_state(id) == IntentState::kCompiled) {
            install_crossdomain(domain, id);
        }
        break;
    }
    case MessageKind::kUninstall: {
        IntentId id = require_delegated(domain, msg);
        if (msg.withdraw) {
            withdraw_intent(domain, id);
            Message ack;
            ack.kind = MessageKind::kAck;
            ack.to = msg.from;
            ack.remote_id = id;
            domain.post(ack);
            break;
        }
        domain.delegations().at(id).reply_due = true;
        IntentState s = dag.aggregate_state(id);
        if (s == IntentState::kInstalled || s == IntentState::kFailed) {
            uninstall_crossdomain(domain, id);
        }
        break;
    }
    case MessageKind::kAck:
        domain.count_ack();
        break;
    }
}

void flush_notifications(DomainController& domain)
{
    for (auto& [root, delegation] : domain.delegations()) {
        if (domain.pending_installs().contains(root) || awaiting_below(domain, root)) {
            continue;
        }
        IntentState s = domain.dag().aggregate_state(root);
        if (!delegation.reply_due && delegation.last_notified == s) {
            continue;
        }
        Message m;
        m.kind = MessageKind::kStateNotify;
        m.to = delegation.origin;
        m.remote_id = root;
        m.parent_ref = delegation.origin_ref;
        m.state = s;
        domain.post(m);
        delegation.last_notified = s;
        delegation.reply_due = false;
    }
}

std::size_t deliver_messages(std::span<DomainController> domains, const MessageObserver& observer)
{
    std::size_t delivered = 0;
    for (;;) {
        std::vector<Message> round;
        for (auto& d : domains) {
            flush_notifications(d);
            auto out = d.take_outgoing();
            round.insert(round.end(), out.begin(), out.end());
        }
        if (round.empty()) {
            return delivered;
        }
        std::stable_sort(round.begin(), round.end(), [](const Message& a, const Message& b) {
            return std::tie(a.from, a.seq) < std::tie(b.from, b.seq);
        });
        for (const Message& m : round) {
            if (observer) {
                observer(m);
            }
            DomainController& receiver = find_domain(domains, m.to);
            handle_message(receiver, m);
            flush_notifications(receiver);
            ++delivered;
        }
    }
}

} // namespace ibnsim
