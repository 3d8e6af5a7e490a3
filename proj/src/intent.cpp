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

#include "ibnsim/intent.hpp"

#include "ibnsim/error.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>

namespace ibnsim {

namespace {

int advancement(IntentState s)
{
    switch (s) {
    case IntentState::kUncompiled: return 0;
    case IntentState::kCompiled: return 1;
    case IntentState::kInstalled: return 2;
    case IntentState::kFailed: return 3;
    }
    return 0;
}

void insert_sorted(std::vector<IntentId>& v, IntentId id)
{
    auto it = std::lower_bound(v.begin(), v.end(), id);
    if (it == v.end() || *it != id) {
        v.insert(it, id);
    }
}

void erase_value(std::vector<IntentId>& v, IntentId id)
{
    std::erase(v, id);
}

} // namespace

std::string_view to_string(IntentState state)
{
    switch (state) {
    case IntentState::kUncompiled: return "uncompiled";
    case IntentState::kCompiled: return "compiled";
    case IntentState::kInstalled: return "installed";
    case IntentState::kFailed: return "failed";
    }
    return "?";
}

std::optional<IntentState> parse_intent_state(std::string_view text)
{
    for (auto s : {IntentState::kUncompiled, IntentState::kCompiled, IntentState::kInstalled,
                   IntentState::kFailed}) {
        if (text == to_string(s)) {
            return s;
        }
    }
    return std::nullopt;
}

bool is_allowed_transition(IntentState from, IntentState to)
{
    using S = IntentState;
    switch (from) {
    case S::kUncompiled: return to == S::kCompiled;
    case S::kCompiled: return to == S::kUncompiled || to == S::kInstalled;
    case S::kInstalled: return to == S::kCompiled || to == S::kFailed;
    case S::kFailed: return to == S::kCompiled;
    }
    return false;
}

std::string_view kind_name(const IntentPayload& payload)
{
    struct Visitor {
        std::string_view operator()(const ConnectivityIntent&) const { return "connectivity"; }
        std::string_view operator()(const LightpathIntent&) const { return "lightpath"; }
        std::string_view operator()(const RouterPortIntent&) const { return "router-port"; }
        std::string_view operator()(const RemoteIntent&) const { return "remote"; }
    };
    return std::visit(Visitor{}, payload);
}

IntentDAG::IntentDAG(DomainId owner)
    : owner_(owner)
{ }

IntentDAG IntentDAG::from_parts(DomainId owner, std::uint64_t next_serial, std::map<IntentId, Node> nodes)
{
    IntentDAG dag(owner);
    dag.next_serial_ = next_serial;
    for (const auto& [id, n] : nodes) {
        if (id.domain != owner || id.serial == 0 || id.serial >= next_serial) {
            throw Error(ErrorCode::kInvalidPayload, "intent id " + to_string(id) + " outside DAG id space");
        }
        dag.validate_payload(n.payload);
        for (IntentId c : n.children) {
            auto it = nodes.find(c);
            if (it == nodes.end() ||
                !std::binary_search(it->second.parents.begin(), it->second.parents.end(), id)) {
                throw Error(ErrorCode::kInvalidPayload, "dangling edge " + to_string(id) + "->" + to_string(c));
            }
        }
        for (IntentId p : n.parents) {
            auto it = nodes.find(p);
            if (it == nodes.end() ||
                !std::binary_search(it->second.children.begin(), it->second.children.end(), id)) {
                throw Error(ErrorCode::kInvalidPayload, "dangling edge " + to_string(p) + "->" + to_string(id));
            }
        }
        if (!std::is_sorted(n.children.begin(), n.children.end()) ||
            !std::is_sorted(n.parents.begin(), n.parents.end())) {
            throw Error(ErrorCode::kInvalidPayload, "unsorted adjacency at " + to_string(id));
        }
    }
    dag.nodes_ = std::move(nodes);
    if (!dag.is_acyclic()) {
        throw Error(ErrorCode::kCycleDetected, "restored DAG contains a cycle");
    }
    for (auto& [id, n] : dag.nodes_) {
        if (auto* remote = std::get_if<RemoteIntent>(&n.payload)) {
            n.state = remote->mirrored_state;
        }
    }
    for (auto& [id, n] : dag.nodes_) {
        if (!n.children.empty()) {
            n.state = dag.aggregate_state(id);
        }
    }
    return dag;
}

IntentId IntentDAG::allocate_id()
{
    return IntentId{owner_, next_serial_++};
}

const IntentDAG::Node& IntentDAG::node(IntentId id) const
{
    auto it = nodes_.find(id);
    if (it == nodes_.end()) {
        throw Error(ErrorCode::kUnknownIntent, to_string(id));
    }
    return it->second;
}

IntentDAG::Node& IntentDAG::mutable_node(IntentId id)
{
    return const_cast<Node&>(std::as_const(*this).node(id));
}

void IntentDAG::validate_payload(const IntentPayload& payload) const
{
    auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
    if (const auto* c = std::get_if<ConnectivityIntent>(&payload)) {
        if (c->src == c->dst) {
            throw Error(ErrorCode::kInvalidPayload, "connectivity source equals destination " + to_string(c->src));
        }
        if (!positive(c->rate)) {
            throw Error(ErrorCode::kInvalidPayload, "connectivity rate must be positive");
        }
    } else if (const auto* l = std::get_if<LightpathIntent>(&payload)) {
        if (l->path.size() < 2) {
            throw Error(ErrorCode::kInvalidPayload, "lightpath needs at least one hop");
        }
        std::set<NodeId> seen(l->path.begin(), l->path.end());
        if (seen.size() != l->path.size()) {
            throw Error(ErrorCode::kInvalidPayload, "lightpath path repeats a node");
        }
        if (!positive(l->mode.rate) || !positive(l->mode.reach) || l->mode.slots == 0) {
            throw Error(ErrorCode::kInvalidPayload, "transmission mode fields must be positive");
        }
        if (l->slots.first == 0 || l->slots.width != l->mode.slots) {
            throw Error(ErrorCode::kInvalidPayload, "slot range width must equal mode slot count");
        }
    } else if (const auto* p = std::get_if<RouterPortIntent>(&payload)) {
        if (!positive(p->rate)) {
            throw Error(ErrorCode::kInvalidPayload, "router port rate must be positive");
        }
    } else if (const auto* r = std::get_if<RemoteIntent>(&payload)) {
        if (r->neighbor == owner_) {
            throw Error(ErrorCode::kInvalidPayload, "remote intent must target another domain");
        }
    }
}

IntentId IntentDAG::add_intent(IntentPayload payload)
{
    validate_payload(payload);
    IntentId id = allocate_id();
    Node n{std::move(payload), IntentState::kUncompiled, {}, {}};
    if (auto* remote = std::get_if<RemoteIntent>(&n.payload)) {
        n.state = remote->mirrored_state;
    }
    nodes_.emplace(id, std::move(n));
    return id;
}

IntentId IntentDAG::add_child(IntentId parent, IntentPayload payload)
{
    if (!contains(parent)) {
        throw Error(ErrorCode::kUnknownParent, to_string(parent));
    }
    IntentId id = add_intent(std::move(payload));
    insert_sorted(nodes_.at(parent).children, id);
    insert_sorted(nodes_.at(id).parents, parent);
    refresh_ancestors(id);
    return id;
}

bool IntentDAG::reachable(IntentId from, IntentId to) const
{
    std::set<IntentId> seen;
    std::deque<IntentId> queue{from};
    while (!queue.empty()) {
        IntentId at = queue.front();
        queue.pop_front();
        if (at == to) {
            return true;
        }
        if (!seen.insert(at).second) {
            continue;
        }
        for (IntentId c : nodes_.at(at).children) {
            queue.push_back(c);
        }
    }
    return false;
}

void IntentDAG::link_nodes(IntentId parent, IntentId child)
{
    if (!contains(parent)) {
        throw Error(ErrorCode::kUnknownParent, to_string(parent));
    }
    if (!contains(child)) {
        throw Error(ErrorCode::kUnknownIntent, to_string(child));
    }
    if (parent == child || reachable(child, parent)) {
        throw Error(ErrorCode::kCycleDetected, to_string(parent) + "->" + to_string(child));
    }
    insert_sorted(nodes_.at(parent).children, child);
    insert_sorted(nodes_.at(child).parents, parent);
    refresh_ancestors(child);
}

IntentState IntentDAG::transition(IntentId id, IntentState to)
{
    Node& n = mutable_node(id);
    if (!n.children.empty()) {
        throw Error(ErrorCode::kNotALeaf, to_string(id) + " derives its state from children");
    }
    if (std::holds_alternative<RemoteIntent>(n.payload)) {
        throw Error(ErrorCode::kWrongState, to_string(id) + " mirrors a remote intent");
    }
    if (!is_allowed_transition(n.state, to)) {
        throw Error(ErrorCode::kIllegalTransition,
                    std::string(to_string(n.state)) + "->" + std::string(to_string(to)) + " at " + to_string(id));
    }
    n.state = to;
    refresh_ancestors(id);
    return to;
}

IntentState IntentDAG::aggregate_state(IntentId id) const
{
    std::map<IntentId, IntentState> memo;
    std::map<IntentId, bool> failed_below;

    // Post-order walk; the DAG is small so recursion depth is bounded by height.
    auto visit = [&](auto&& self, IntentId at) -> std::pair<IntentState, bool> {
        if (auto it = memo.find(at); it != memo.end()) {
            return {it->second, failed_below.at(at)};
        }
        const Node& n = node(at);
        std::pair<IntentState, bool> result;
        if (n.children.empty()) {
            result = {n.state, n.state == IntentState::kFailed};
        } else {
            bool failed = false;
            IntentState lowest = IntentState::kInstalled;
            for (IntentId c : n.children) {
                auto [s, f] = self(self, c);
                failed = failed || f;
                if (!f && advancement(s) < advancement(lowest)) {
                    lowest = s;
                }
            }
            result = {failed ? IntentState::kFailed : lowest, failed};
        }
        memo.emplace(at, result.first);
        failed_below.emplace(at, result.second);
        return result;
    };
    return visit(visit, id).first;
}

void IntentDAG::refresh_ancestors(IntentId id)
{
    std::set<IntentId> seen;
    std::deque<IntentId> queue{id};
    while (!queue.empty()) {
        IntentId at = queue.front();
        queue.pop_front();
        if (!seen.insert(at).second) {
            continue;
        }
        Node& n = nodes_.at(at);
        if (!n.children.empty()) {
            n.state = aggregate_state(at);
        }
        for (IntentId p : n.parents) {
            queue.push_back(p);
        }
    }
}

std::vector<IntentId> IntentDAG::exclusive_descendants(IntentId id) const
{
    std::set<IntentId> doomed{id};
    std::vector<IntentId> below = descendants(id);
    bool changed = true;
    while (changed) {
        changed = false;
        for (IntentId d : below) {
            if (doomed.contains(d)) {
                continue;
            }
            const auto& ps = nodes_.at(d).parents;
            if (std::all_of(ps.begin(), ps.end(), [&](IntentId p) { return doomed.contains(p); })) {
                doomed.insert(d);
                changed = true;
            }
        }
    }
    doomed.erase(id);
    return {doomed.begin(), doomed.end()};
}

void IntentDAG::erase_nodes(const std::vector<IntentId>& doomed)
{
    std::set<IntentId> gone(doomed.begin(), doomed.end());
    std::set<IntentId> touched;
    for (IntentId d : doomed) {
        const Node& n = nodes_.at(d);
        for (IntentId p : n.parents) {
            if (!gone.contains(p)) {
                erase_value(nodes_.at(p).children, d);
                touched.insert(p);
            }
        }
        for (IntentId c : n.children) {
            if (!gone.contains(c)) {
                erase_value(nodes_.at(c).parents, d);
            }
        }
    }
    for (IntentId d : doomed) {
        nodes_.erase(d);
    }
    for (IntentId t : touched) {
        refresh_ancestors(t);
    }
}

void IntentDAG::remove_intent(IntentId id)
{
    IntentState s = aggregate_state(id);
    if (s == IntentState::kInstalled || s == IntentState::kFailed) {
        throw Error(ErrorCode::kStillInstalled, to_string(id) + " is " + std::string(to_string(s)));
    }
    erase_subtree(id);
}

void IntentDAG::erase_subtree(IntentId id)
{
    node(id);
    auto doomed = exclusive_descendants(id);
    doomed.push_back(id);
    erase_nodes(doomed);
}

void IntentDAG::detach_children(IntentId id, IntentState state)
{
    node(id);
    auto doomed = exclusive_descendants(id);
    erase_nodes(doomed);
    // Shared descendants survive but lose the edge from `id`.
    Node& n = nodes_.at(id);
    for (IntentId c : n.children) {
        erase_value(nodes_.at(c).parents, id);
    }
    n.children.clear();
    n.state = state;
    refresh_ancestors(id);
}

void IntentDAG::set_mirrored_state(IntentId id, IntentState state)
{
    Node& n = mutable_node(id);
    auto* remote = std::get_if<RemoteIntent>(&n.payload);
    if (remote == nullptr) {
        throw Error(ErrorCode::kInvalidPayload, to_string(id) + " is not a remote intent");
    }
    remote->mirrored_state = state;
    n.state = state;
    refresh_ancestors(id);
}

void IntentDAG::bind_remote_id(IntentId id, IntentId remote_id)
{
    auto* remote = std::get_if<RemoteIntent>(&mutable_node(id).payload);
    if (remote == nullptr) {
        throw Error(ErrorCode::kInvalidPayload, to_string(id) + " is not a remote intent");
    }
    remote->remote_id = remote_id;
}

std::vector<IntentId> IntentDAG::ids() const
{
    std::vector<IntentId> out;
    out.reserve(nodes_.size());
    for (const auto& [id, _] : nodes_) {
        out.push_back(id);
    }
    return out;
}

std::vector<IntentId> IntentDAG::roots() const
{
    std::vector<IntentId> out;
    for (const auto& [id, n] : nodes_) {
        if (n.parents.empty()) {
            out.push_back(id);
        }
    }
    return out;
}

std::vector<std::pair<IntentId, IntentId>> IntentDAG::edges() const
{
    std::vector<std::pair<IntentId, IntentId>> out;
    for (const auto& [id, n] : nodes_) {
        for (IntentId c : n.children) {
            out.emplace_back(id, c);
        }
    }
    return out;
}

std::vector<IntentId> IntentDAG::descendants(IntentId id) const
{
    std::set<IntentId> seen;
    std::deque<IntentId> queue(node(id).children.begin(), node(id).children.end());
    while (!queue.empty()) {
        IntentId at = queue.front();
        queue.pop_front();
        if (!seen.insert(at).second) {
            continue;
        }
        for (IntentId c : nodes_.at(at).children) {
            queue.push_back(c);
        }
    }
    return {seen.begin(), seen.end()};
}

std::vector<IntentId> IntentDAG::root_ancestors(IntentId id) const
{
    std::set<IntentId> seen;
    std::set<IntentId> tops;
    std::deque<IntentId> queue{id};
    while (!queue.empty()) {
        IntentId at = queue.front();
        queue.pop_front();
        if (!seen.insert(at).second) {
            continue;
        }
        const auto& ps = node(at).parents;
        if (ps.empty()) {
            tops.insert(at);
        }
        queue.insert(queue.end(), ps.begin(), ps.end());
    }
    return {tops.begin(), tops.end()};
}

bool IntentDAG::is_acyclic() const
{
    std::map<IntentId, std::size_t> indegree;
    for (const auto& [id, n] : nodes_) {
        indegree.emplace(id, n.parents.size());
    }
    std::deque<IntentId> ready;
    for (const auto& [id, d] : indegree) {
        if (d == 0) {
            ready.push_back(id);
        }
    }
    std::size_t visited = 0;
    while (!ready.empty()) {
        IntentId at = ready.front();
        ready.pop_front();
        ++visited;
        for (IntentId c : nodes_.at(at).children) {
            auto it = indegree.find(c);
            if (it == indegree.end()) {
                return false;
            }
            if (--it->second == 0) {
                ready.push_back(c);
            }
        }
    }
    return visited == nodes_.size();
}

} // namespace ibnsim
