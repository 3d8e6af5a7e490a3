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

#include "ibnsim/compilation.hpp"

#include "ibnsim/error.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

namespace ibnsim {

namespace {

std::vector<IntentId> subtree(const IntentDAG& dag, IntentId id)
{
    auto out = dag.descendants(id);
    out.insert(std::lower_bound(out.begin(), out.end(), id), id);
    return out;
}

bool is_resource(const IntentPayload& p)
{
    return std::holds_alternative<LightpathIntent>(p) || std::holds_alternative<RouterPortIntent>(p);
}

const ConnectivityIntent& connectivity_of(const IntentDAG& dag, IntentId id)
{
    const auto* c = std::get_if<ConnectivityIntent>(&dag.payload(id));
    if (c == nullptr) {
        throw Error(ErrorCode::kInvalidPayload, to_string(id) + " is not a connectivity intent");
    }
    return *c;
}

bool endpoint_capacity(const NetworkGraph& graph, NodeId node, double rate)
{
    const RouterView& r = graph.router(node);
    const OxcView& o = graph.oxc(node);
    return r.ports_used + ports_needed(r, rate) <= r.port_count && o.add_drop_used < o.add_drop_capacity;
}

} // namespace

std::string_view to_string(BlockReason reason)
{
    switch (reason) {
    case BlockReason::kNoPath: return "no-path";
    case BlockReason::kNoMode: return "no-mode";
    case BlockReason::kNoSpectrum: return "no-spectrum";
    case BlockReason::kNoPort: return "no-port";
    }
    return "?";
}

std::string_view to_string(InstallOutcome outcome)
{
    switch (outcome) {
    case InstallOutcome::kInstalled: return "installed";
    case InstallOutcome::kConflict: return "conflict";
    case InstallOutcome::kPending: return "pending";
    }
    return "?";
}

std::optional<TransmissionMode> select_mode(std::span<const TransmissionMode> modes, double rate, double distance)
{
    std::optional<TransmissionMode> best;
    for (const auto& m : modes) {
        if (m.rate < rate || m.reach < distance) {
            continue;
        }
        // Strict comparison keeps the earliest table entry on full ties.
        if (!best || std::tie(m.slots, m.rate) < std::tie(best->slots, best->rate)) {
            best = m;
        }
    }
    return best;
}

std::optional<SlotRange> first_fit_spectrum(const NetworkGraph& graph, std::span<const NodeId> path,
                                            std::uint32_t width)
{
    if (width == 0) {
        throw Error(ErrorCode::kInvalidPayload, "spectrum block width must be at least 1");
    }
    auto links = graph.path_links(path);
    std::uint32_t run = 0;
    for (std::uint32_t slot = 1; slot <= graph.grid_size(); ++slot) {
        bool free = std::all_of(links.begin(), links.end(),
                                [&](const LinkKey& k) { return !graph.link(k).slots[slot - 1].has_value(); });
        run = free ? run + 1 : 0;
        if (run == width) {
            return SlotRange{slot - width + 1, width};
        }
    }
    return std::nullopt;
}

std::uint32_t ports_needed(const RouterView& router, double rate)
{
    if (!(router.port_rate > 0.0)) {
        return router.port_count + 1;
    }
    return std::max<std::uint32_t>(1, static_cast<std::uint32_t>(std::ceil(rate / router.port_rate)));
}

PathFilter compile_filter(const DomainController& domain, const ConnectivityIntent& intent)
{
    PathFilter filter;
    if (!intent.excluded_links.empty()) {
        std::vector<LinkKey> excluded;
        for (const auto& k : intent.excluded_links) {
            excluded.push_back(LinkKey::of(k.a, k.b));
        }
        std::sort(excluded.begin(), excluded.end());
        filter.link_allowed = [excluded = std::move(excluded)](const FiberLink& l) {
            return !std::binary_search(excluded.begin(), excluded.end(), l.endpoints);
        };
    }
    DomainId own = domain.id();
    filter.transit_allowed = [own](NodeId n) { return n.domain == own; };
    return filter;
}

CompilationResult compile_connectivity(DomainController& domain, IntentId id)
{
    IntentDAG& dag = domain.dag();
    const ConnectivityIntent intent = connectivity_of(dag, id);
    IntentState state = dag.state(id);
    if (!dag.is_leaf(id) || (state != IntentState::kUncompiled && state != IntentState::kFailed)) {
        throw Error(ErrorCode::kWrongState, to_string(id) + " is " + std::string(to_string(state)));
    }
    const NetworkGraph& graph = domain.graph();
    if (!graph.has_node(intent.src)) {
        throw Error(ErrorCode::kNotLocalSource, to_string(intent.src));
    }
    if (!graph.has_node(intent.dst)) {
        throw Error(ErrorCode::kNotLocalDestination, to_string(intent.dst));
    }

    CompilationResult result;
    if (!endpoint_capacity(graph, intent.src, intent.rate) || !endpoint_capacity(graph, intent.dst, intent.rate)) {
        result.reason = BlockReason::kNoPort;
        return result;
    }

    auto candidates = graph.k_shortest_paths(intent.src, intent.dst, domain.config().k_paths,
                                             compile_filter(domain, intent));
    if (candidates.empty()) {
        result.reason = BlockReason::kNoPath;
        return result;
    }

    for (const Path& path : candidates) {
        auto mode = select_mode(domain.config().modes, intent.rate, graph.path_length(path));
        if (!mode) {
            if (!result.reason) {
                result.reason = BlockReason::kNoMode;
            }
            continue;
        }
        auto block = first_fit_spectrum(graph, path, mode->slots);
        if (!block) {
            if (!result.reason) {
                result.reason = BlockReason::kNoSpectrum;
            }
            continue;
        }

        result.outcome = CompileOutcome::kCompiled;
        result.reason.reset();
        result.children.push_back(dag.add_child(id, RouterPortIntent{intent.src, intent.rate}));
        result.children.push_back(dag.add_child(id, RouterPortIntent{intent.dst, intent.rate}));
        result.children.push_back(dag.add_child(id, LightpathIntent{path, *mode, *block}));
        for (IntentId child : result.children) {
            dag.transition(child, IntentState::kCompiled);
        }
        return result;
    }
    return result;
}

std::optional<Conflict> reserve_local_resources(DomainController& domain, IntentId id)
{
    IntentDAG& dag = domain.dag();
    NetworkGraph& graph = domain.graph();
    ReservationTransaction txn;
    std::vector<IntentId> leaves;
    for (IntentId leaf : subtree(dag, id)) {
        const auto& p = dag.payload(leaf);
        if (!dag.is_leaf(leaf) || !is_resource(p) || dag.state(leaf) != IntentState::kCompiled) {
            continue;
        }
        leaves.push_back(leaf);
        if (const auto* lp = std::get_if<LightpathIntent>(&p)) {
            std::vector<LinkKey> links;
            try {
                links = graph.path_links(lp->path);
            } catch (const Error& e) {
                return Conflict{ConflictKind::kUnknownResource, e.what()};
            }
            txn.claim_spectrum(leaf, std::move(links), lp->slots);
            txn.claim_add_drop(leaf, lp->path.front());
            txn.claim_add_drop(leaf, lp->path.back());
        } else {
            const auto& port = std::get<RouterPortIntent>(p);
            if (!graph.has_node(port.node)) {
                return Conflict{ConflictKind::kUnknownResource, "no router " + to_string(port.node)};
            }
            txn.claim_ports(leaf, port.node, port.rate, ports_needed(graph.router(port.node), port.rate));
        }
    }
    if (auto conflict = domain.ledger().commit(graph, txn)) {
        return conflict;
    }
    for (IntentId leaf : leaves) {
        if (const auto* lp = std::get_if<LightpathIntent>(&dag.payload(leaf))) {
            graph.add_virtual_link({LinkKey::of(lp->path.front(), lp->path.back()), lp->mode.rate, leaf});
        }
        dag.transition(leaf, IntentState::kInstalled);
    }
    return std::nullopt;
}

void release_local_resources(DomainController& domain, IntentId id)
{
    IntentDAG& dag = domain.dag();
    for (IntentId leaf : subtree(dag, id)) {
        if (!dag.is_leaf(leaf) || std::holds_alternative<RemoteIntent>(dag.payload(leaf))) {
            continue;
        }
        domain.ledger().release(domain.graph(), leaf);
        domain.graph().remove_virtual_links_of(leaf);
        IntentState s = dag.state(leaf);
        if (s == IntentState::kInstalled || s == IntentState::kFailed) {
            dag.transition(leaf, IntentState::kCompiled);
        }
    }
}

bool has_remote_parts(const IntentDAG& dag, IntentId id)
{
    return !remote_parts(dag, id).empty();
}

std::vector<IntentId> remote_parts(const IntentDAG& dag, IntentId id)
{
    std::vector<IntentId> out;
    for (IntentId n : subtree(dag, id)) {
        if (std::holds_alternative<RemoteIntent>(dag.payload(n))) {
            out.push_back(n);
        }
    }
    return out;
}

InstallOutcome install_intent(DomainController& domain, IntentId id)
{
    IntentDAG& dag = domain.dag();
    IntentState s = dag.aggregate_state(id);
    if (s != IntentState::kCompiled) {
        throw Error(ErrorCode::kWrongState, to_string(id) + " is " + std::string(to_string(s)));
    }
    if (has_remote_parts(dag, id)) {
        throw Error(ErrorCode::kWrongState, to_string(id) + " has delegated parts");
    }
    return reserve_local_resources(domain, id) ? InstallOutcome::kConflict : InstallOutcome::kInstalled;
}

void uninstall_intent(DomainController& domain, IntentId id)
{
    IntentDAG& dag = domain.dag();
    IntentState s = dag.aggregate_state(id);
    if (s != IntentState::kInstalled && s != IntentState::kFailed) {
        throw Error(ErrorCode::kWrongState, to_string(id) + " is " + std::string(to_string(s)));
    }
    if (has_remote_parts(dag, id)) {
        throw Error(ErrorCode::kWrongState, to_string(id) + " has delegated parts");
    }
    release_local_resources(domain, id);
}

} // namespace ibnsim
