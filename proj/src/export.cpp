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

#include "ibnsim/export.hpp"

#include "ibnsim/compilation.hpp"
#include "ibnsim/error.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "json.hpp"

namespace ibnsim {

using nlohmann::json;

namespace {

std::string dot_escape(std::string_view text)
{
    std::string out;
    for (char c : text) {
        if (c == '"' || c == '\\') {
            out += '\\';
        }
        out += c;
    }
    return out;
}

std::string fmt_optional_time(const std::optional<double>& t)
{
    return t ? fmt::format("{:.6f}", *t) : std::string{};
}

json node_ids_json(std::span<const NodeId> path)
{
    json out = json::array();
    for (NodeId n : path) {
        out.push_back(to_string(n));
    }
    return out;
}

json mode_json(const TransmissionMode& m)
{
    return {{"rate", m.rate}, {"reach", m.reach}, {"slots", m.slots}};
}

json payload_json(const IntentPayload& payload)
{
    json out;
    out["kind"] = kind_name(payload);
    std::visit(
        [&](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, ConnectivityIntent>) {
                out["src"] = to_string(p.src);
                out["dst"] = to_string(p.dst);
                out["rate"] = p.rate;
                json excluded = json::array();
                for (const auto& k : p.excluded_links) {
                    excluded.push_back({to_string(k.a), to_string(k.b)});
                }
                out["excluded_links"] = excluded;
            } else if constexpr (std::is_same_v<T, LightpathIntent>) {
                out["path"] = node_ids_json(p.path);
                out["mode"] = mode_json(p.mode);
                out["first_slot"] = p.slots.first;
                out["width"] = p.slots.width;
            } else if constexpr (std::is_same_v<T, RouterPortIntent>) {
                out["node"] = to_string(p.node);
                out["rate"] = p.rate;
            } else {
                out["neighbor"] = p.neighbor;
                out["remote_id"] = p.remote_id ? json(to_string(*p.remote_id)) : json(nullptr);
                out["mirrored_state"] = to_string(p.mirrored_state);
            }
        },
        payload);
    return out;
}

NodeId node_from_json(const json& j)
{
    auto id = parse_node_id(j.get<std::string>());
    if (!id) {
        throw Error(ErrorCode::kParseError, "bad node id " + j.dump());
    }
    return *id;
}

IntentId intent_from_json(const json& j)
{
    auto id = parse_intent_id(j.get<std::string>());
    if (!id) {
        throw Error(ErrorCode::kParseError, "bad intent id " + j.dump());
    }
    return *id;
}

IntentState state_from_json(const json& j)
{
    auto s = parse_intent_state(j.get<std::string>());
    if (!s) {
        throw Error(ErrorCode::kParseError, "bad intent state " + j.dump());
    }
    return *s;
}

IntentPayload payload_from_json(const json& j)
{
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "connectivity") {
        ConnectivityIntent c{node_from_json(j.at("src")), node_from_json(j.at("dst")), j.at("rate").get<double>(), {}};
        for (const auto& e : j.at("excluded_links")) {
            c.excluded_links.push_back(LinkKey::of(node_from_json(e.at(0)), node_from_json(e.at(1))));
        }
        return c;
    }
    if (kind == "lightpath") {
        LightpathIntent lp;
        for (const auto& n : j.at("path")) {
            lp.path.push_back(node_from_json(n));
        }
        const auto& m = j.at("mode");
        lp.mode = {m.at("rate").get<double>(), m.at("reach").get<double>(), m.at("slots").get<std::uint32_t>()};
        lp.slots = {j.at("first_slot").get<std::uint32_t>(), j.at("width").get<std::uint32_t>()};
        return lp;
    }
    if (kind == "router-port") {
        return RouterPortIntent{node_from_json(j.at("node")), j.at("rate").get<double>()};
    }
    if (kind == "remote") {
        RemoteIntent r;
        r.neighbor = j.at("neighbor").get<DomainId>();
        if (!j.at("remote_id").is_null()) {
            r.remote_id = intent_from_json(j.at("remote_id"));
        }
        r.mirrored_state = state_from_json(j.at("mirrored_state"));
        return r;
    }
    throw Error(ErrorCode::kParseError, "unknown intent kind '" + kind + "'");
}

json dag_json(const IntentDAG& dag)
{
    json nodes = json::array();
    for (const auto& [id, node] : dag.nodes()) {
        json children = json::array();
        for (IntentId c : node.children) {
            children.push_back(to_string(c));
        }
        nodes.push_back({{"id", to_string(id)},
                         {"state", to_string(node.state)},
                         {"payload", payload_json(node.payload)},
                         {"children", children}});
    }
    return {{"owner", dag.owner()}, {"next_serial", dag.next_serial()}, {"nodes", nodes}};
}

IntentDAG dag_from_json(const json& j)
{
    std::map<IntentId, IntentDAG::Node> nodes;
    for (const auto& n : j.at("nodes")) {
        IntentDAG::Node node;
        node.payload = payload_from_json(n.at("payload"));
        node.state = state_from_json(n.at("state"));
        for (const auto& c : n.at("children")) {
            node.children.push_back(intent_from_json(c));
        }
        nodes.emplace(intent_from_json(n.at("id")), std::move(node));
    }
    for (const auto& [id, node] : nodes) {
        for (IntentId c : node.children) {
            auto it = nodes.find(c);
            if (it == nodes.end()) {
                throw Error(ErrorCode::kValidationError, "dangling edge to " + to_string(c));
            }
            it->second.parents.push_back(id);
        }
    }
    for (auto& [_, node] : nodes) {
        std::sort(node.children.begin(), node.children.end());
        std::sort(node.parents.begin(), node.parents.end());
    }
    return IntentDAG::from_parts(j.at("owner").get<DomainId>(), j.at("next_serial").get<std::uint64_t>(),
                                 std::move(nodes));
}

// Reserves what every installed or failed resource leaf held when the
// snapshot was taken.
void replay_reservations(DomainController& domain)
{
    const IntentDAG& dag = domain.dag();
    NetworkGraph& graph = domain.graph();
    ReservationTransaction txn;
    for (const auto& [id, node] : dag.nodes()) {
        if (!node.children.empty() || (node.state != IntentState::kInstalled && node.state != IntentState::kFailed)) {
            continue;
        }
        if (const auto* lp = std::get_if<LightpathIntent>(&node.payload)) {
            txn.claim_spectrum(id, graph.path_links(lp->path), lp->slots);
            txn.claim_add_drop(id, lp->path.front());
            txn.claim_add_drop(id, lp->path.back());
        } else if (const auto* port = std::get_if<RouterPortIntent>(&node.payload)) {
            txn.claim_ports(id, port->node, port->rate, ports_needed(graph.router(port->node), port->rate));
        }
    }
    // Down links reject new claims, so bring them up for the replay.
    std::vector<LinkKey> down;
    for (const auto& [key, link] : graph.fiber_links()) {
        if (!link.operational) {
            down.push_back(key);
        }
    }
    for (const auto& key : down) {
        graph.set_operational(key, true);
    }
    auto conflict = domain.ledger().commit(graph, txn);
    for (const auto& key : down) {
        graph.set_operational(key, false);
    }
    if (conflict) {
        throw Error(ErrorCode::kValidationError, "snapshot reservations collide: " + conflict->detail);
    }
    for (const auto& [id, node] : dag.nodes()) {
        const auto* lp = std::get_if<LightpathIntent>(&node.payload);
        if (lp != nullptr && node.children.empty() &&
            (node.state == IntentState::kInstalled || node.state == IntentState::kFailed)) {
            graph.add_virtual_link({LinkKey::of(lp->path.front(), lp->path.back()), lp->mode.rate, id});
        }
    }
}

} // namespace

std::string export_dag(const IntentDAG& dag)
{
    std::string out = "digraph \"intents\" {\n";
    out += "  node [shape=box];\n";
    for (const auto& [id, node] : dag.nodes()) {
        std::string label = fmt::format("{} / {} / {}", kind_name(node.payload), to_string(id),
                                        to_string(dag.aggregate_state(id)));
        out += fmt::format("  \"{}\" [label=\"{}\"];\n", dot_escape(to_string(id)), dot_escape(label));
    }
    for (const auto& [parent, child] : dag.edges()) {
        out += fmt::format("  \"{}\" -> \"{}\";\n", dot_escape(to_string(parent)), dot_escape(to_string(child)));
    }
    out += "}\n";
    return out;
}

std::string export_topology(std::span<const DomainController> domains)
{
    std::vector<const DomainController*> sorted;
    for (const auto& d : domains) {
        sorted.push_back(&d);
    }
    std::sort(sorted.begin(), sorted.end(), [](const auto* a, const auto* b) { return a->id() < b->id(); });

    json out_domains = json::array();
    for (const DomainController* d : sorted) {
        const NetworkGraph& graph = d->graph();
        json nodes = json::array();
        for (const auto& [id, router] : graph.routers()) {
            const OxcView& oxc = graph.oxc(id);
            auto name = d->node_names().find(id);
            nodes.push_back({{"id", to_string(id)},
                             {"name", name == d->node_names().end() ? json(nullptr) : json(name->second)},
                             {"stub", !d->owns(id)},
                             {"port_count", router.port_count},
                             {"port_rate", router.port_rate},
                             {"ports_used", router.ports_used},
                             {"add_drop_capacity", oxc.add_drop_capacity},
                             {"add_drop_used", oxc.add_drop_used}});
        }
        json links = json::array();
        for (const auto& [key, link] : graph.fiber_links()) {
            json slots = json::array();
            for (const auto& holder : link.slots) {
                slots.push_back(holder ? json(to_string(*holder)) : json(nullptr));
            }
            links.push_back({{"a", to_string(key.a)},
                             {"b", to_string(key.b)},
                             {"length", link.length},
                             {"operational", link.operational},
                             {"slots", slots}});
        }
        std::vector<VirtualLink> vls = graph.virtual_links();
        std::sort(vls.begin(), vls.end(), [](const auto& x, const auto& y) { return x.lightpath < y.lightpath; });
        json virtual_links = json::array();
        for (const auto& vl : vls) {
            virtual_links.push_back({{"a", to_string(vl.endpoints.a)},
                                     {"b", to_string(vl.endpoints.b)},
                                     {"capacity", vl.capacity},
                                     {"lightpath", to_string(vl.lightpath)}});
        }
        json borders = json::array();
        for (const auto& bl : d->border_links()) {
            borders.push_back({{"local", to_string(bl.local)}, {"remote", to_string(bl.remote)}, {"length", bl.length}});
        }
        json overlays = json::array();
        for (const auto& [id, node] : d->dag().nodes()) {
            const auto* lp = std::get_if<LightpathIntent>(&node.payload);
            if (lp == nullptr || (node.state != IntentState::kInstalled && node.state != IntentState::kFailed)) {
                continue;
            }
            json roots = json::array();
            for (IntentId r : d->dag().root_ancestors(id)) {
                roots.push_back(to_string(r));
            }
            overlays.push_back({{"lightpath", to_string(id)},
                                {"state", to_string(node.state)},
                                {"roots", roots},
                                {"path", node_ids_json(lp->path)},
                                {"mode", mode_json(lp->mode)},
                                {"slot_range", {lp->slots.first, lp->slots.last()}}});
        }
        out_domains.push_back({{"id", d->id()},
                               {"grid_size", graph.grid_size()},
                               {"nodes", nodes},
                               {"links", links},
                               {"virtual_links", virtual_links},
                               {"border_links", borders},
                               {"overlays", overlays}});
    }
    json doc = {{"domains", out_domains}};
    return doc.dump(2) + "\n";
}

std::string metrics_csv(const Metrics& metrics)
{
    std::string out = "metric,value\n";
    out += fmt::format("offered,{}\n", metrics.offered);
    out += fmt::format("blocked,{}\n", metrics.blocked);
    out += fmt::format("installed_ok,{}\n", metrics.installed_ok);
    out += fmt::format("failures_recovered,{}\n", metrics.failures_recovered);
    out += fmt::format("mean_slot_utilization,{:.6f}\n", metrics.mean_slot_utilization());
    out += "intent_id,outcome,compile_time,install_time\n";
    for (const auto& r : metrics.intents) {
        out += fmt::format("{},{},{},{}\n", to_string(r.id), r.outcome, fmt_optional_time(r.compile_time),
                           fmt_optional_time(r.install_time));
    }
    return out;
}

std::string render_log(const std::vector<std::string>& lines)
{
    std::string out;
    for (const auto& line : lines) {
        out += line;
        out += '\n';
    }
    return out;
}

std::string save_snapshot(const Scenario& scenario, std::span<const DomainController> domains)
{
    json doc;
    doc["format"] = "ibnsim/snapshot-v1";
    doc["scenario"] = json::parse(render_scenario(scenario));
    json ds = json::array();
    for (const auto& d : domains) {
        json down = json::array();
        for (const auto& [key, link] : d.graph().fiber_links()) {
            if (!link.operational) {
                down.push_back({to_string(key.a), to_string(key.b)});
            }
        }
        ds.push_back({{"id", d.id()}, {"down_links", down}, {"dag", dag_json(d.dag())}});
    }
    doc["domains"] = ds;
    return doc.dump(2) + "\n";
}

std::vector<DomainController> restore_snapshot(std::string_view document)
{
    json doc;
    try {
        doc = json::parse(document);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::kParseError, std::string("snapshot: ") + e.what());
    }
    try {
        if (doc.at("format") != "ibnsim/snapshot-v1") {
            throw Error(ErrorCode::kParseError, "snapshot: unsupported format");
        }
        Scenario scenario = parse_scenario(doc.at("scenario").dump());
        std::vector<DomainController> domains = build_domains(scenario);
        for (const auto& entry : doc.at("domains")) {
            DomainId id = entry.at("id").get<DomainId>();
            auto it = std::find_if(domains.begin(), domains.end(), [&](const auto& d) { return d.id() == id; });
            if (it == domains.end()) {
                throw Error(ErrorCode::kValidationError, fmt::format("snapshot: unknown domain {}", id));
            }
            for (const auto& link : entry.at("down_links")) {
                it->graph().set_operational(LinkKey::of(node_from_json(link.at(0)), node_from_json(link.at(1))),
                                            false);
            }
            it->dag() = dag_from_json(entry.at("dag"));
            replay_reservations(*it);
        }
        return domains;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::kParseError, std::string("snapshot: ") + e.what());
    }
}

} // namespace ibnsim
