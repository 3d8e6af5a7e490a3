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

#include "ibnsim/scenario.hpp"

#include "ibnsim/error.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

#include "json.hpp"

namespace ibnsim {

namespace {

using nlohmann::json;

[[noreturn]] void fail_field(const std::string& path, const std::string& what)
{
    throw Error(ErrorCode::kParseError, "field '" + path + "': " + what);
}

[[noreturn]] void invalid(const std::string& path, const std::string& what)
{
    throw Error(ErrorCode::kValidationError, path + ": " + what);
}

/// Typed access to one JSON object, with field paths in every error.
class Fields {
public:
    Fields(const json& j, std::string path, std::initializer_list<std::string_view> allowed)
        : j_(j)
        , path_(std::move(path))
    {
        if (!j_.is_object()) {
            fail_field(path_, "expected object");
        }
        for (const auto& [key, _] : j_.items()) {
            if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
                fail_field(sub(key), "unknown field");
            }
        }
    }

    std::string sub(std::string_view key) const
    {
        return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
    }

    bool has(std::string_view key) const { return j_.contains(key); }

    const json& raw(std::string_view key) const
    {
        auto it = j_.find(key);
        if (it == j_.end()) {
            fail_field(sub(key), "missing");
        }
        return *it;
    }

    std::string str(std::string_view key) const
    {
        const json& v = raw(key);
        if (!v.is_string()) {
            fail_field(sub(key), "expected string");
        }
        return v.get<std::string>();
    }

    double number(std::string_view key) const
    {
        const json& v = raw(key);
        if (!v.is_number()) {
            fail_field(sub(key), "expected number");
        }
        return v.get<double>();
    }

    double number_or(std::string_view key, double fallback) const { return has(key) ? number(key) : fallback; }

    std::uint64_t unsigned_int(std::string_view key) const
    {
        const json& v = raw(key);
        if (!v.is_number_unsigned()) {
            fail_field(sub(key), "expected non-negative integer");
        }
        return v.get<std::uint64_t>();
    }

    std::uint64_t unsigned_or(std::string_view key, std::uint64_t fallback) const
    {
        return has(key) ? unsigned_int(key) : fallback;
    }

    const json& array(std::string_view key) const
    {
        const json& v = raw(key);
        if (!v.is_array()) {
            fail_field(sub(key), "expected array");
        }
        return v;
    }

private:
    const json& j_;
    std::string path_;
};

std::string indexed(const std::string& base, std::size_t i)
{
    return base + "[" + std::to_string(i) + "]";
}

std::uint32_t narrow_u32(std::uint64_t v, const std::string& path)
{
    if (v > UINT32_MAX) {
        fail_field(path, "value out of range");
    }
    return static_cast<std::uint32_t>(v);
}

LinkSpec parse_link(const json& j, const std::string& path)
{
    Fields f(j, path, {"a", "b", "length"});
    return {f.str("a"), f.str("b"), f.number("length")};
}

std::string_view event_type_name(ScenarioEventKind kind)
{
    switch (kind) {
    case ScenarioEventKind::kArrival: return "arrival";
    case ScenarioEventKind::kDeparture: return "departure";
    case ScenarioEventKind::kLinkDown: return "link_down";
    case ScenarioEventKind::kLinkUp: return "link_up";
    }
    return "?";
}

EventSpec parse_event(const json& j, const std::string& path)
{
    if (!j.is_object() || !j.contains("type") || !j.at("type").is_string()) {
        fail_field(path + ".type", "expected one of arrival, departure, link_down, link_up");
    }
    const std::string type = j.at("type").get<std::string>();
    EventSpec e;
    if (type == "arrival") {
        Fields f(j, path, {"type", "time", "src", "dst", "rate", "holding", "excluded_links"});
        e.kind = ScenarioEventKind::kArrival;
        e.time = f.number("time");
        e.src = f.str("src");
        e.dst = f.str("dst");
        e.rate = f.number("rate");
        if (f.has("holding")) {
            e.holding = f.number("holding");
        }
        if (f.has("excluded_links")) {
            const json& arr = f.array("excluded_links");
            for (std::size_t i = 0; i < arr.size(); ++i) {
                Fields lf(arr[i], indexed(f.sub("excluded_links"), i), {"a", "b"});
                e.excluded_links.emplace_back(lf.str("a"), lf.str("b"));
            }
        }
    } else if (type == "departure") {
        Fields f(j, path, {"type", "time", "arrival"});
        e.kind = ScenarioEventKind::kDeparture;
        e.time = f.number("time");
        e.arrival = f.unsigned_int("arrival");
    } else if (type == "link_down" || type == "link_up") {
        Fields f(j, path, {"type", "time", "a", "b"});
        e.kind = type == "link_down" ? ScenarioEventKind::kLinkDown : ScenarioEventKind::kLinkUp;
        e.time = f.number("time");
        e.a = f.str("a");
        e.b = f.str("b");
    } else {
        fail_field(path + ".type", "unknown event type '" + type + "'");
    }
    return e;
}

Scenario parse_document(const json& root)
{
    Fields f(root, "", {"schema", "grid_slots", "k_paths", "recovery", "seed", "modes", "domains",
                        "border_links", "traffic", "events"});
    if (f.str("schema") != kScenarioSchema) {
        invalid("schema", "expected '" + std::string(kScenarioSchema) + "'");
    }
    Scenario s;
    s.grid_size = narrow_u32(f.unsigned_or("grid_slots", NetworkGraph::kDefaultGridSize), "grid_slots");
    s.k_paths = f.unsigned_or("k_paths", 3);
    if (f.has("recovery")) {
        auto policy = parse_recovery_policy(f.str("recovery"));
        if (!policy) {
            fail_field("recovery", "expected 'none' or 'auto-recompile'");
        }
        s.recovery = *policy;
    }
    s.seed = f.unsigned_or("seed", 1);

    if (f.has("modes")) {
        s.modes.clear();
        const json& arr = f.array("modes");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            Fields m(arr[i], indexed("modes", i), {"rate", "reach", "slots"});
            s.modes.push_back({m.number("rate"), m.number("reach"),
                               narrow_u32(m.unsigned_int("slots"), m.sub("slots"))});
        }
    }

    const json& domains = f.array("domains");
    for (std::size_t i = 0; i < domains.size(); ++i) {
        const std::string dpath = indexed("domains", i);
        Fields d(domains[i], dpath, {"id", "nodes", "links"});
        DomainSpec spec;
        spec.id = narrow_u32(d.unsigned_int("id"), d.sub("id"));
        const json& nodes = d.array("nodes");
        for (std::size_t n = 0; n < nodes.size(); ++n) {
            Fields nf(nodes[n], indexed(d.sub("nodes"), n), {"name", "ports", "port_rate", "add_drop"});
            NodeSpec node;
            node.name = nf.str("name");
            node.ports = narrow_u32(nf.unsigned_or("ports", node.ports), nf.sub("ports"));
            node.port_rate = nf.number_or("port_rate", node.port_rate);
            node.add_drop = narrow_u32(nf.unsigned_or("add_drop", node.add_drop), nf.sub("add_drop"));
            spec.nodes.push_back(std::move(node));
        }
        if (d.has("links")) {
            const json& links = d.array("links");
            for (std::size_t l = 0; l < links.size(); ++l) {
                spec.links.push_back(parse_link(links[l], indexed(d.sub("links"), l)));
            }
        }
        s.domains.push_back(std::move(spec));
    }

    if (f.has("border_links")) {
        const json& arr = f.array("border_links");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            s.border_links.push_back(parse_link(arr[i], indexed("border_links", i)));
        }
    }

    if (f.has("traffic")) {
        Fields t(f.raw("traffic"), "traffic",
                 {"count", "arrival_rate", "mean_holding", "start_time", "rates", "pairs"});
        TrafficSpec traffic;
        traffic.count = t.unsigned_int("count");
        traffic.arrival_rate = t.number("arrival_rate");
        traffic.mean_holding = t.number("mean_holding");
        traffic.start_time = t.number_or("start_time", 0.0);
        if (t.has("rates")) {
            traffic.rates.clear();
            const json& arr = t.array("rates");
            for (std::size_t i = 0; i < arr.size(); ++i) {
                if (!arr[i].is_number()) {
                    fail_field(indexed("traffic.rates", i), "expected number");
                }
                traffic.rates.push_back(arr[i].get<double>());
            }
        }
        if (t.has("pairs")) {
            const json& arr = t.array("pairs");
            for (std::size_t i = 0; i < arr.size(); ++i) {
                Fields p(arr[i], indexed("traffic.pairs", i), {"src", "dst", "weight"});
                traffic.pairs.push_back({p.str("src"), p.str("dst"), p.number_or("weight", 1.0)});
            }
        }
        s.traffic = std::move(traffic);
    }

    if (f.has("events")) {
        const json& arr = f.array("events");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            s.events.push_back(parse_event(arr[i], indexed("events", i)));
        }
    }
    return s;
}

bool positive_finite(double v)
{
    return std::isfinite(v) && v > 0.0;
}

void validate(const Scenario& s)
{
    if (s.grid_size == 0) {
        invalid("grid_slots", "must be at least 1");
    }
    if (s.k_paths == 0) {
        invalid("k_paths", "must be at least 1");
    }
    if (s.modes.empty()) {
        invalid("modes", "at least one transmission mode is required");
    }
    for (std::size_t i = 0; i < s.modes.size(); ++i) {
        const auto& m = s.modes[i];
        if (!positive_finite(m.rate) || !positive_finite(m.reach) || m.slots == 0) {
            invalid(indexed("modes", i), "rate, reach and slots must be positive");
        }
        if (m.slots > s.grid_size) {
            invalid(indexed("modes", i), "needs more slots than the grid has");
        }
    }
    if (s.domains.empty()) {
        invalid("domains", "at least one domain is required");
    }

    std::map<std::string, NodeId> names;
    std::set<DomainId> domain_ids;
    for (std::size_t i = 0; i < s.domains.size(); ++i) {
        const auto& d = s.domains[i];
        const std::string dpath = indexed("domains", i);
        if (!domain_ids.insert(d.id).second) {
            invalid(dpath + ".id", "duplicate domain id " + std::to_string(d.id));
        }
        for (std::size_t n = 0; n < d.nodes.size(); ++n) {
            const auto& node = d.nodes[n];
            const std::string npath = indexed(dpath + ".nodes", n);
            if (node.name.empty()) {
                invalid(npath + ".name", "must not be empty");
            }
            auto [it, fresh] = names.emplace(node.name, NodeId{d.id, static_cast<std::uint32_t>(n + 1)});
            if (!fresh) {
                invalid(npath + ".name", "node '" + node.name + "' is already owned by domain " +
                                             std::to_string(it->second.domain));
            }
            if (!positive_finite(node.port_rate)) {
                invalid(npath + ".port_rate", "must be positive");
            }
        }
    }

    auto lookup = [&](const std::string& name, const std::string& path) {
        auto it = names.find(name);
        if (it == names.end()) {
            invalid(path, "unknown node '" + name + "'");
        }
        return it->second;
    };

    std::set<LinkKey> fibers;
    for (std::size_t i = 0; i < s.domains.size(); ++i) {
        const auto& d = s.domains[i];
        for (std::size_t l = 0; l < d.links.size(); ++l) {
            const auto& link = d.links[l];
            const std::string lpath = indexed("domains[" + std::to_string(i) + "].links", l);
            NodeId a = lookup(link.a, lpath + ".a");
            NodeId b = lookup(link.b, lpath + ".b");
            if (a.domain != d.id || b.domain != d.id) {
                invalid(lpath, "intra-domain link must join nodes of domain " + std::to_string(d.id));
            }
            if (a == b) {
                invalid(lpath, "self-loop");
            }
            if (!positive_finite(link.length)) {
                invalid(lpath + ".length", "must be positive");
            }
            if (!fibers.insert(LinkKey::of(a, b)).second) {
                invalid(lpath, "duplicate link " + link.a + "-" + link.b);
            }
        }
    }
    for (std::size_t i = 0; i < s.border_links.size(); ++i) {
        const auto& link = s.border_links[i];
        const std::string lpath = indexed("border_links", i);
        NodeId a = lookup(link.a, lpath + ".a");
        NodeId b = lookup(link.b, lpath + ".b");
        if (a.domain == b.domain) {
            invalid(lpath, "border link must join two different domains");
        }
        if (!positive_finite(link.length)) {
            invalid(lpath + ".length", "must be positive");
        }
        if (!fibers.insert(LinkKey::of(a, b)).second) {
            invalid(lpath, "duplicate link " + link.a + "-" + link.b);
        }
    }

    if (s.traffic) {
        const auto& t = *s.traffic;
        if (!positive_finite(t.arrival_rate)) {
            invalid("traffic.arrival_rate", "must be positive");
        }
        if (!positive_finite(t.mean_holding)) {
            invalid("traffic.mean_holding", "must be positive");
        }
        if (!std::isfinite(t.start_time) || t.start_time < 0.0) {
            invalid("traffic.start_time", "must be non-negative");
        }
        if (t.rates.empty()) {
            invalid("traffic.rates", "must not be empty");
        }
        for (std::size_t i = 0; i < t.rates.size(); ++i) {
            if (!positive_finite(t.rates[i])) {
                invalid(indexed("traffic.rates", i), "must be positive");
            }
        }
        for (std::size_t i = 0; i < t.pairs.size(); ++i) {
            const auto& p = t.pairs[i];
            const std::string ppath = indexed("traffic.pairs", i);
            if (lookup(p.src, ppath + ".src") == lookup(p.dst, ppath + ".dst")) {
                invalid(ppath, "source equals destination");
            }
            if (!positive_finite(p.weight)) {
                invalid(ppath + ".weight", "must be positive");
            }
        }
        if (t.pairs.empty() && t.count > 0 && names.size() < 2) {
            invalid("traffic", "needs at least two nodes");
        }
    }

    std::size_t arrivals = 0;
    for (std::size_t i = 0; i < s.events.size(); ++i) {
        const auto& e = s.events[i];
        const std::string epath = indexed("events", i);
        if (!std::isfinite(e.time) || e.time < 0.0) {
            invalid(epath + ".time", "must be non-negative");
        }
        switch (e.kind) {
        case ScenarioEventKind::kArrival: {
            if (lookup(e.src, epath + ".src") == lookup(e.dst, epath + ".dst")) {
                invalid(epath, "source equals destination");
            }
            if (!positive_finite(e.rate)) {
                invalid(epath + ".rate", "must be positive");
            }
            if (e.holding && !positive_finite(*e.holding)) {
                invalid(epath + ".holding", "must be positive");
            }
            for (std::size_t x = 0; x < e.excluded_links.size(); ++x) {
                const std::string xpath = indexed(epath + ".excluded_links", x);
                NodeId a = lookup(e.excluded_links[x].first, xpath + ".a");
                NodeId b = lookup(e.excluded_links[x].second, xpath + ".b");
                if (!fibers.contains(LinkKey::of(a, b))) {
                    invalid(xpath, "no such link");
                }
            }
            ++arrivals;
            break;
        }
        case ScenarioEventKind::kDeparture:
            if (e.arrival >= arrivals) {
                invalid(epath + ".arrival", "must reference an earlier arrival event");
            }
            break;
        case ScenarioEventKind::kLinkDown:
        case ScenarioEventKind::kLinkUp: {
            NodeId a = lookup(e.a, epath + ".a");
            NodeId b = lookup(e.b, epath + ".b");
            if (!fibers.contains(LinkKey::of(a, b))) {
                invalid(epath, "no such link " + e.a + "-" + e.b);
            }
            break;
        }
        }
    }
}

json render_link(const LinkSpec& l)
{
    return json{{"a", l.a}, {"b", l.b}, {"length", l.length}};
}

} // namespace

std::map<std::string, NodeId> Scenario::node_ids() const
{
    std::map<std::string, NodeId> out;
    for (const auto& d : domains) {
        for (std::size_t n = 0; n < d.nodes.size(); ++n) {
            out.emplace(d.nodes[n].name, NodeId{d.id, static_cast<std::uint32_t>(n + 1)});
        }
    }
    return out;
}

std::optional<NodeId> Scenario::resolve(std::string_view name) const
{
    for (const auto& d : domains) {
        for (std::size_t n = 0; n < d.nodes.size(); ++n) {
            if (d.nodes[n].name == name) {
                return NodeId{d.id, static_cast<std::uint32_t>(n + 1)};
            }
        }
    }
    return std::nullopt;
}

Scenario parse_scenario(std::string_view document)
{
    json root;
    try {
        root = json::parse(document.begin(), document.end());
    } catch (const json::parse_error& e) {
        std::size_t line = 1;
        std::size_t column = 1;
        std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, document.size());
        for (std::size_t i = 0; i < end; ++i) {
            if (document[i] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
        }
        throw Error(ErrorCode::kParseError,
                    "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + e.what());
    }
    Scenario s = parse_document(root);
    validate(s);
    return s;
}

Scenario load_scenario(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::kParseError, "cannot read " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_scenario(buffer.str());
}

std::string render_scenario(const Scenario& s)
{
    json root;
    root["schema"] = kScenarioSchema;
    root["grid_slots"] = s.grid_size;
    root["k_paths"] = s.k_paths;
    root["recovery"] = to_string(s.recovery);
    root["seed"] = s.seed;
    root["modes"] = json::array();
    for (const auto& m : s.modes) {
        root["modes"].push_back({{"rate", m.rate}, {"reach", m.reach}, {"slots", m.slots}});
    }
    root["domains"] = json::array();
    for (const auto& d : s.domains) {
        json jd{{"id", d.id}, {"nodes", json::array()}, {"links", json::array()}};
        for (const auto& n : d.nodes) {
            jd["nodes"].push_back(
                {{"name", n.name}, {"ports", n.ports}, {"port_rate", n.port_rate}, {"add_drop", n.add_drop}});
        }
        for (const auto& l : d.links) {
            jd["links"].push_back(render_link(l));
        }
        root["domains"].push_back(std::move(jd));
    }
    root["border_links"] = json::array();
    for (const auto& l : s.border_links) {
        root["border_links"].push_back(render_link(l));
    }
    if (s.traffic) {
        const auto& t = *s.traffic;
        json jt{{"count", t.count},
                {"arrival_rate", t.arrival_rate},
                {"mean_holding", t.mean_holding},
                {"start_time", t.start_time},
                {"rates", t.rates},
                {"pairs", json::array()}};
        for (const auto& p : t.pairs) {
            jt["pairs"].push_back({{"src", p.src}, {"dst", p.dst}, {"weight", p.weight}});
        }
        root["traffic"] = std::move(jt);
    }
    root["events"] = json::array();
    for (const auto& e : s.events) {
        json je{{"type", event_type_name(e.kind)}, {"time", e.time}};
        switch (e.kind) {
        case ScenarioEventKind::kArrival:
            je["src"] = e.src;
            je["dst"] = e.dst;
            je["rate"] = e.rate;
            if (e.holding) {
                je["holding"] = *e.holding;
            }
            if (!e.excluded_links.empty()) {
                je["excluded_links"] = json::array();
                for (const auto& [a, b] : e.excluded_links) {
                    je["excluded_links"].push_back({{"a", a}, {"b", b}});
                }
            }
            break;
        case ScenarioEventKind::kDeparture:
            je["arrival"] = e.arrival;
            break;
        case ScenarioEventKind::kLinkDown:
        case ScenarioEventKind::kLinkUp:
            je["a"] = e.a;
            je["b"] = e.b;
            break;
        }
        root["events"].push_back(std::move(je));
    }
    return root.dump(2) + "\n";
}

std::vector<DomainController> build_domains(const Scenario& s)
{
    const auto ids = s.node_ids();
    std::map<NodeId, const NodeSpec*> specs;
    for (const auto& d : s.domains) {
        for (const auto& n : d.nodes) {
            specs.emplace(ids.at(n.name), &n);
        }
    }
    auto add_node = [&](NetworkGraph& g, NodeId id) {
        const NodeSpec& n = *specs.at(id);
        g.add_node(RouterView{id, n.ports, n.port_rate, 0}, OxcView{id, n.add_drop, 0});
    };

    DomainConfig config{s.modes, s.k_paths, s.recovery};
    std::map<DomainId, NetworkGraph> graphs;
    for (const auto& d : s.domains) {
        NetworkGraph g(s.grid_size);
        for (const auto& n : d.nodes) {
            add_node(g, ids.at(n.name));
        }
        for (const auto& l : d.links) {
            g.add_fiber_link(ids.at(l.a), ids.at(l.b), l.length);
        }
        graphs.emplace(d.id, std::move(g));
    }
    // The lower domain id administers each border link and holds a stub of
    // the far endpoint.
    for (const auto& l : s.border_links) {
        NodeId a = ids.at(l.a);
        NodeId b = ids.at(l.b);
        NodeId low = a.domain < b.domain ? a : b;
        NodeId high = a.domain < b.domain ? b : a;
        NetworkGraph& g = graphs.at(low.domain);
        if (!g.has_node(high)) {
            add_node(g, high);
        }
        g.add_fiber_link(low, high, l.length);
    }

    std::vector<DomainController> out;
    for (auto& [id, g] : graphs) {
        out.emplace_back(id, std::move(g), config);
    }
    std::map<DomainId, std::set<DomainId>> adjacency;
    for (const auto& l : s.border_links) {
        NodeId a = ids.at(l.a);
        NodeId b = ids.at(l.b);
        find_if(out.begin(), out.end(), [&](auto& c) { return c.id() == a.domain; })
            ->add_border_link({a, b, l.length});
        find_if(out.begin(), out.end(), [&](auto& c) { return c.id() == b.domain; })
            ->add_border_link({b, a, l.length});
        adjacency[a.domain].insert(b.domain);
        adjacency[b.domain].insert(a.domain);
    }

    // Hop distances between domains (BFS on the domain adjacency graph).
    std::map<DomainId, std::map<DomainId, std::uint32_t>> hops;
    for (const auto& c : out) {
        auto& dist = hops[c.id()];
        dist[c.id()] = 0;
        std::deque<DomainId> queue{c.id()};
        while (!queue.empty()) {
            DomainId at = queue.front();
            queue.pop_front();
            for (DomainId next : adjacency[at]) {
                if (!dist.contains(next)) {
                    dist[next] = dist[at] + 1;
                    queue.push_back(next);
                }
            }
        }
    }
    for (auto& c : out) {
        for (const auto& [name, id] : ids) {
            c.register_node(id);
            if (c.graph().has_node(id)) {
                c.set_node_name(id, name);
            }
        }
        for (DomainId neighbor : adjacency[c.id()]) {
            for (const auto& [destination, h] : hops[neighbor]) {
                if (destination != c.id()) {
                    c.set_route(destination, neighbor, h + 1);
                }
            }
        }
    }
    return out;
}

} // namespace ibnsim
