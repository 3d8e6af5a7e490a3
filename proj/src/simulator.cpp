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

#include "ibnsim/simulator.hpp"

#include "ibnsim/compilation.hpp"
#include "ibnsim/error.hpp"
#include "ibnsim/multidomain.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

namespace ibnsim {

namespace {

double uniform01(std::mt19937_64& rng)
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Inverse CDF of Exp(1); u in [0, 1) keeps the argument of log in (0, 1].
double unit_exponential(std::mt19937_64& rng)
{
    return -std::log(1.0 - uniform01(rng));
}

DomainController& owner_of_link(std::span<DomainController> domains, const LinkKey& link)
{
    for (auto& d : domains) {
        if (d.graph().find_link(link.a, link.b) != nullptr) {
            return d;
        }
    }
    throw Error(ErrorCode::kUnknownLink, to_string(link));
}

/// Recompiles a failed connectivity intent from scratch and reinstalls it.
/// On failure the intent is left as a failed leaf holding nothing.
bool recompile_and_install(DomainController& domain, IntentId id)
{
    IntentDAG& dag = domain.dag();
    if (!dag.is_leaf(id)) {
        uninstall_intent(domain, id);
        dag.detach_children(id, IntentState::kFailed);
    }
    auto result = compile_connectivity(domain, id);
    if (result.outcome != CompileOutcome::kCompiled) {
        return false;
    }
    if (install_intent(domain, id) == InstallOutcome::kInstalled) {
        return true;
    }
    dag.detach_children(id, IntentState::kFailed);
    return false;
}

std::string fmt_time(double t)
{
    return fmt::format("{:.6f}", t);
}

} // namespace

std::string_view to_string(EventKind kind)
{
    switch (kind) {
    case EventKind::kArrival: return "ARRIVAL";
    case EventKind::kDeparture: return "DEPARTURE";
    case EventKind::kLinkDown: return "LINK_DOWN";
    case EventKind::kLinkUp: return "LINK_UP";
    }
    return "?";
}

std::vector<Event> generate_traffic(const TrafficConfig& config, std::uint64_t seed)
{
    if (!(config.arrival_rate > 0.0) || !std::isfinite(config.arrival_rate)) {
        throw Error(ErrorCode::kInvalidConfig, "arrival rate must be positive");
    }
    if (!(config.mean_holding > 0.0) || !std::isfinite(config.mean_holding)) {
        throw Error(ErrorCode::kInvalidConfig, "mean holding time must be positive");
    }
    std::vector<Event> out;
    if (config.count == 0) {
        return out;
    }
    if (config.pairs.empty() || config.rates.empty()) {
        throw Error(ErrorCode::kInvalidConfig, "traffic needs node pairs and rates");
    }
    double total_weight = 0.0;
    for (const auto& p : config.pairs) {
        if (!(p.weight > 0.0) || p.src == p.dst) {
            throw Error(ErrorCode::kInvalidConfig, "pair weights must be positive and endpoints distinct");
        }
        total_weight += p.weight;
    }

    std::mt19937_64 rng(seed);
    double t = config.start_time;
    out.reserve(config.count);
    for (std::size_t i = 0; i < config.count; ++i) {
        t += unit_exponential(rng) / config.arrival_rate;
        double holding = unit_exponential(rng) * config.mean_holding;

        double pick = uniform01(rng) * total_weight;
        std::size_t pair = config.pairs.size() - 1;
        double cumulative = 0.0;
        for (std::size_t j = 0; j < config.pairs.size(); ++j) {
            cumulative += config.pairs[j].weight;
            if (pick < cumulative) {
                pair = j;
                break;
            }
        }
        std::size_t rate = std::min(config.rates.size() - 1,
                                    static_cast<std::size_t>(uniform01(rng) * static_cast<double>(config.rates.size())));

        Event e;
        e.time = t;
        e.kind = EventKind::kArrival;
        e.demand = ConnectivityIntent{config.pairs[pair].src, config.pairs[pair].dst, config.rates[rate], {}};
        e.holding = holding;
        out.push_back(std::move(e));
    }
    return out;
}

double Metrics::mean_slot_utilization() const
{
    if (slot_utilization_samples.empty()) {
        return 0.0;
    }
    const auto& first = slot_utilization_samples.front();
    const auto& last = slot_utilization_samples.back();
    double span = last.time - first.time;
    if (!(span > 0.0)) {
        return last.utilization;
    }
    double area = 0.0;
    for (std::size_t i = 0; i + 1 < slot_utilization_samples.size(); ++i) {
        const auto& s = slot_utilization_samples[i];
        area += s.utilization * (slot_utilization_samples[i + 1].time - s.time);
    }
    return area / span;
}

MonitorReport monitor_failure(std::span<DomainController> domains, const LinkKey& link)
{
    DomainController& domain = owner_of_link(domains, link);
    NetworkGraph& graph = domain.graph();
    const LinkKey key = graph.link(link).endpoints;
    if (!graph.link(key).operational) {
        throw Error(ErrorCode::kAlreadyDown, to_string(key));
    }
    graph.set_operational(key, false);

    MonitorReport report;
    report.owner = domain.id();
    IntentDAG& dag = domain.dag();
    std::set<IntentId> affected;
    for (IntentId id : dag.ids()) {
        const auto* lp = std::get_if<LightpathIntent>(&dag.payload(id));
        if (lp == nullptr || dag.state(id) != IntentState::kInstalled) {
            continue;
        }
        auto links = graph.path_links(lp->path);
        if (std::find(links.begin(), links.end(), key) == links.end()) {
            continue;
        }
        dag.transition(id, IntentState::kFailed);
        report.failed_lightpaths.push_back(id);
        for (IntentId parent : dag.parents(id)) {
            affected.insert(parent);
        }
    }

    if (domain.config().recovery == RecoveryPolicy::kAutoRecompile) {
        for (IntentId id : affected) {
            if (recompile_and_install(domain, id)) {
                ++report.recovered;
            }
        }
    }
    return report;
}

MonitorReport monitor_repair(std::span<DomainController> domains, const LinkKey& link)
{
    DomainController& domain = owner_of_link(domains, link);
    NetworkGraph& graph = domain.graph();
    const LinkKey key = graph.link(link).endpoints;
    if (graph.link(key).operational) {
        throw Error(ErrorCode::kAlreadyUp, to_string(key));
    }
    graph.set_operational(key, true);

    MonitorReport report;
    report.owner = domain.id();
    if (domain.config().recovery != RecoveryPolicy::kAutoRecompile) {
        return report;
    }
    IntentDAG& dag = domain.dag();
    for (IntentId id : dag.ids()) {
        if (!std::holds_alternative<ConnectivityIntent>(dag.payload(id)) || !dag.is_leaf(id) ||
            dag.state(id) != IntentState::kFailed) {
            continue;
        }
        if (recompile_and_install(domain, id)) {
            ++report.recovered;
        }
    }
    return report;
}

Simulator::Simulator(std::vector<DomainController> domains, std::vector<Event> events)
    : domains_(std::move(domains))
{
    std::sort(domains_.begin(), domains_.end(),
              [](const DomainController& a, const DomainController& b) { return a.id() < b.id(); });
    for (auto& e : events) {
        schedule(std::move(e));
    }
    sample_utilization();
}

Simulator Simulator::from_scenario(const Scenario& scenario, std::optional<std::uint64_t> seed_override)
{
    return Simulator(build_domains(scenario), scenario_events(scenario, seed_override.value_or(scenario.seed)));
}

std::vector<Event> scenario_events(const Scenario& scenario, std::uint64_t seed)
{
    const auto ids = scenario.node_ids();
    std::vector<Event> events;
    std::size_t arrivals = 0;
    for (const auto& spec : scenario.events) {
        Event e;
        e.time = spec.time;
        switch (spec.kind) {
        case ScenarioEventKind::kArrival:
            e.kind = EventKind::kArrival;
            e.demand = ConnectivityIntent{ids.at(spec.src), ids.at(spec.dst), spec.rate, {}};
            for (const auto& [a, b] : spec.excluded_links) {
                e.demand.excluded_links.push_back(LinkKey::of(ids.at(a), ids.at(b)));
            }
            e.holding = spec.holding;
            e.arrival_index = arrivals++;
            break;
        case ScenarioEventKind::kDeparture:
            e.kind = EventKind::kDeparture;
            e.departs_arrival = spec.arrival;
            break;
        case ScenarioEventKind::kLinkDown:
        case ScenarioEventKind::kLinkUp:
            e.kind = spec.kind == ScenarioEventKind::kLinkDown ? EventKind::kLinkDown : EventKind::kLinkUp;
            e.link = LinkKey::of(ids.at(spec.a), ids.at(spec.b));
            break;
        }
        events.push_back(std::move(e));
    }
    if (scenario.traffic) {
        const auto& t = *scenario.traffic;
        TrafficConfig config;
        config.count = t.count;
        config.arrival_rate = t.arrival_rate;
        config.mean_holding = t.mean_holding;
        config.start_time = t.start_time;
        config.rates = t.rates;
        if (t.pairs.empty()) {
            for (const auto& [_, src] : ids) {
                for (const auto& [__, dst] : ids) {
                    if (src != dst) {
                        config.pairs.push_back({src, dst, 1.0});
                    }
                }
            }
            std::sort(config.pairs.begin(), config.pairs.end(), [](const auto& x, const auto& y) {
                return std::tie(x.src, x.dst) < std::tie(y.src, y.dst);
            });
        } else {
            for (const auto& p : t.pairs) {
                config.pairs.push_back({ids.at(p.src), ids.at(p.dst), p.weight});
            }
        }
        for (auto& e : generate_traffic(config, seed)) {
            e.arrival_index = arrivals++;
            events.push_back(std::move(e));
        }
    }
    return events;
}

void Simulator::schedule(Event event)
{
    event.seq = next_seq_++;
    queue_.push(std::move(event));
}

void Simulator::settle()
{
    deliver_messages(domains_, [this](const Message& m) { log_.push_back("  msg " + to_string(m)); });
    if (quiescence_observer_) {
        quiescence_observer_(domains_);
    }
}

std::optional<IntentId> Simulator::intent_of_arrival(std::size_t index) const
{
    auto it = arrivals_.find(index);
    if (it == arrivals_.end()) {
        return std::nullopt;
    }
    return it->second;
}

void Simulator::sample_utilization()
{
    std::size_t reserved = 0;
    std::size_t total = 0;
    for (const auto& d : domains_) {
        reserved += d.graph().reserved_slot_count();
        total += d.graph().fiber_links().size() * d.graph().grid_size();
    }
    double u = total == 0 ? 0.0 : static_cast<double>(reserved) / static_cast<double>(total);
    metrics_.slot_utilization_samples.push_back({now_, u});
}

void Simulator::handle_arrival(const Event& e)
{
    ++metrics_.offered;
    const ConnectivityIntent& demand = e.demand;
    DomainController& origin = find_domain(domains_, demand.src.domain);
    if (!origin.graph().has_node(demand.src) || !origin.owns(demand.src)) {
        throw Error(ErrorCode::kNotLocalSource, to_string(demand.src));
    }
    IntentId id = origin.dag().add_intent(demand);
    IntentRecord record{e.arrival_index, id, {}, {}, {}};

    auto compiled = compile_crossdomain(origin, id);
    settle();

    std::string outcome;
    if (origin.dag().aggregate_state(id) != IntentState::kCompiled) {
        outcome = compiled.reason ? "blocked-" + std::string(to_string(*compiled.reason)) : "blocked-remote";
    } else {
        record.compile_time = now_;
        install_crossdomain(origin, id);
        settle();
        if (origin.dag().aggregate_state(id) == IntentState::kInstalled) {
            outcome = "installed";
            record.install_time = now_;
        } else {
            outcome = "blocked-conflict";
        }
    }

    if (outcome == "installed") {
        ++metrics_.installed_ok;
        arrivals_[e.arrival_index] = id;
        if (e.holding) {
            Event dep;
            dep.time = now_ + *e.holding;
            dep.kind = EventKind::kDeparture;
            dep.intent = id;
            schedule(std::move(dep));
        }
    } else {
        ++metrics_.blocked;
        withdraw_intent(origin, id);
        settle();
    }
    record.outcome = outcome;
    log_.push_back(fmt::format("{} {} {} {}->{} rate={} => {}", fmt_time(now_), to_string(id), to_string(e.kind),
                               to_string(demand.src), to_string(demand.dst), demand.rate, outcome));
    metrics_.intents.push_back(std::move(record));
}

void Simulator::handle_departure(const Event& e)
{
    std::optional<IntentId> id = e.intent;
    if (!id && e.departs_arrival) {
        id = intent_of_arrival(*e.departs_arrival);
    }
    DomainController* origin = nullptr;
    if (id) {
        for (auto& d : domains_) {
            if (d.id() == id->domain && d.dag().contains(*id)) {
                origin = &d;
            }
        }
    }
    if (origin == nullptr) {
        log_.push_back(fmt::format("{} {} skipped (no active intent)", fmt_time(now_), to_string(e.kind)));
        return;
    }
    IntentState s = origin->dag().aggregate_state(*id);
    if (has_remote_parts(origin->dag(), *id)) {
        withdraw_intent(*origin, *id);
    } else {
        if (s == IntentState::kInstalled || s == IntentState::kFailed) {
            uninstall_intent(*origin, *id);
        }
        origin->dag().remove_intent(*id);
    }
    settle();
    log_.push_back(fmt::format("{} {} {} was {}", fmt_time(now_), to_string(*id), to_string(e.kind),
                               to_string(s)));
}

bool Simulator::step()
{
    if (queue_.empty()) {
        return false;
    }
    Event e = queue_.top();
    queue_.pop();
    now_ = e.time;
    spdlog::debug("t={} seq={} {}", now_, e.seq, to_string(e.kind));

    switch (e.kind) {
    case EventKind::kArrival:
        handle_arrival(e);
        break;
    case EventKind::kDeparture:
        handle_departure(e);
        break;
    case EventKind::kLinkDown:
    case EventKind::kLinkUp: {
        bool down = e.kind == EventKind::kLinkDown;
        auto report = down ? monitor_failure(domains_, e.link) : monitor_repair(domains_, e.link);
        metrics_.failures_recovered += report.recovered;
        std::string failed;
        for (IntentId id : report.failed_lightpaths) {
            failed += " " + to_string(id);
        }
        log_.push_back(fmt::format("{} {} {} owner={} failed=[{}] recovered={}", fmt_time(now_), to_string(e.kind),
                                   to_string(e.link), report.owner, failed.empty() ? "" : failed.substr(1),
                                   report.recovered));
        settle();
        break;
    }
    }
    sample_utilization();
    if (event_observer_) {
        event_observer_(*this, e);
    }
    return true;
}

void Simulator::run()
{
    while (step()) {
    }
}

RunResult run(const Scenario& scenario, std::optional<std::uint64_t> seed_override)
{
    Simulator sim = Simulator::from_scenario(scenario, seed_override);
    sim.run();
    RunResult result;
    result.metrics = sim.metrics();
    result.log = sim.log();
    result.domains.assign(sim.domains().begin(), sim.domains().end());
    return result;
}

} // namespace ibnsim
