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

#include "ibnsim/domain_controller.hpp"
#include "ibnsim/intent.hpp"
#include "ibnsim/scenario.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <tuple>
#include <vector>

namespace ibnsim {

enum class EventKind { kArrival, kDeparture, kLinkDown, kLinkUp };

std::string_view to_string(EventKind kind);

struct Event {
    double time{};
    std::uint64_t seq{};
    EventKind kind = EventKind::kArrival;

    // kArrival
    ConnectivityIntent demand;
    std::optional<double> holding;
    std::size_t arrival_index{};
    // kDeparture: either a concrete intent or an arrival index to look up
    std::optional<IntentId> intent;
    std::optional<std::size_t> departs_arrival;
    // kLinkDown / kLinkUp
    LinkKey link;
};

struct TrafficConfig {
    std::size_t count{};
    double arrival_rate{};  // arrivals per second
    double mean_holding{};  // seconds
    double start_time{};
    std::vector<double> rates{100.0};
    struct WeightedPair {
        NodeId src;
        NodeId dst;
        double weight{};
    };
    std::vector<WeightedPair> pairs;
};

/// Poisson arrivals with exponential holding times drawn from std::mt19937_64
/// (fully specified by the standard, hence identical on every platform). Each
/// arrival consumes exactly four 64-bit draws: inter-arrival, holding, pair,
/// rate. Uniforms use the top 53 bits; exponentials use the inverse CDF.
std::vector<Event> generate_traffic(const TrafficConfig& config, std::uint64_t seed);

struct IntentRecord {
    std::size_t arrival{};
    IntentId id;
    std::string outcome;
    std::optional<double> compile_time;
    std::optional<double> install_time;
};

struct UtilizationSample {
    double time{};
    double utilization{};  // reserved slots / all slots across every domain
};

struct Metrics {
    std::size_t offered{};
    std::size_t blocked{};
    std::size_t installed_ok{};
    std::size_t failures_recovered{};
    std::vector<UtilizationSample> slot_utilization_samples;
    std::vector<IntentRecord> intents;

    /// Time-weighted mean over the sampled interval.
    double mean_slot_utilization() const;
};

struct MonitorReport {
    DomainId owner{};
    std::vector<IntentId> failed_lightpaths;
    std::size_t recovered{};
};

/// Marks the link down, fails every installed lightpath on it and, under the
/// auto-recompile policy, recompiles and reinstalls the affected intents.
MonitorReport monitor_failure(std::span<DomainController> domains, const LinkKey& link);

/// Brings the link back; under auto-recompile every failed intent of the
/// owning domain gets one recompilation attempt.
MonitorReport monitor_repair(std::span<DomainController> domains, const LinkKey& link);

/// Deterministic single-threaded discrete-event engine.
class Simulator {
public:
    using EventObserver = std::function<void(const Simulator&, const Event&)>;
    using QuiescenceObserver = std::function<void(std::span<const DomainController>)>;

    Simulator(std::vector<DomainController> domains, std::vector<Event> events);

    static Simulator from_scenario(const Scenario& scenario, std::optional<std::uint64_t> seed_override = {});

    /// Called after every processed event, once messages are quiescent.
    void on_event(EventObserver observer) { event_observer_ = std::move(observer); }
    /// Called at every message quiescence point (several per arrival).
    void on_quiescence(QuiescenceObserver observer) { quiescence_observer_ = std::move(observer); }

    bool done() const { return queue_.empty(); }
    /// Processes the next event; returns false when none is left.
    bool step();
    void run();

    const Metrics& metrics() const { return metrics_; }
    const std::vector<std::string>& log() const { return log_; }
    std::span<DomainController> domains() { return domains_; }
    std::span<const DomainController> domains() const { return domains_; }
    double now() const { return now_; }
    std::optional<IntentId> intent_of_arrival(std::size_t index) const;

private:
    struct Later {
        bool operator()(const Event& x, const Event& y) const
        {
            return std::tie(x.time, x.seq) > std::tie(y.time, y.seq);
        }
    };

    void schedule(Event event);
    void settle();
    void handle_arrival(const Event& e);
    void handle_departure(const Event& e);
    void sample_utilization();

    std::vector<DomainController> domains_;
    std::priority_queue<Event, std::vector<Event>, Later> queue_;
    std::uint64_t next_seq_ = 0;
    double now_ = 0.0;
    Metrics metrics_;
    std::vector<std::string> log_;
    std::map<std::size_t, IntentId> arrivals_;
    EventObserver event_observer_;
    QuiescenceObserver quiescence_observer_;
};

struct RunResult {
    Metrics metrics;
    std::vector<std::string> log;
    std::vector<DomainController> domains;
};

/// Builds controllers and events from the scenario and runs to completion.
RunResult run(const Scenario& scenario, std::optional<std::uint64_t> seed_override = {});

/// Events listed in the scenario plus generated traffic, in scenario order.
std::vector<Event> scenario_events(const Scenario& scenario, std::uint64_t seed);

} // namespace ibnsim
