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
#include "ibnsim/ids.hpp"
#include "ibnsim/network_graph.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ibnsim {

inline constexpr std::string_view kScenarioSchema = "ibnsim/scenario-v1";

struct NodeSpec {
    std::string name;
    std::uint32_t ports = 64;
    double port_rate = 100.0;
    std::uint32_t add_drop = 64;

    bool operator==(const NodeSpec&) const = default;
};

struct LinkSpec {
    std::string a;
    std::string b;
    double length{};

    bool operator==(const LinkSpec&) const = default;
};

struct DomainSpec {
    DomainId id{};
    std::vector<NodeSpec> nodes;
    std::vector<LinkSpec> links;

    bool operator==(const DomainSpec&) const = default;
};

struct PairWeight {
    std::string src;
    std::string dst;
    double weight = 1.0;

    bool operator==(const PairWeight&) const = default;
};

struct TrafficSpec {
    std::size_t count{};
    double arrival_rate = 1.0;
    double mean_holding = 1.0;
    double start_time = 0.0;
    std::vector<double> rates{100.0};
    // Empty means every ordered pair of distinct nodes, equally weighted.
    std::vector<PairWeight> pairs;

    bool operator==(const TrafficSpec&) const = default;
};

enum class ScenarioEventKind { kArrival, kDeparture, kLinkDown, kLinkUp };

struct EventSpec {
    double time{};
    ScenarioEventKind kind = ScenarioEventKind::kArrival;
    // arrival
    std::string src;
    std::string dst;
    double rate{};
    std::optional<double> holding;
    std::vector<std::pair<std::string, std::string>> excluded_links;
    // departure: index among the arrival events of this list
    std::size_t arrival{};
    // link_down / link_up
    std::string a;
    std::string b;

    bool operator==(const EventSpec&) const = default;
};

struct Scenario {
    std::uint32_t grid_size = NetworkGraph::kDefaultGridSize;
    std::size_t k_paths = 3;
    RecoveryPolicy recovery = RecoveryPolicy::kAutoRecompile;
    std::uint64_t seed = 1;
    std::vector<TransmissionMode> modes = default_mode_table();
    std::vector<DomainSpec> domains;
    std::vector<LinkSpec> border_links;
    std::optional<TrafficSpec> traffic;
    std::vector<EventSpec> events;

    /// Node addresses by name; valid for scenarios returned by parse_scenario.
    std::map<std::string, NodeId> node_ids() const;
    std::optional<NodeId> resolve(std::string_view name) const;

    bool operator==(const Scenario&) const = default;
};

/// Parses and validates a JSON scenario document. Throws kParseError (with
/// line and column, or the offending field) or kValidationError.
Scenario parse_scenario(std::string_view document);

/// Reads a scenario file; an unreadable file is reported as kParseError.
Scenario load_scenario(const std::filesystem::path& path);

/// Canonical rendering: every field explicit, keys sorted.
std::string render_scenario(const Scenario& scenario);

/// One controller per domain, sorted by id, with stubs, border links, the
/// global registry and inter-domain hop tables in place.
std::vector<DomainController> build_domains(const Scenario& scenario);

} // namespace ibnsim
