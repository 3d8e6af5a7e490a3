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
#include "ibnsim/simulator.hpp"

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ibnsim {

/// Graphviz digraph with one node per intent, labeled "kind / id / state".
/// Nodes and edges are sorted by identifier.
std::string export_dag(const IntentDAG& dag);

/// JSON document of every domain: nodes, fiber links with per-slot holders,
/// virtual links, border links and lightpath overlays.
std::string export_topology(std::span<const DomainController> domains);

/// `metric,value` summary block followed by one row per offered intent.
std::string metrics_csv(const Metrics& metrics);

/// Number of summary rows metrics_csv emits before the per-intent block.
inline constexpr std::size_t kMetricsSummaryRows = 5;

std::string render_log(const std::vector<std::string>& lines);

/// Self-contained record of a finished run: the scenario, down links and
/// every DAG. Resources are not stored; restore_snapshot replays them.
std::string save_snapshot(const Scenario& scenario, std::span<const DomainController> domains);

/// Rebuilds the controllers of a saved run. Throws kParseError on malformed
/// input and kValidationError when the stored state does not fit.
std::vector<DomainController> restore_snapshot(std::string_view document);

} // namespace ibnsim
