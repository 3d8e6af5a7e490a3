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
#include "ibnsim/ledger.hpp"
#include "ibnsim/network_graph.hpp"

#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace ibnsim {

enum class BlockReason { kNoPath, kNoMode, kNoSpectrum, kNoPort };

std::string_view to_string(BlockReason reason);

enum class CompileOutcome {
    kCompiled,
    kBlocked,
    // Local part compiled, remainder handed to a neighbor; the intent stays
    // uncompiled until the neighbor reports back.
    kDelegated,
};

struct CompilationResult {
    CompileOutcome outcome = CompileOutcome::kBlocked;
    std::vector<IntentId> children;
    std::optional<BlockReason> reason;
};

enum class InstallOutcome { kInstalled, kConflict, kPending };

std::string_view to_string(InstallOutcome outcome);

/// Among modes with rate >= `rate` and reach >= `distance`, the one needing
/// the fewest slots; ties go to the lower rate, then to table order.
std::optional<TransmissionMode> select_mode(std::span<const TransmissionMode> modes, double rate, double distance);

/// Lowest-start block of `width` contiguous slots free on every path link.
std::optional<SlotRange> first_fit_spectrum(const NetworkGraph& graph, std::span<const NodeId> path,
                                            std::uint32_t width);

/// Ports a demand of `rate` Gbps occupies on `router`.
std::uint32_t ports_needed(const RouterView& router, double rate);

/// Path search restrictions for compiling `intent` inside `domain`: excluded
/// links are skipped and only the domain's own nodes may be transited.
PathFilter compile_filter(const DomainController& domain, const ConnectivityIntent& intent);

/// Intra-domain RSA: k-shortest candidates in order, first path admitting a
/// mode and a first-fit spectrum block wins. Emits port@src, port@dst and the
/// lightpath as compiled children.
CompilationResult compile_connectivity(DomainController& domain, IntentId id);

/// Atomically reserves every resource of a compiled, purely local intent.
InstallOutcome install_intent(DomainController& domain, IntentId id);

/// Releases every resource of an installed or failed, purely local intent.
void uninstall_intent(DomainController& domain, IntentId id);

// Building blocks shared with the multi-domain layer. They only touch the
// local resource leaves (lightpaths, router ports) of the subtree.
std::optional<Conflict> reserve_local_resources(DomainController& domain, IntentId id);
void release_local_resources(DomainController& domain, IntentId id);
bool has_remote_parts(const IntentDAG& dag, IntentId id);
std::vector<IntentId> remote_parts(const IntentDAG& dag, IntentId id);

} // namespace ibnsim
