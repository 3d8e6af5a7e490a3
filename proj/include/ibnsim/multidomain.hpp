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

#include "ibnsim/compilation.hpp"
#include "ibnsim/domain_controller.hpp"

#include <functional>
#include <span>

namespace ibnsim {

/// Compiles a connectivity intent whose destination may lie in another domain.
///
/// Destinations present in the local graph (own nodes and administered border
/// stubs) go straight to compile_connectivity. Otherwise the intent is split
/// at a border link toward the next-hop neighbor: the local segment is
/// compiled here and the rest travels in a DELEGATE message. The segment that
/// traverses the border link belongs to the lower domain id, which holds the
/// link and the far-side stub in its graph.
CompilationResult compile_crossdomain(DomainController& domain, IntentId id);

/// Installs local resources atomically, then asks every neighbor holding a
/// delegated part to install. Returns kPending while replies are outstanding;
/// a failed remote install is compensated when the last reply arrives.
InstallOutcome install_crossdomain(DomainController& domain, IntentId id);

/// Releases local resources and asks neighbors to uninstall delegated parts.
void uninstall_crossdomain(DomainController& domain, IntentId id);

/// Uninstalls if needed and deletes the intent here and in every neighbor
/// holding a delegated part.
void withdraw_intent(DomainController& domain, IntentId id);

void handle_message(DomainController& domain, const Message& msg);

/// Sends STATE_NOTIFY for delegated intents whose aggregate changed or whose
/// requester awaits a reply. Intents with outstanding requests of their own
/// stay silent until those resolve.
void flush_notifications(DomainController& domain);

using MessageObserver = std::function<void(const Message&)>;

/// Delivers rounds of pending messages in ascending (sender, seq) order until
/// no controller has anything left to send. Returns the number delivered.
std::size_t deliver_messages(std::span<DomainController> domains, const MessageObserver& observer = {});

DomainController& find_domain(std::span<DomainController> domains, DomainId id);

} // namespace ibnsim
