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

#include <compare>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>

namespace ibnsim {

using DomainId = std::uint32_t;

/// Globally unique node address: owning domain plus index inside it.
struct NodeId {
    DomainId domain{};
    std::uint32_t local{};

    auto operator<=>(const NodeId&) const = default;
};

/// Intent identifier: creating domain plus a per-DAG monotonic serial.
struct IntentId {
    DomainId domain{};
    std::uint64_t serial{};

    auto operator<=>(const IntentId&) const = default;
};

/// Unordered node pair naming a fiber link; endpoints are stored sorted.
struct LinkKey {
    NodeId a;
    NodeId b;

    static LinkKey of(NodeId x, NodeId y) { return x <= y ? LinkKey{x, y} : LinkKey{y, x}; }

    bool touches(NodeId n) const { return a == n || b == n; }

    auto operator<=>(const LinkKey&) const = default;
};

// Text forms: NodeId "d:l", IntentId "d#s", LinkKey "d:l-d:l".
std::string to_string(NodeId id);
std::string to_string(IntentId id);
std::string to_string(const LinkKey& key);

std::optional<NodeId> parse_node_id(std::string_view text);
std::optional<IntentId> parse_intent_id(std::string_view text);

inline std::ostream& operator<<(std::ostream& os, NodeId id) { return os << to_string(id); }
inline std::ostream& operator<<(std::ostream& os, IntentId id) { return os << to_string(id); }
inline std::ostream& operator<<(std::ostream& os, const LinkKey& k) { return os << to_string(k); }

} // namespace ibnsim
