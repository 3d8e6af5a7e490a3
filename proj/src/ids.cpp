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

#include "ibnsim/ids.hpp"

#include <charconv>

namespace ibnsim {

namespace {

template <typename T>
bool parse_number(std::string_view text, T& out)
{
    if (text.empty()) {
        return false;
    }
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    return ec == std::errc{} && ptr == text.data() + text.size();
}

} // namespace

std::string to_string(NodeId id)
{
    return std::to_string(id.domain) + ":" + std::to_string(id.local);
}

std::string to_string(IntentId id)
{
    return std::to_string(id.domain) + "#" + std::to_string(id.serial);
}

std::string to_string(const LinkKey& key)
{
    return to_string(key.a) + "-" + to_string(key.b);
}

std::optional<NodeId> parse_node_id(std::string_view text)
{
    auto sep = text.find(':');
    if (sep == std::string_view::npos) {
        return std::nullopt;
    }
    NodeId id;
    if (!parse_number(text.substr(0, sep), id.domain) ||
        !parse_number(text.substr(sep + 1), id.local)) {
        return std::nullopt;
    }
    return id;
}

std::optional<IntentId> parse_intent_id(std::string_view text)
{
    auto sep = text.find('#');
    if (sep == std::string_view::npos) {
        return std::nullopt;
    }
    IntentId id;
    if (!parse_number(text.substr(0, sep), id.domain) ||
        !parse_number(text.substr(sep + 1), id.serial)) {
        return std::nullopt;
    }
    return id;
}

} // namespace ibnsim
