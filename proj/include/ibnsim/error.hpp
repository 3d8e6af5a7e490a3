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

#include <stdexcept>
#include <string>
#include <string_view>

namespace ibnsim {

enum class ErrorCode {
    // network model
    kDuplicateNode,
    kMissingEndpoint,
    kDuplicateLink,
    kNonPositiveLength,
    kBrokenPath,
    kUnknownNode,
    kUnknownLink,
    // intent DAG
    kInvalidPayload,
    kUnknownIntent,
    kUnknownParent,
    kCycleDetected,
    kIllegalTransition,
    kNotALeaf,
    kStillInstalled,
    // compilation / installation
    kWrongState,
    kNotLocalSource,
    kNotLocalDestination,
    // multi-domain protocol
    kUnknownRemoteId,
    // monitoring
    kAlreadyDown,
    kAlreadyUp,
    // scenario ingestion
    kParseError,
    kValidationError,
    kInvalidConfig,
};

std::string_view to_string(ErrorCode code);

/// All library failures surface as this exception; `code()` identifies the
/// violated contract, `what()` carries the human-readable detail.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& detail)
        : std::runtime_error(std::string(to_string(code)) + ": " + detail)
        , code_(code)
    { }

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace ibnsim
