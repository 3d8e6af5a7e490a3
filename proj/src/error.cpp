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

#include "ibnsim/error.hpp"

namespace ibnsim {

std::string_view to_string(ErrorCode code)
{
    switch (code) {
    case ErrorCode::kDuplicateNode: return "duplicate-node";
    case ErrorCode::kMissingEndpoint: return "missing-endpoint";
    case ErrorCode::kDuplicateLink: return "duplicate-link";
    case ErrorCode::kNonPositiveLength: return "nonpositive-length";
    case ErrorCode::kBrokenPath: return "broken-path";
    case ErrorCode::kUnknownNode: return "unknown-node";
    case ErrorCode::kUnknownLink: return "unknown-link";
    case ErrorCode::kInvalidPayload: return "invalid-payload";
    case ErrorCode::kUnknownIntent: return "unknown-intent";
    case ErrorCode::kUnknownParent: return "unknown-parent";
    case ErrorCode::kCycleDetected: return "cycle-detected";
    case ErrorCode::kIllegalTransition: return "illegal-transition";
    case ErrorCode::kNotALeaf: return "not-a-leaf";
    case ErrorCode::kStillInstalled: return "still-installed";
    case ErrorCode::kWrongState: return "wrong-state";
    case ErrorCode::kNotLocalSource: return "not-local-source";
    case ErrorCode::kNotLocalDestination: return "not-local-destination";
    case ErrorCode::kUnknownRemoteId: return "unknown-remote-id";
    case ErrorCode::kAlreadyDown: return "already-down";
    case ErrorCode::kAlreadyUp: return "already-up";
    case ErrorCode::kParseError: return "parse-error";
    case ErrorCode::kValidationError: return "validation-error";
    case ErrorCode::kInvalidConfig: return "invalid-config";
    }
    return "unknown-error";
}

} // namespace ibnsim
