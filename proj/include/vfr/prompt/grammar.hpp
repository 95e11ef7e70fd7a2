// Copyright 2026 The vfr Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vfr/sim/types.hpp"
#include "vfr/task/assembly.hpp"

namespace vfr::prompt {

inline constexpr std::string_view kActionMarker = "ACTION:";
inline constexpr std::string_view kAnswerMarker = "ANSWER:";
inline constexpr std::string_view kReasonMarker = "REASON:";
inline constexpr std::string_view kPlanMarker = "PLAN:";

std::string format_action(sim::DiscreteAction a);
std::string format_yes_no(bool yes);
std::string format_reason(std::string_view label);
std::string format_plan(const task::RecoveryPlan& plan);

/// Last "ACTION: <token>" line wins. Throws ParseError without a marker line
/// and ProtocolError for a token outside `grammar`.
sim::DiscreteAction parse_action(std::string_view text, std::span<const sim::DiscreteAction> grammar);

/// Last "ANSWER: YES|NO" line. Same error contract as parse_action.
bool parse_yes_no(std::string_view text);

/// Last "REASON: <label>" line; the label is matched case-insensitively with
/// spaces read as underscores.
std::string parse_reason(std::string_view text, std::span<const std::string> labels);

/// Lines after the last "PLAN:" marker, one catalog skill per line. "Pick"
/// may be followed by a block color. Throws ParseError on a missing marker, an
/// empty plan, an unknown line (the message carries it) or more than
/// task::kMaxPlanLength skills.
task::RecoveryPlan parse_plan(std::string_view text, std::span<const std::string> skill_catalog);

/// Trim, drop list bullets and numbering, collapse whitespace, lowercase.
std::string normalize_line(std::string_view line);

}  // namespace vfr::prompt
