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

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "vfr/raster/image.hpp"
#include "vfr/rng.hpp"

namespace vfr::task {

enum class BlockColor { Green, Red, Blue, Yellow, White };

inline constexpr std::size_t kColorCount = 5;
inline constexpr std::array<BlockColor, kColorCount> kAllColors{BlockColor::Green, BlockColor::Red, BlockColor::Blue,
                                                               BlockColor::Yellow, BlockColor::White};

/// Lowercase name used in prompts and config files.
std::string_view to_string(BlockColor c) noexcept;
/// Throws ConfigError.
BlockColor parse_block_color(std::string_view name);
raster::Rgba block_rgba(BlockColor c) noexcept;

/// Cell on the baseplate grid; row 0 sits on the plate.
struct GridPos {
  int col{0};
  int row{0};
  friend bool operator==(const GridPos&, const GridPos&) = default;
};

struct RefBlock {
  BlockColor color;
  GridPos pos;
  friend bool operator==(const RefBlock&, const RefBlock&) = default;
};

struct BuiltBlock {
  BlockColor color;
  GridPos pos;
  bool intact{true};
  friend bool operator==(const BuiltBlock&, const BuiltBlock&) = default;
};

enum class Location { PickupArea, PlaceArea, DiscardArea };

std::string_view to_string(Location l) noexcept;

using ColorCounts = std::array<int, kColorCount>;

inline constexpr std::size_t kHoldingCapacity = 3;
inline constexpr int kGridColumns = 6;

struct AssemblyState {
  std::vector<RefBlock> reference;
  std::vector<BuiltBlock> built;
  Location gripper_location{Location::PickupArea};
  std::vector<BlockColor> holding;
  ColorCounts supply{};
  ColorCounts discard_pile{};
  std::size_t cursor{0};
  friend bool operator==(const AssemblyState&, const AssemblyState&) = default;
};

/// supply + holding + built + discard, per color.
ColorCounts color_totals(const AssemblyState& s);

/// Describes the first broken invariant, or nullopt for a valid state.
std::optional<std::string> check_state(const AssemblyState& s);

enum class Phase { Pick, Place };

std::string_view to_string(Phase p) noexcept;

enum class SkillKind { Pick, Place, Sweep, MoveToPickup, MoveToPlace, MoveToDiscard };

inline constexpr std::array<SkillKind, 6> kAllSkillKinds{SkillKind::Pick,         SkillKind::Place,
                                                        SkillKind::Sweep,        SkillKind::MoveToPickup,
                                                        SkillKind::MoveToPlace,  SkillKind::MoveToDiscard};

struct Skill {
  SkillKind kind;
  /// Pick only. Empty means "the color the reference needs next".
  std::optional<BlockColor> color;

  static Skill pick(std::optional<BlockColor> c = std::nullopt) { return {SkillKind::Pick, c}; }
  static Skill of(SkillKind k) { return {k, std::nullopt}; }
  friend bool operator==(const Skill&, const Skill&) = default;
};

/// Catalog name, e.g. "Sweep away block".
std::string_view skill_name(SkillKind k) noexcept;
std::string describe(const Skill& s);
/// The six catalog names in canonical order.
std::vector<std::string> skill_catalog();

inline constexpr std::size_t kMaxPlanLength = 20;

using RecoveryPlan = std::vector<Skill>;

std::string describe(const RecoveryPlan& plan);

enum class FailureType {
  FailToPick,
  PickMultiple,
  PickWrongColor,
  PickMultipleWithWrong,
  FailToPlace,
  PlaceWrongColor,
  PlaceWrongPosition,
  StructureCollapse,
};

inline constexpr std::array<FailureType, 8> kAllFailures{
    FailureType::FailToPick,  FailureType::PickMultiple,    FailureType::PickWrongColor,
    FailureType::PickMultipleWithWrong, FailureType::FailToPlace, FailureType::PlaceWrongColor,
    FailureType::PlaceWrongPosition,    FailureType::StructureCollapse};

/// Closed-set analysis label, e.g. "fail_to_pick".
std::string_view failure_label(FailureType f) noexcept;
/// Human-readable row title, e.g. "Fail to pickup block".
std::string_view failure_title(FailureType f) noexcept;
/// Throws ConfigError.
FailureType parse_failure(std::string_view label);
Phase phase_of(FailureType f) noexcept;

/// Label for analyses that match none of the eight failures.
inline constexpr std::string_view kOtherLabel = "other";

struct PreconditionViolation {
  Skill skill;
  std::string condition;
  friend bool operator==(const PreconditionViolation&, const PreconditionViolation&) = default;
};

using SkillResult = std::variant<AssemblyState, PreconditionViolation>;

/// Applies a skill assuming the robot executes it successfully.
SkillResult apply_skill(const AssemblyState& state, const Skill& skill);

/// State right before a pick or place attempt: `cursor` correct blocks built,
/// gripper at the phase's location (holding the next block for Place).
/// `supply_per_color` counts the blocks available at the start of assembly.
AssemblyState make_phase_state(std::vector<RefBlock> reference, std::size_t cursor, Phase phase,
                               int supply_per_color = 8);

/// Outcome of a successful pick or place from a phase state.
AssemblyState nominal_outcome(const AssemblyState& state, Phase phase);

/// Throws ConfigError when the state is not right before an attempt of the
/// failure's phase, or the supply cannot produce the failure.
AssemblyState inject_failure(const AssemblyState& state, FailureType failure, Rng& rng);

struct GoalSpec {
  Phase phase;
  /// The built structure must equal reference[0, prefix_len), all intact.
  std::size_t prefix_len;
  /// Required gripper contents (compared as a multiset).
  std::vector<BlockColor> holding;
  friend bool operator==(const GoalSpec&, const GoalSpec&) = default;
};

/// Goal of the subtask about to be attempted from a (pre-failure) phase state.
GoalSpec subtask_goal(const AssemblyState& state, Phase phase);

/// True when the state satisfies the goal exactly.
bool meets_goal(const AssemblyState& state, const GoalSpec& goal);

enum class VerdictKind { Valid, PreconditionViolation, GoalMismatch, OutOfScope };

std::string_view to_string(VerdictKind k) noexcept;

struct Verdict {
  VerdictKind kind{VerdictKind::Valid};
  /// 1-based index of the offending skill (PreconditionViolation only).
  std::size_t step{0};
  std::optional<Skill> skill;
  std::string detail;

  bool valid() const noexcept { return kind == VerdictKind::Valid; }
  std::string describe() const;
  friend bool operator==(const Verdict&, const Verdict&) = default;
};

Verdict validate_plan(const AssemblyState& state, const RecoveryPlan& plan, const GoalSpec& goal);

/// Canonical recovery plan for an injected failure.
RecoveryPlan template_planner(const AssemblyState& state, FailureType failure, const GoalSpec& goal);

/// Per-criterion ground truth for the three decomposed detection questions.
/// true = the criterion holds (no failure seen by that question).
std::array<bool, 3> detection_criteria(const AssemblyState& observed, const GoalSpec& goal);

raster::RasterImage render_assembly(const AssemblyState& state, bool as_reference);

/// Pixel rectangle of a grid cell in assembly renders.
raster::PixelRect cell_rect(GridPos pos) noexcept;

}  // namespace vfr::task
