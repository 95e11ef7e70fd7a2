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
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace vfr::sim {

/// World frame: x = horizontal (left/right), y = depth (forward/backward),
/// z = vertical (up/down). Meters.
struct Vec3 {
  double x{0}, y{0}, z{0};

  Vec3 operator+(const Vec3& o) const noexcept { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const noexcept { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const noexcept { return {x * s, y * s, z * s}; }
  double norm() const noexcept { return std::sqrt(x * x + y * y + z * z); }
  bool finite() const noexcept { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
  friend bool operator==(const Vec3&, const Vec3&) = default;
};

/// Wraps an angle in degrees into [-180, 180).
double wrap_degrees(double deg) noexcept;

struct Pose {
  Vec3 position;
  double yaw_deg{0};
  friend bool operator==(const Pose&, const Pose&) = default;
};

struct Box {
  Vec3 min;
  Vec3 max;

  bool contains(const Vec3& p) const noexcept;
  Vec3 clamp(const Vec3& p) const noexcept;
  Vec3 center() const noexcept { return (min + max) * 0.5; }
  Vec3 extent() const noexcept { return max - min; }
  friend bool operator==(const Box&, const Box&) = default;
};

enum class TaskKind { LegoAssembly, Rotation, TargetReach, Grasp1D, Grasp2D, Grasp3D };

inline constexpr std::array<TaskKind, 6> kAllTaskKinds{TaskKind::LegoAssembly, TaskKind::Rotation,
                                                      TaskKind::TargetReach,  TaskKind::Grasp1D,
                                                      TaskKind::Grasp2D,      TaskKind::Grasp3D};

std::string_view to_string(TaskKind kind) noexcept;
/// Accepts the snake_case names produced by to_string. Throws ConfigError.
TaskKind parse_task_kind(std::string_view name);

bool is_grasp(TaskKind kind) noexcept;

/// Degrees of freedom a task exercises. Each maps to one query axis pair.
enum class Axis { Vertical, Horizontal, Depth, Yaw };

std::string_view to_string(Axis axis) noexcept;

/// Axes in query order: vertical first, then horizontal, then depth.
std::vector<Axis> enabled_axes(TaskKind kind);

enum class DiscreteAction { Up, Down, Left, Right, Forward, Backward, RotateLeft, RotateRight, None };

inline constexpr std::array<DiscreteAction, 9> kAllActions{
    DiscreteAction::Up,       DiscreteAction::Down,       DiscreteAction::Left,
    DiscreteAction::Right,    DiscreteAction::Forward,    DiscreteAction::Backward,
    DiscreteAction::RotateLeft, DiscreteAction::RotateRight, DiscreteAction::None};

/// Wire token, e.g. "UP", "ROTATE_LEFT", "NONE".
std::string_view token(DiscreteAction a) noexcept;
/// Case-insensitive; spaces and hyphens are read as underscores.
std::optional<DiscreteAction> action_from_token(std::string_view text);

/// The axis an action moves along; nullopt for None.
std::optional<Axis> axis_of(DiscreteAction a) noexcept;

/// The axis's two movement tokens followed by None, e.g. {Up, Down, None}.
std::array<DiscreteAction, 3> axis_pair(Axis axis) noexcept;

/// +1 for Up, Right, Forward and RotateRight; -1 for their opposites; 0 for None.
double action_sign(DiscreteAction a) noexcept;

/// The action on `axis` whose sign matches `sign` (None for sign 0).
DiscreteAction action_toward(Axis axis, double sign) noexcept;

/// Movement actions the task accepts (None is always accepted in addition).
std::vector<DiscreteAction> task_actions(TaskKind kind);
bool action_allowed(TaskKind kind, DiscreteAction a);

struct StepSchedule {
  double initial_step{0.04};
  double decay{0.98};
  int step_limit{20};

  /// Throws ConfigError unless c > 0, 0 < decay <= 1 and t >= 1.
  void validate() const;
  friend bool operator==(const StepSchedule&, const StepSchedule&) = default;
};

/// c * decay^k. Throws OutOfRangeError unless 0 <= k < t.
double step_size(const StepSchedule& schedule, int k);

/// Sum of every step size in the schedule.
double step_budget(const StepSchedule& schedule);

enum class CoverageMode { IntersectionOverGoal, IntersectionOverUnion };

struct TaskSpec {
  TaskKind kind{TaskKind::TargetReach};
  Box workspace;
  Pose goal;
  /// Present for tasks with a goal region (TargetReach).
  std::optional<Vec3> goal_half_extent;
  /// Half-width of the uniform initial offset per axis (meters).
  Vec3 offset_range;
  /// Half-width of the initial yaw offset (degrees); Rotation only.
  double yaw_range{0};
  /// Size of the held object (cube or brick) drawn at the gripper.
  Vec3 held_half_extent;
  StepSchedule schedule;
  CoverageMode coverage_mode{CoverageMode::IntersectionOverGoal};
  double success_tolerance{0.03};

  /// Throws ConfigError on a goal outside the workspace, ranges on axes the
  /// task does not exercise, or a bad schedule.
  void validate() const;
  friend bool operator==(const TaskSpec&, const TaskSpec&) = default;
};

/// Default schedule, workspace and sampling ranges for each task kind.
TaskSpec default_task(TaskKind kind);

}  // namespace vfr::sim
