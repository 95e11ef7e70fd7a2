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

#include "vfr/sim/types.hpp"

#include <algorithm>
#include <cctype>

#include "vfr/error.hpp"

namespace vfr::sim {

double wrap_degrees(double deg) noexcept {
  double w = std::fmod(deg + 180.0, 360.0);
  if (w < 0) w += 360.0;
  w -= 180.0;
  // fmod can land exactly on +180 through rounding of tiny negatives.
  if (w >= 180.0) w -= 360.0;
  return w;
}

bool Box::contains(const Vec3& p) const noexcept {
  return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y && p.z >= min.z && p.z <= max.z;
}

Vec3 Box::clamp(const Vec3& p) const noexcept {
  return {std::clamp(p.x, min.x, max.x), std::clamp(p.y, min.y, max.y), std::clamp(p.z, min.z, max.z)};
}

namespace {

constexpr std::array<std::pair<TaskKind, std::string_view>, 6> kTaskNames{{
    {TaskKind::LegoAssembly, "lego_assembly"},
    {TaskKind::Rotation, "rotation"},
    {TaskKind::TargetReach, "target_reach"},
    {TaskKind::Grasp1D, "grasp_1d"},
    {TaskKind::Grasp2D, "grasp_2d"},
    {TaskKind::Grasp3D, "grasp_3d"},
}};

}  // namespace

std::string_view to_string(TaskKind kind) noexcept {
  for (const auto& [k, name] : kTaskNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

TaskKind parse_task_kind(std::string_view name) {
  for (const auto& [k, n] : kTaskNames) {
    if (n == name) return k;
  }
  throw ConfigError("unknown task kind '" + std::string(name) + "'");
}

bool is_grasp(TaskKind kind) noexcept {
  return kind == TaskKind::Grasp1D || kind == TaskKind::Grasp2D || kind == TaskKind::Grasp3D;
}

std::string_view to_string(Axis axis) noexcept {
  switch (axis) {
    case Axis::Vertical: return "vertical";
    case Axis::Horizontal: return "horizontal";
    case Axis::Depth: return "depth";
    case Axis::Yaw: return "yaw";
  }
  return "unknown";
}

std::vector<Axis> enabled_axes(TaskKind kind) {
  switch (kind) {
    case TaskKind::LegoAssembly: return {Axis::Vertical, Axis::Horizontal};
    case TaskKind::Rotation: return {Axis::Yaw};
    case TaskKind::TargetReach: return {Axis::Vertical, Axis::Depth};
    case TaskKind::Grasp1D: return {Axis::Vertical};
    case TaskKind::Grasp2D: return {Axis::Vertical, Axis::Depth};
    case TaskKind::Grasp3D: return {Axis::Vertical, Axis::Horizontal, Axis::Depth};
  }
  return {};
}

std::string_view token(DiscreteAction a) noexcept {
  switch (a) {
    case DiscreteAction::Up: return "UP";
    case DiscreteAction::Down: return "DOWN";
    case DiscreteAction::Left: return "LEFT";
    case DiscreteAction::Right: return "RIGHT";
    case DiscreteAction::Forward: return "FORWARD";
    case DiscreteAction::Backward: return "BACKWARD";
    case DiscreteAction::RotateLeft: return "ROTATE_LEFT";
    case DiscreteAction::RotateRight: return "ROTATE_RIGHT";
    case DiscreteAction::None: return "NONE";
  }
  return "NONE";
}

std::optional<DiscreteAction> action_from_token(std::string_view text) {
  std::string norm;
  norm.reserve(text.size());
  for (char c : text) {
    if (c == ' ' || c == '-') {
      norm.push_back('_');
    } else {
      norm.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    }
  }
  for (auto a : kAllActions) {
    if (token(a) == norm) return a;
  }
  return std::nullopt;
}

std::optional<Axis> axis_of(DiscreteAction a) noexcept {
  switch (a) {
    case DiscreteAction::Up:
    case DiscreteAction::Down: return Axis::Vertical;
    case DiscreteAction::Left:
    case DiscreteAction::Right: return Axis::Horizontal;
    case DiscreteAction::Forward:
    case DiscreteAction::Backward: return Axis::Depth;
    case DiscreteAction::RotateLeft:
    case DiscreteAction::RotateRight: return Axis::Yaw;
    case DiscreteAction::None: return std::nullopt;
  }
  return std::nullopt;
}

double action_sign(DiscreteAction a) noexcept {
  switch (a) {
    case DiscreteAction::Up:
    case DiscreteAction::Right:
    case DiscreteAction::Forward:
    case DiscreteAction::RotateRight: return 1.0;
    case DiscreteAction::Down:
    case DiscreteAction::Left:
    case DiscreteAction::Backward:
    case DiscreteAction::RotateLeft: return -1.0;
    case DiscreteAction::None: return 0.0;
  }
  return 0.0;
}

DiscreteAction action_toward(Axis axis, double sign) noexcept {
  if (sign == 0) return DiscreteAction::None;
  const auto pair = axis_pair(axis);
  return action_sign(pair[0]) == (sign > 0 ? 1.0 : -1.0) ? pair[0] : pair[1];
}

std::array<DiscreteAction, 3> axis_pair(Axis axis) noexcept {
  switch (axis) {
    case Axis::Vertical: return {DiscreteAction::Up, DiscreteAction::Down, DiscreteAction::None};
    case Axis::Horizontal: return {DiscreteAction::Left, DiscreteAction::Right, DiscreteAction::None};
    case Axis::Depth: return {DiscreteAction::Forward, DiscreteAction::Backward, DiscreteAction::None};
    case Axis::Yaw: return {DiscreteAction::RotateLeft, DiscreteAction::RotateRight, DiscreteAction::None};
  }
  return {DiscreteAction::None, DiscreteAction::None, DiscreteAction::None};
}

std::vector<DiscreteAction> task_actions(TaskKind kind) {
  std::vector<DiscreteAction> out;
  for (auto axis : enabled_axes(kind)) {
    const auto pair = axis_pair(axis);
    out.push_back(pair[0]);
    out.push_back(pair[1]);
  }
  return out;
}

bool action_allowed(TaskKind kind, DiscreteAction a) {
  if (a == DiscreteAction::None) return true;
  const auto actions = task_actions(kind);
  return std::find(actions.begin(), actions.end(), a) != actions.end();
}

void StepSchedule::validate() const {
  if (!(initial_step > 0) || !std::isfinite(initial_step)) {
    throw ConfigError("step schedule: initial step must be > 0");
  }
  if (!(decay > 0 && decay <= 1)) throw ConfigError("step schedule: decay must be in (0, 1]");
  if (step_limit < 1) throw ConfigError("step schedule: step limit must be >= 1");
}

double step_size(const StepSchedule& schedule, int k) {
  if (k < 0 || k >= schedule.step_limit) {
    throw OutOfRangeError("step index " + std::to_string(k) + " outside [0, " +
                          std::to_string(schedule.step_limit) + ")");
  }
  return schedule.initial_step * std::pow(schedule.decay, k);
}

double step_budget(const StepSchedule& schedule) {
  double total = 0;
  for (int k = 0; k < schedule.step_limit; ++k) total += step_size(schedule, k);
  return total;
}

void TaskSpec::validate() const {
  schedule.validate();
  if (!workspace.min.finite() || !workspace.max.finite() || !goal.position.finite()) {
    throw ConfigError("task spec: non-finite geometry");
  }
  if (!workspace.contains(goal.position)) throw ConfigError("task spec: goal lies outside the workspace");
  if (goal_half_extent) {
    const Vec3 lo = goal.position - *goal_half_extent;
    const Vec3 hi = goal.position + *goal_half_extent;
    if (!workspace.contains(lo) || !workspace.contains(hi)) {
      throw ConfigError("task spec: goal region extends outside the workspace");
    }
  }
  if (offset_range.x < 0 || offset_range.y < 0 || offset_range.z < 0 || yaw_range < 0) {
    throw ConfigError("task spec: sampling ranges must be non-negative");
  }
  const auto axes = enabled_axes(kind);
  auto enabled = [&](Axis a) { return std::find(axes.begin(), axes.end(), a) != axes.end(); };
  if (offset_range.z != 0 && !enabled(Axis::Vertical)) {
    throw ConfigError("task spec: vertical sampling range set on a task without vertical motion");
  }
  if (offset_range.x != 0 && !enabled(Axis::Horizontal)) {
    throw ConfigError("task spec: horizontal sampling range set on a task without horizontal motion");
  }
  if (offset_range.y != 0 && !enabled(Axis::Depth)) {
    throw ConfigError("task spec: depth sampling range set on a task without depth motion");
  }
  if (yaw_range != 0 && !enabled(Axis::Yaw)) {
    throw ConfigError("task spec: yaw sampling range set on a task without rotation");
  }
  if (!(success_tolerance >= 0)) throw ConfigError("task spec: success tolerance must be >= 0");
}

TaskSpec default_task(TaskKind kind) {
  TaskSpec spec;
  spec.kind = kind;
  spec.workspace = {{-0.5, -0.5, -0.5}, {0.5, 0.5, 0.5}};
  spec.goal = {{0, 0, 0}, 0};
  spec.held_half_extent = {0.05, 0.05, 0.05};
  switch (kind) {
    case TaskKind::TargetReach:
      spec.schedule = {0.04, 0.98, 20};
      spec.goal_half_extent = Vec3{0.03, 0.03, 0.03};
      break;
    case TaskKind::Grasp1D:
    case TaskKind::Grasp2D:
    case TaskKind::Grasp3D:
      spec.schedule = {0.04, 0.98, 15};
      break;
    case TaskKind::LegoAssembly: {
      // 0.1 m^2 square working plane.
      const double half = 0.5 * std::sqrt(0.1);
      spec.workspace = {{-half, -half, -half}, {half, half, half}};
      spec.schedule = {0.002, 0.98, 20};
      spec.held_half_extent = {0.008, 0.008, 0.0048};
      break;
    }
    case TaskKind::Rotation:
      spec.schedule = {5.0, 0.98, 10};
      break;
  }
  // Half the single-axis budget keeps every sampled offset reachable.
  const double half_budget = 0.5 * step_budget(spec.schedule);
  for (auto axis : enabled_axes(kind)) {
    switch (axis) {
      case Axis::Vertical: spec.offset_range.z = half_budget; break;
      case Axis::Horizontal: spec.offset_range.x = half_budget; break;
      case Axis::Depth: spec.offset_range.y = half_budget; break;
      case Axis::Yaw: spec.yaw_range = half_budget; break;
    }
  }
  return spec;
}

}  // namespace vfr::sim
