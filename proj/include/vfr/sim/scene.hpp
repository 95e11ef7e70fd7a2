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

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vfr/raster/image.hpp"
#include "vfr/sim/types.hpp"

namespace vfr::sim {

enum class PropStyle { Filled, Wireframe };

struct Prop {
  std::string id;
  Pose pose;
  Vec3 half_extent;
  raster::Rgba color;
  PropStyle style{PropStyle::Filled};
  friend bool operator==(const Prop&, const Prop&) = default;
};

/// Immutable snapshot of a motion-level task. Every operation returns a new
/// value.
struct Scene {
  TaskSpec spec;
  StepSchedule schedule;
  Pose gripper;
  std::optional<std::string> held_object;
  std::vector<Prop> props;
  int step_index{0};
  std::uint64_t rng_seed{0};
  friend bool operator==(const Scene&, const Scene&) = default;
};

/// Samples the gripper offset uniformly per enabled axis from `seed`. Uses the
/// spec's own schedule.
Scene init_scene(const TaskSpec& spec, std::uint64_t seed);

/// Signed gripper-minus-goal offset along an axis (degrees for Yaw, wrapped).
double residual(const Scene& scene, Axis axis);

/// Applies one action at step size step_size(schedule, step_index) and
/// advances the step. Throws ProtocolError for actions outside the task's set
/// and OutOfRangeError once the step limit is reached.
Scene apply_action(const Scene& scene, DiscreteAction direction);

/// Applies every action at the same step magnitude, then advances the step
/// once. At most one action per axis.
Scene apply_step(const Scene& scene, std::span<const DiscreteAction> actions);

enum class ViewName { Front, Side };

std::string_view to_string(ViewName v) noexcept;

/// Orthographic camera. Front maps (x, z); Side maps (y, z). Image rows grow
/// downward, so +z is up on screen.
struct ViewSpec {
  ViewName name{ViewName::Front};
  int width{512};
  int height{512};
  double meters_per_pixel{1.0 / 512};
  Vec3 center;
  friend bool operator==(const ViewSpec&, const ViewSpec&) = default;
};

/// Continuous image coordinates of a world point.
struct ImagePoint {
  double u{0}, v{0};
};

ImagePoint project(const ViewSpec& view, const Vec3& p) noexcept;

/// Pixels whose centers fall inside the projected axis-aligned box. Not clipped.
raster::PixelRect project_box(const ViewSpec& view, const Vec3& center, const Vec3& half_extent) noexcept;

/// Views the task needs: Front always; Side when the task moves in depth.
std::vector<ViewSpec> default_views(const TaskSpec& spec);

/// View in which coverage and pixel distance are measured: the one that shows
/// both of the task's translational axes.
ViewSpec metric_view(const TaskSpec& spec);

std::vector<raster::RasterImage> render_views(const Scene& scene, std::span<const ViewSpec> views);

/// Screen-space anchors of the task's key objects, for visual annotation.
struct KeyRegions {
  std::optional<raster::PixelRect> goal;
  std::optional<raster::PixelRect> mover;
  std::optional<raster::PixelRect> target_box;
  std::optional<raster::PixelRect> gripper_marker;
};

KeyRegions key_regions(const Scene& scene, const ViewSpec& view);

/// Only the fields relevant to the task kind are populated.
struct MetricSet {
  std::optional<double> distance_3d;
  std::optional<double> angle_error;
  std::optional<double> coverage;
  std::optional<double> pixel_distance;
  std::optional<bool> grasp_success;
  friend bool operator==(const MetricSet&, const MetricSet&) = default;
};

MetricSet compute_metrics(const Scene& scene);

/// The primary error used to pick the best point along a trajectory:
/// angle error for Rotation, 3D distance otherwise.
double primary_error(const MetricSet& m);

}  // namespace vfr::sim
