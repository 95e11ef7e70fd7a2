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

#include "vfr/sim/scene.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "vfr/error.hpp"
#include "vfr/raster/kernels.hpp"
#include "vfr/rng.hpp"

namespace vfr::sim {

namespace rs = vfr::raster;

namespace {

constexpr double kMarkerPx = 12.0;
constexpr int kBoxPaddingPx = 4;

// Rotation task geometry, Front view, meters.
constexpr double kRotGripperHalfLen = 0.14;
constexpr double kRotGripperHalfWidth = 0.03;
constexpr double kRotTargetHalfLen = 0.16;
constexpr double kRotTargetHalfWidth = 0.045;

struct GlyphPart {
  Vec3 offset;
  Vec3 half;
};

std::vector<GlyphPart> gripper_glyph(const TaskSpec& spec) {
  switch (spec.kind) {
    case TaskKind::TargetReach:
      return {{{0, 0, spec.held_half_extent.z + 0.02}, {0.02, 0.02, 0.02}}};
    case TaskKind::LegoAssembly:
      return {{{0, 0, spec.held_half_extent.z + 0.004}, {0.004, 0.004, 0.004}}};
    case TaskKind::Grasp1D:
    case TaskKind::Grasp2D:
    case TaskKind::Grasp3D:
      return {{{-0.045, 0, 0}, {0.008, 0.008, 0.04}},
              {{0.045, 0, 0}, {0.008, 0.008, 0.04}},
              {{0, 0, 0.045}, {0.053, 0.03, 0.008}}};
    case TaskKind::Rotation:
      return {};
  }
  return {};
}

double axis_value(const Vec3& v, Axis axis) {
  switch (axis) {
    case Axis::Vertical: return v.z;
    case Axis::Horizontal: return v.x;
    case Axis::Depth: return v.y;
    case Axis::Yaw: return 0;
  }
  return 0;
}

Vec3 unit(Axis axis) {
  switch (axis) {
    case Axis::Vertical: return {0, 0, 1};
    case Axis::Horizontal: return {1, 0, 0};
    case Axis::Depth: return {0, 1, 0};
    case Axis::Yaw: return {0, 0, 0};
  }
  return {};
}


rs::PixelRect square_at(double u, double v, double size) {
  const double h = size / 2;
  return {static_cast<int>(std::ceil(u - h - 0.5)), static_cast<int>(std::ceil(v - h - 0.5)),
          static_cast<int>(std::ceil(u + h - 0.5)), static_cast<int>(std::ceil(v + h - 0.5))};
}

double mpp_for(const TaskSpec& spec, int pixels) {
  const Vec3 e = spec.workspace.extent();
  return std::max({e.x, e.y, e.z}) / pixels;
}

/// Screen-space bounding rectangle of a rotated rectangle.
rs::PixelRect rotated_bounds(double cu, double cv, double hw, double hh, double deg) {
  const double a = deg * std::numbers::pi / 180.0;
  const double ex = std::abs(hw * std::cos(a)) + std::abs(hh * std::sin(a));
  const double ey = std::abs(hw * std::sin(a)) + std::abs(hh * std::cos(a));
  return {static_cast<int>(std::floor(cu - ex)), static_cast<int>(std::floor(cv - ey)),
          static_cast<int>(std::ceil(cu + ex)), static_cast<int>(std::ceil(cv + ey))};
}

}  // namespace

Scene init_scene(const TaskSpec& spec, std::uint64_t seed) {
  spec.validate();
  Rng rng(seed, Stream::Scene);
  Vec3 offset;
  double yaw_offset = 0;
  for (auto axis : enabled_axes(spec.kind)) {
    switch (axis) {
      case Axis::Vertical: offset.z = rng.uniform(-spec.offset_range.z, spec.offset_range.z); break;
      case Axis::Horizontal: offset.x = rng.uniform(-spec.offset_range.x, spec.offset_range.x); break;
      case Axis::Depth: offset.y = rng.uniform(-spec.offset_range.y, spec.offset_range.y); break;
      case Axis::Yaw: yaw_offset = rng.uniform(-spec.yaw_range, spec.yaw_range); break;
    }
  }

  Scene scene;
  scene.spec = spec;
  scene.schedule = spec.schedule;
  scene.gripper.position = spec.workspace.clamp(spec.goal.position + offset);
  scene.gripper.yaw_deg = wrap_degrees(spec.goal.yaw_deg + yaw_offset);
  scene.step_index = 0;
  scene.rng_seed = seed;
  switch (spec.kind) {
    case TaskKind::TargetReach: scene.held_object = "blue_cube"; break;
    case TaskKind::LegoAssembly:
      scene.held_object = "lego_brick";
      scene.props.push_back({"target_slot", spec.goal, spec.held_half_extent, rs::palette::kYellow, PropStyle::Filled});
      break;
    case TaskKind::Grasp1D:
    case TaskKind::Grasp2D:
    case TaskKind::Grasp3D:
      scene.props.push_back({"water_bottle", spec.goal, {0.035, 0.035, 0.11}, rs::palette::kTeal, PropStyle::Filled});
      break;
    case TaskKind::Rotation:
      scene.props.push_back({"target_object", spec.goal, {kRotTargetHalfLen, kRotTargetHalfLen, kRotTargetHalfWidth},
                             rs::palette::kOrange, PropStyle::Wireframe});
      break;
  }
  return scene;
}

double residual(const Scene& scene, Axis axis) {
  if (axis == Axis::Yaw) return wrap_degrees(scene.gripper.yaw_deg - scene.spec.goal.yaw_deg);
  return axis_value(scene.gripper.position - scene.spec.goal.position, axis);
}

Scene apply_step(const Scene& scene, std::span<const DiscreteAction> actions) {
  bool seen[4] = {false, false, false, false};
  for (auto a : actions) {
    if (!action_allowed(scene.spec.kind, a)) {
      throw ProtocolError("action " + std::string(token(a)) + " is not allowed for task " +
                          std::string(to_string(scene.spec.kind)));
    }
    if (const auto axis = axis_of(a)) {
      auto& flag = seen[static_cast<int>(*axis)];
      if (flag) throw ProtocolError("more than one action on the " + std::string(to_string(*axis)) + " axis");
      flag = true;
    }
  }
  const double s = step_size(scene.schedule, scene.step_index);
  Scene next = scene;
  Vec3 delta;
  double yaw_delta = 0;
  for (auto a : actions) {
    const auto axis = axis_of(a);
    if (!axis) continue;
    if (*axis == Axis::Yaw) {
      yaw_delta += action_sign(a) * s;
    } else {
      delta = delta + unit(*axis) * (action_sign(a) * s);
    }
  }
  next.gripper.position = scene.spec.workspace.clamp(scene.gripper.position + delta);
  next.gripper.yaw_deg = wrap_degrees(scene.gripper.yaw_deg + yaw_delta);
  next.step_index = scene.step_index + 1;
  return next;
}

Scene apply_action(const Scene& scene, DiscreteAction direction) {
  const DiscreteAction one[1] = {direction};
  return apply_step(scene, one);
}

std::string_view to_string(ViewName v) noexcept { return v == ViewName::Front ? "front" : "side"; }

ImagePoint project(const ViewSpec& view, const Vec3& p) noexcept {
  const double horiz = view.name == ViewName::Front ? p.x - view.center.x : p.y - view.center.y;
  return {view.width / 2.0 + horiz / view.meters_per_pixel,
          view.height / 2.0 - (p.z - view.center.z) / view.meters_per_pixel};
}

raster::PixelRect project_box(const ViewSpec& view, const Vec3& center, const Vec3& half_extent) noexcept {
  const ImagePoint lo = project(view, center - half_extent);
  const ImagePoint hi = project(view, center + half_extent);
  // Screen v grows downward, so the top edge comes from the max corner.
  const double u0 = std::min(lo.u, hi.u);
  const double u1 = std::max(lo.u, hi.u);
  const double v0 = std::min(lo.v, hi.v);
  const double v1 = std::max(lo.v, hi.v);
  return {static_cast<int>(std::ceil(u0 - 0.5)), static_cast<int>(std::ceil(v0 - 0.5)),
          static_cast<int>(std::ceil(u1 - 0.5)), static_cast<int>(std::ceil(v1 - 0.5))};
}

std::vector<ViewSpec> default_views(const TaskSpec& spec) {
  ViewSpec front;
  front.name = ViewName::Front;
  front.meters_per_pixel = mpp_for(spec, front.width);
  front.center = spec.workspace.center();
  std::vector<ViewSpec> views{front};
  const auto axes = enabled_axes(spec.kind);
  if (std::find(axes.begin(), axes.end(), Axis::Depth) != axes.end()) {
    ViewSpec side = front;
    side.name = ViewName::Side;
    views.push_back(side);
  }
  return views;
}

ViewSpec metric_view(const TaskSpec& spec) {
  auto views = default_views(spec);
  const auto axes = enabled_axes(spec.kind);
  const bool has_depth = std::find(axes.begin(), axes.end(), Axis::Depth) != axes.end();
  const bool has_horizontal = std::find(axes.begin(), axes.end(), Axis::Horizontal) != axes.end();
  if (has_depth && !has_horizontal) return views.back();
  return views.front();
}

namespace {

void draw_box(rs::RasterImage& img, const ViewSpec& view, const Vec3& c, const Vec3& h, rs::Rgba color) {
  rs::fill_rect(img, project_box(view, c, h), color);
}

void draw_rotation_task(rs::RasterImage& img, const Scene& scene, const ViewSpec& view) {
  const double mpp = view.meters_per_pixel;
  const ImagePoint g = project(view, scene.gripper.position);
  rs::fill_rotated_rect(img, g.u, g.v, kRotGripperHalfLen / mpp, kRotGripperHalfWidth / mpp,
                        scene.gripper.yaw_deg, rs::palette::kGray);
}

}  // namespace

std::vector<raster::RasterImage> render_views(const Scene& scene, std::span<const ViewSpec> views) {
  std::vector<rs::RasterImage> out;
  out.reserve(views.size());
  const TaskSpec& spec = scene.spec;
  for (const auto& view : views) {
    rs::RasterImage img(view.width, view.height, rs::palette::kWhite);
    if (spec.goal_half_extent) {
      draw_box(img, view, spec.goal.position, *spec.goal_half_extent, rs::palette::kGreen);
    }
    for (const auto& prop : scene.props) {
      if (prop.style == PropStyle::Filled) draw_box(img, view, prop.pose.position, prop.half_extent, prop.color);
    }
    if (scene.held_object) {
      draw_box(img, view, scene.gripper.position, spec.held_half_extent, rs::palette::kBlue);
    }
    if (spec.kind == TaskKind::Rotation) {
      draw_rotation_task(img, scene, view);
    } else {
      for (const auto& part : gripper_glyph(spec)) {
        draw_box(img, view, scene.gripper.position + part.offset, part.half, rs::palette::kGray);
      }
    }
    for (const auto& prop : scene.props) {
      if (prop.style != PropStyle::Wireframe) continue;
      const ImagePoint c = project(view, prop.pose.position);
      rs::outline_rotated_rect(img, c.u, c.v, prop.half_extent.x / view.meters_per_pixel,
                               prop.half_extent.z / view.meters_per_pixel, prop.pose.yaw_deg, prop.color, 2);
    }
    out.push_back(std::move(img));
  }
  return out;
}

KeyRegions key_regions(const Scene& scene, const ViewSpec& view) {
  KeyRegions k;
  const TaskSpec& spec = scene.spec;
  const double mpp = view.meters_per_pixel;
  switch (spec.kind) {
    case TaskKind::TargetReach:
      k.goal = project_box(view, spec.goal.position, *spec.goal_half_extent);
      k.mover = project_box(view, scene.gripper.position, spec.held_half_extent);
      break;
    case TaskKind::LegoAssembly:
      k.goal = project_box(view, scene.props.front().pose.position, scene.props.front().half_extent);
      k.mover = project_box(view, scene.gripper.position, spec.held_half_extent);
      break;
    case TaskKind::Grasp1D:
    case TaskKind::Grasp2D:
    case TaskKind::Grasp3D: {
      const Prop& bottle = scene.props.front();
      k.target_box = project_box(view, bottle.pose.position, bottle.half_extent).dilate(kBoxPaddingPx);
      const ImagePoint palm = project(view, scene.gripper.position + gripper_glyph(spec).back().offset);
      k.gripper_marker = square_at(palm.u, palm.v, kMarkerPx);
      break;
    }
    case TaskKind::Rotation: {
      const Prop& target = scene.props.front();
      const ImagePoint c = project(view, target.pose.position);
      k.target_box = rotated_bounds(c.u, c.v, target.half_extent.x / mpp, target.half_extent.z / mpp,
                                    target.pose.yaw_deg)
                         .dilate(kBoxPaddingPx);
      const ImagePoint g = project(view, scene.gripper.position);
      const double a = scene.gripper.yaw_deg * std::numbers::pi / 180.0;
      const double reach = kRotGripperHalfLen / mpp - kMarkerPx / 2;
      k.gripper_marker = square_at(g.u + std::cos(a) * reach, g.v + std::sin(a) * reach, kMarkerPx);
      break;
    }
  }
  return k;
}

MetricSet compute_metrics(const Scene& scene) {
  const TaskSpec& spec = scene.spec;
  MetricSet m;
  if (spec.kind == TaskKind::Rotation) {
    m.angle_error = std::abs(wrap_degrees(scene.gripper.yaw_deg - spec.goal.yaw_deg));
    return m;
  }
  const double d = (scene.gripper.position - spec.goal.position).norm();
  m.distance_3d = d;
  if (is_grasp(spec.kind) || spec.kind == TaskKind::TargetReach) m.grasp_success = d <= spec.success_tolerance;
  if (spec.kind == TaskKind::TargetReach) {
    const ViewSpec view = metric_view(spec);
    rs::Mask goal(view.width, view.height);
    rs::Mask cube(view.width, view.height);
    rs::fill_mask(goal, project_box(view, spec.goal.position, *spec.goal_half_extent));
    rs::fill_mask(cube, project_box(view, scene.gripper.position, spec.held_half_extent));
    const auto& k = rs::kernels::active();
    const std::size_t inter = k.count_both(cube.bits, goal.bits);
    const std::size_t denom = spec.coverage_mode == CoverageMode::IntersectionOverGoal
                                  ? k.count_nonzero(goal.bits)
                                  : k.count_either(cube.bits, goal.bits);
    m.coverage = denom == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(denom);
    const ImagePoint a = project(view, scene.gripper.position);
    const ImagePoint b = project(view, spec.goal.position);
    m.pixel_distance = std::hypot(a.u - b.u, a.v - b.v);
  }
  return m;
}

double primary_error(const MetricSet& m) {
  if (m.angle_error) return *m.angle_error;
  return m.distance_3d.value_or(0.0);
}

}  // namespace vfr::sim
