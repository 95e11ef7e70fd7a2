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

#include "vfr/sim/json.hpp"

#include "vfr/error.hpp"

namespace vfr::sim {

using nlohmann::json;

namespace {

json rgba_json(const raster::Rgba& c) { return json::array({c.r, c.g, c.b, c.a}); }

raster::Rgba rgba_from(const json& j) {
  return {j.at(0).get<std::uint8_t>(), j.at(1).get<std::uint8_t>(), j.at(2).get<std::uint8_t>(),
          j.at(3).get<std::uint8_t>()};
}

json pose_json(const Pose& p) { return {{"position", to_json(p.position)}, {"yaw_deg", p.yaw_deg}}; }

Pose pose_from(const json& j) { return {vec3_from_json(j.at("position")), j.at("yaw_deg").get<double>()}; }

template <typename T>
void put_optional(json& j, const char* key, const std::optional<T>& v) {
  j[key] = v ? json(*v) : json(nullptr);
}

template <typename T>
std::optional<T> get_optional(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

}  // namespace

json to_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

json to_json(const StepSchedule& s) {
  return {{"initial_step", s.initial_step}, {"decay", s.decay}, {"step_limit", s.step_limit}};
}

json to_json(const TaskSpec& spec) {
  json j;
  j["kind"] = std::string(to_string(spec.kind));
  j["workspace"] = {{"min", to_json(spec.workspace.min)}, {"max", to_json(spec.workspace.max)}};
  j["goal"] = pose_json(spec.goal);
  j["goal_half_extent"] = spec.goal_half_extent ? to_json(*spec.goal_half_extent) : json(nullptr);
  j["offset_range"] = to_json(spec.offset_range);
  j["yaw_range"] = spec.yaw_range;
  j["held_half_extent"] = to_json(spec.held_half_extent);
  j["schedule"] = to_json(spec.schedule);
  j["coverage_mode"] = spec.coverage_mode == CoverageMode::IntersectionOverGoal ? "intersection_over_goal"
                                                                                : "intersection_over_union";
  j["success_tolerance"] = spec.success_tolerance;
  return j;
}

json to_json(const MetricSet& m) {
  json j = json::object();
  put_optional(j, "distance_3d", m.distance_3d);
  put_optional(j, "angle_error", m.angle_error);
  put_optional(j, "coverage", m.coverage);
  put_optional(j, "pixel_distance", m.pixel_distance);
  put_optional(j, "grasp_success", m.grasp_success);
  return j;
}

json scene_to_json(const Scene& scene) {
  json props = json::array();
  for (const auto& p : scene.props) {
    props.push_back({{"id", p.id},
                     {"pose", pose_json(p.pose)},
                     {"half_extent", to_json(p.half_extent)},
                     {"color", rgba_json(p.color)},
                     {"style", p.style == PropStyle::Filled ? "filled" : "wireframe"}});
  }
  return {{"schema_version", kSceneSchemaVersion},
          {"spec", to_json(scene.spec)},
          {"schedule", to_json(scene.schedule)},
          {"gripper", pose_json(scene.gripper)},
          {"held_object", scene.held_object ? json(*scene.held_object) : json(nullptr)},
          {"props", props},
          {"step_index", scene.step_index},
          {"rng_seed", scene.rng_seed}};
}

Vec3 vec3_from_json(const json& j) {
  if (!j.is_array() || j.size() != 3) throw ConfigError("expected a 3-element array");
  return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()};
}

StepSchedule schedule_from_json(const json& j) {
  StepSchedule s;
  s.initial_step = j.at("initial_step").get<double>();
  s.decay = j.value("decay", 0.98);
  s.step_limit = j.at("step_limit").get<int>();
  s.validate();
  return s;
}

TaskSpec task_spec_from_json(const json& j) {
  TaskSpec spec;
  spec.kind = parse_task_kind(j.at("kind").get<std::string>());
  spec.workspace = {vec3_from_json(j.at("workspace").at("min")), vec3_from_json(j.at("workspace").at("max"))};
  spec.goal = pose_from(j.at("goal"));
  if (j.contains("goal_half_extent") && !j.at("goal_half_extent").is_null()) {
    spec.goal_half_extent = vec3_from_json(j.at("goal_half_extent"));
  }
  spec.offset_range = vec3_from_json(j.at("offset_range"));
  spec.yaw_range = j.at("yaw_range").get<double>();
  spec.held_half_extent = vec3_from_json(j.at("held_half_extent"));
  spec.schedule = schedule_from_json(j.at("schedule"));
  const auto mode = j.value("coverage_mode", std::string("intersection_over_goal"));
  if (mode == "intersection_over_goal") {
    spec.coverage_mode = CoverageMode::IntersectionOverGoal;
  } else if (mode == "intersection_over_union") {
    spec.coverage_mode = CoverageMode::IntersectionOverUnion;
  } else {
    throw ConfigError("unknown coverage_mode '" + mode + "'");
  }
  spec.success_tolerance = j.value("success_tolerance", 0.03);
  spec.validate();
  return spec;
}

MetricSet metrics_from_json(const json& j) {
  MetricSet m;
  m.distance_3d = get_optional<double>(j, "distance_3d");
  m.angle_error = get_optional<double>(j, "angle_error");
  m.coverage = get_optional<double>(j, "coverage");
  m.pixel_distance = get_optional<double>(j, "pixel_distance");
  m.grasp_success = get_optional<bool>(j, "grasp_success");
  return m;
}

Scene scene_from_json(const json& j) {
  if (!j.contains("schema_version")) throw ConfigError("scene snapshot lacks schema_version");
  if (j.at("schema_version").get<int>() != kSceneSchemaVersion) {
    throw ConfigError("unsupported scene schema_version " + j.at("schema_version").dump());
  }
  Scene s;
  s.spec = task_spec_from_json(j.at("spec"));
  s.schedule = schedule_from_json(j.at("schedule"));
  s.gripper = pose_from(j.at("gripper"));
  if (!j.at("held_object").is_null()) s.held_object = j.at("held_object").get<std::string>();
  for (const auto& p : j.at("props")) {
    s.props.push_back({p.at("id").get<std::string>(), pose_from(p.at("pose")), vec3_from_json(p.at("half_extent")),
                       rgba_from(p.at("color")),
                       p.at("style").get<std::string>() == "wireframe" ? PropStyle::Wireframe : PropStyle::Filled});
  }
  s.step_index = j.at("step_index").get<int>();
  s.rng_seed = j.at("rng_seed").get<std::uint64_t>();
  return s;
}

}  // namespace vfr::sim
