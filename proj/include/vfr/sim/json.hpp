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

#include <json.hpp>

#include "vfr/sim/scene.hpp"

namespace vfr::sim {

/// Version of the scene snapshot document.
inline constexpr int kSceneSchemaVersion = 1;

nlohmann::json to_json(const Vec3& v);
nlohmann::json to_json(const StepSchedule& s);
nlohmann::json to_json(const TaskSpec& spec);
nlohmann::json to_json(const MetricSet& m);

/// Snapshot document with a top-level "schema_version".
nlohmann::json scene_to_json(const Scene& scene);

Vec3 vec3_from_json(const nlohmann::json& j);
StepSchedule schedule_from_json(const nlohmann::json& j);
TaskSpec task_spec_from_json(const nlohmann::json& j);
MetricSet metrics_from_json(const nlohmann::json& j);
/// Throws ConfigError on a missing or unsupported schema_version.
Scene scene_from_json(const nlohmann::json& j);

}  // namespace vfr::sim
