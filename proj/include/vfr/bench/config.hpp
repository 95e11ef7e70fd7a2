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
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vfr/prompt/prompt.hpp"
#include "vfr/sim/types.hpp"
#include "vfr/task/assembly.hpp"
#include "vfr/vlm/backend.hpp"

namespace vfr::bench {

inline constexpr int kConfigSchemaVersion = 1;

enum class ExperimentType { Motion, Task };

struct MotionExperiment {
  sim::TaskSpec task;
  std::vector<prompt::PromptVariant> variants;
};

struct TaskExperiment {
  /// Structures cycled over episodes, in order.
  std::vector<std::string> structure_sets;
  std::vector<task::FailureType> failures;
  /// Also run failure-free episodes for each phase.
  bool controls{false};
  prompt::DetectionMode detection_mode{prompt::DetectionMode::Decomposed};
};

struct Experiment {
  std::string id;
  ExperimentType type{ExperimentType::Motion};
  vlm::BackendConfig backend;
  int episodes{1};
  std::uint64_t base_seed{0};
  MotionExperiment motion;
  TaskExperiment task;
};

enum class ReportFormat { Markdown, Csv };

struct RunConfig {
  std::string suite;
  std::vector<Experiment> experiments;
  std::filesystem::path output_dir;
  std::vector<ReportFormat> formats{ReportFormat::Markdown, ReportFormat::Csv};
  /// Store every distinct prompt image as <digest>.png under output_dir/images.
  bool save_images{false};
  std::map<std::string, std::vector<task::RefBlock>> structures;
  /// Used when --backend live overrides oracle experiments.
  std::optional<vlm::LiveConfig> live;
};

/// Structure sets file: {"schema_version":1,"sets":[{"name":..,"blocks":[{"color","col","row"}]}]}.
std::map<std::string, std::vector<task::RefBlock>> load_structures(const std::filesystem::path& path);

/// Parses and validates a suite config. Relative paths resolve against the
/// config's directory. Throws ConfigError naming the file, line and field.
RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_config(const std::string& text, const std::filesystem::path& origin);

/// Command-line overrides applied after loading.
struct Overrides {
  std::optional<std::string> backend;  // "oracle" or "live"
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> out;
};
void apply_overrides(RunConfig& cfg, const Overrides& o);

}  // namespace vfr::bench
