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
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "vfr/prompt/prompt.hpp"
#include "vfr/sim/scene.hpp"
#include "vfr/task/assembly.hpp"
#include "vfr/vlm/backend.hpp"

namespace vfr::control {

enum class Termination { StepLimit, Converged, Errored };

std::string_view to_string(Termination t) noexcept;
Termination parse_termination(std::string_view s);

/// One backend call as it happened.
struct QueryTrace {
  std::string id;
  std::string system_text;
  std::string user_text;
  std::vector<std::string> image_digests;
  std::string response;
  /// Parsed token or label; empty when parsing failed or the call errored.
  std::optional<std::string> parsed;
  /// Parse, protocol or backend error message.
  std::optional<std::string> error;
  /// "parse", "protocol", "backend_unavailable" or "backend_error".
  std::optional<std::string> error_kind;
  int error_status{0};
  friend bool operator==(const QueryTrace&, const QueryTrace&) = default;
};

struct StepEntry {
  int step{0};
  double step_size{0};
  std::vector<QueryTrace> queries;
  std::vector<sim::DiscreteAction> applied;
  sim::Pose gripper;
  sim::MetricSet metrics;
  friend bool operator==(const StepEntry&, const StepEntry&) = default;
};

struct EpisodeRecord {
  sim::TaskSpec spec;
  sim::StepSchedule schedule;
  prompt::PromptVariant variant{prompt::PromptVariant::Full};
  std::string backend;
  nlohmann::json backend_config;
  std::uint64_t seed{0};
  sim::Scene initial;
  sim::MetricSet initial_metrics;
  std::vector<StepEntry> steps;
  Termination termination{Termination::StepLimit};
  std::optional<std::string> error;
  sim::MetricSet final_metrics;
  /// Lowest primary error over post-step states (initial state if no step ran).
  sim::MetricSet best_metrics;
  int best_step{-1};
};

struct RunOptions {
  /// Recorded verbatim in transcripts.
  nlohmann::json backend_config;
  /// When set, every distinct image is written there as <digest>.png.
  std::optional<std::filesystem::path> image_dir;
  prompt::DetectionMode detection_mode{prompt::DetectionMode::Decomposed};
};

/// Closed-loop motion correction: query, parse, act, decay, stop. Backend
/// failures end the episode as Errored; unparseable answers act as None.
EpisodeRecord run_motion_episode(const sim::TaskSpec& spec, prompt::PromptVariant variant, vlm::Backend& backend,
                                 const sim::StepSchedule& schedule, std::uint64_t seed, const RunOptions& opts = {});

struct CriterionOutcome {
  /// What the simulator says (true = condition holds).
  bool truth{true};
  /// Model's answer; empty when it could not be parsed.
  std::optional<bool> answer;
  friend bool operator==(const CriterionOutcome&, const CriterionOutcome&) = default;
};

struct TaskEpisodeRecord {
  std::uint64_t seed{0};
  std::string structure;
  std::optional<task::FailureType> failure;
  task::Phase phase{task::Phase::Pick};
  task::AssemblyState pre_state;
  task::AssemblyState post_state;
  task::GoalSpec goal{task::Phase::Pick, 0, {}};
  std::string backend;
  nlohmann::json backend_config;

  std::vector<QueryTrace> detection;
  std::vector<CriterionOutcome> criteria;
  bool failure_detected{false};

  std::optional<QueryTrace> analysis;
  std::optional<std::string> analysis_label;
  std::optional<QueryTrace> planning;
  std::optional<task::RecoveryPlan> plan;
  std::optional<std::string> plan_error;
  std::optional<task::Verdict> verdict;

  bool errored{false};
  std::optional<std::string> error;

  bool D{false};
  bool A{false};
  bool P{false};
};

/// Detect, analyze, plan, validate. `failure` empty runs a control episode in
/// which the attempt succeeds. `state` must be right before an attempt of
/// `phase` (the failure's phase when one is given).
TaskEpisodeRecord run_task_episode(const task::AssemblyState& state, std::optional<task::FailureType> failure,
                                   task::Phase phase, vlm::Backend& backend, std::uint64_t seed,
                                   const RunOptions& opts = {}, std::string structure = {});

}  // namespace vfr::control
