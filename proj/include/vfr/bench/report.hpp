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

#include "vfr/bench/config.hpp"

namespace vfr::bench {

inline constexpr int kReportSchemaVersion = 1;

struct Stat {
  int n{0};
  std::optional<double> mean;
  std::optional<double> median;
  friend bool operator==(const Stat&, const Stat&) = default;
};

Stat summarize(std::vector<double> values);

/// Aggregates of one (experiment, variant) cell over non-errored episodes.
struct MotionCell {
  std::string experiment;
  sim::TaskKind task{sim::TaskKind::TargetReach};
  prompt::PromptVariant variant{prompt::PromptVariant::Full};
  int episodes{0};
  int errored{0};
  int converged{0};
  Stat final_distance, best_distance;
  Stat final_angle, best_angle;
  Stat final_coverage, best_coverage;
  Stat final_pixel, best_pixel;
  int successes{0};
  /// Episodes whose metrics define success.
  int success_total{0};
  friend bool operator==(const MotionCell&, const MotionCell&) = default;
};

/// D/A/P counts of one (experiment, failure) row over non-errored episodes.
struct TaskRow {
  std::string experiment;
  /// Failure label, or control_pick / control_place.
  std::string label;
  int episodes{0};
  int errored{0};
  int detected{0};
  int analyzed{0};
  int planned{0};
  friend bool operator==(const TaskRow&, const TaskRow&) = default;
};

struct EpisodeRef {
  std::string experiment;
  /// Variant name or failure label.
  std::string group;
  int index{0};
  std::uint64_t seed{0};
  /// Relative to the report directory.
  std::string transcript;
  bool errored{false};
  friend bool operator==(const EpisodeRef&, const EpisodeRef&) = default;
};

struct Report {
  std::string suite;
  std::vector<MotionCell> motion;
  std::vector<TaskRow> tasks;
  std::vector<EpisodeRef> episodes;
  friend bool operator==(const Report&, const Report&) = default;
};

nlohmann::json to_json(const Report& r);
Report report_from_json(const nlohmann::json& j);

/// Folds transcripts (in episode order) into a report. Motion cells and task
/// rows appear in first-seen order.
Report aggregate(const std::string& suite, const std::vector<EpisodeRef>& refs,
                 const std::vector<std::vector<nlohmann::json>>& transcripts);

std::string render_markdown(const Report& r);
/// motion.csv and task.csv contents; empty when there are no rows of that kind.
std::string render_motion_csv(const Report& r);
std::string render_task_csv(const Report& r);

/// Writes report.json plus the requested formats into `dir`. An empty report
/// writes nothing and returns a warning message.
std::optional<std::string> emit_report(const Report& r, const std::vector<ReportFormat>& formats,
                                       const std::filesystem::path& dir);

struct VerifyResult {
  bool ok{false};
  std::string message;
};

/// Recomputes every aggregate from the transcripts under `dir` and compares
/// with the stored report.json and rendered tables.
VerifyResult verify_report(const std::filesystem::path& dir);

}  // namespace vfr::bench
