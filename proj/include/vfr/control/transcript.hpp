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

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "vfr/control/controller.hpp"

namespace vfr::control {

/// Version of the transcript line format.
inline constexpr int kTranscriptSchemaVersion = 1;

/// Header line, one line per step, summary line.
std::vector<nlohmann::json> transcript_lines(const EpisodeRecord& rec);
/// Header line, one line per query, summary line.
std::vector<nlohmann::json> transcript_lines(const TaskEpisodeRecord& rec, prompt::DetectionMode mode);

std::string to_jsonl(const std::vector<nlohmann::json>& lines);
/// Throws IoError.
void write_jsonl(const std::filesystem::path& path, const std::vector<nlohmann::json>& lines);
/// Throws IoError or ParseError (with the line number).
std::vector<nlohmann::json> read_jsonl(const std::filesystem::path& path);

nlohmann::json to_json(const task::AssemblyState& s);
task::AssemblyState assembly_from_json(const nlohmann::json& j);
nlohmann::json to_json(const task::Verdict& v);

struct ReplayResult {
  bool identical{false};
  /// Empty when identical.
  std::string difference;
  std::vector<nlohmann::json> regenerated;
};

/// Re-executes the episode with the recorded responses played back and
/// compares the regenerated transcript line by line.
ReplayResult replay_transcript(const std::vector<nlohmann::json>& lines);

}  // namespace vfr::control
