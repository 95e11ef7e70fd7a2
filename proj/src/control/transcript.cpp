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

#include "vfr/control/transcript.hpp"

#include <fstream>

#include "vfr/error.hpp"
#include "vfr/sim/json.hpp"

namespace vfr::control {

using nlohmann::json;

namespace {

template <typename T>
json opt(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

json trace_json(const QueryTrace& t) {
  return {{"id", t.id},
          {"system", t.system_text},
          {"user", t.user_text},
          {"images", t.image_digests},
          {"response", t.response},
          {"parsed", opt(t.parsed)},
          {"error", opt(t.error)},
          {"error_kind", opt(t.error_kind)},
          {"error_status", t.error_status}};
}

json pose_json(const sim::Pose& p) { return {{"position", sim::to_json(p.position)}, {"yaw_deg", p.yaw_deg}}; }

json tokens(const std::vector<sim::DiscreteAction>& actions) {
  json out = json::array();
  for (auto a : actions) out.push_back(std::string(sim::token(a)));
  return out;
}

json colors_json(const std::vector<task::BlockColor>& colors) {
  json out = json::array();
  for (auto c : colors) out.push_back(std::string(task::to_string(c)));
  return out;
}

std::vector<task::BlockColor> colors_from(const json& j) {
  std::vector<task::BlockColor> out;
  for (const auto& c : j) out.push_back(task::parse_block_color(c.get<std::string>()));
  return out;
}

json counts_json(const task::ColorCounts& c) {
  json out = json::object();
  for (std::size_t i = 0; i < task::kColorCount; ++i) out[std::string(task::to_string(task::kAllColors[i]))] = c[i];
  return out;
}

task::ColorCounts counts_from(const json& j) {
  task::ColorCounts c{};
  for (std::size_t i = 0; i < task::kColorCount; ++i) {
    c[i] = j.at(std::string(task::to_string(task::kAllColors[i]))).get<int>();
  }
  return c;
}

task::Location location_from(const std::string& s) {
  for (auto l : {task::Location::PickupArea, task::Location::PlaceArea, task::Location::DiscardArea}) {
    if (task::to_string(l) == s) return l;
  }
  throw ParseError("unknown location '" + s + "'");
}

json plan_json(const task::RecoveryPlan& plan) {
  json out = json::array();
  for (const auto& s : plan) out.push_back(task::describe(s));
  return out;
}

vlm::ScriptedBackend::Reply reply_from(const json& q) {
  vlm::ScriptedBackend::Reply r;
  r.text = q.at("response").get<std::string>();
  const auto& kind = q.at("error_kind");
  if (kind.is_string()) {
    const auto k = kind.get<std::string>();
    if (k == "backend_error" || k == "backend_unavailable") {
      r.error_kind = k;
      r.status = q.at("error_status").get<int>();
    }
  }
  return r;
}

ReplayResult compare(const std::vector<json>& original, std::vector<json> regenerated, std::size_t leftover) {
  ReplayResult out;
  out.regenerated = std::move(regenerated);
  const auto& regen = out.regenerated;
  const std::size_t n = std::min(original.size(), regen.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (original[i] != regen[i]) {
      const auto patch = json::diff(original[i], regen[i]);
      out.difference = "line " + std::to_string(i + 1) + " differs: " + patch.dump();
      return out;
    }
  }
  if (original.size() != regen.size()) {
    out.difference = "line count differs: recorded " + std::to_string(original.size()) + ", replayed " +
                     std::to_string(regen.size());
    return out;
  }
  if (leftover != 0) {
    out.difference = std::to_string(leftover) + " recorded response(s) were not consumed";
    return out;
  }
  out.identical = true;
  return out;
}

}  // namespace

json to_json(const task::AssemblyState& s) {
  json ref = json::array();
  for (const auto& r : s.reference) {
    ref.push_back({{"color", std::string(task::to_string(r.color))}, {"col", r.pos.col}, {"row", r.pos.row}});
  }
  json built = json::array();
  for (const auto& b : s.built) {
    built.push_back({{"color", std::string(task::to_string(b.color))},
                     {"col", b.pos.col},
                     {"row", b.pos.row},
                     {"intact", b.intact}});
  }
  return {{"reference", ref},
          {"built", built},
          {"location", std::string(task::to_string(s.gripper_location))},
          {"holding", colors_json(s.holding)},
          {"supply", counts_json(s.supply)},
          {"discard", counts_json(s.discard_pile)},
          {"cursor", s.cursor}};
}

task::AssemblyState assembly_from_json(const json& j) {
  task::AssemblyState s;
  for (const auto& r : j.at("reference")) {
    s.reference.push_back({task::parse_block_color(r.at("color").get<std::string>()),
                           {r.at("col").get<int>(), r.at("row").get<int>()}});
  }
  for (const auto& b : j.at("built")) {
    s.built.push_back({task::parse_block_color(b.at("color").get<std::string>()),
                       {b.at("col").get<int>(), b.at("row").get<int>()},
                       b.at("intact").get<bool>()});
  }
  s.gripper_location = location_from(j.at("location").get<std::string>());
  s.holding = colors_from(j.at("holding"));
  s.supply = counts_from(j.at("supply"));
  s.discard_pile = counts_from(j.at("discard"));
  s.cursor = j.at("cursor").get<std::size_t>();
  return s;
}

json to_json(const task::Verdict& v) {
  return {{"kind", std::string(task::to_string(v.kind))},
          {"step", v.step},
          {"skill", v.skill ? json(task::describe(*v.skill)) : json(nullptr)},
          {"detail", v.detail}};
}

std::vector<json> transcript_lines(const EpisodeRecord& rec) {
  std::vector<json> lines;
  lines.push_back({{"type", "header"},
                   {"schema_version", kTranscriptSchemaVersion},
                   {"kind", "motion"},
                   {"task", sim::to_json(rec.spec)},
                   {"schedule", sim::to_json(rec.schedule)},
                   {"variant", std::string(prompt::to_string(rec.variant))},
                   {"backend", rec.backend},
                   {"backend_config", rec.backend_config},
                   {"seed", rec.seed},
                   {"initial_scene", sim::scene_to_json(rec.initial)},
                   {"initial_metrics", sim::to_json(rec.initial_metrics)}});
  for (const auto& e : rec.steps) {
    json queries = json::array();
    for (const auto& q : e.queries) queries.push_back(trace_json(q));
    lines.push_back({{"type", "step"},
                     {"step", e.step},
                     {"step_size", e.step_size},
                     {"queries", queries},
                     {"applied", tokens(e.applied)},
                     {"gripper", pose_json(e.gripper)},
                     {"metrics", sim::to_json(e.metrics)}});
  }
  lines.push_back({{"type", "summary"},
                   {"termination", std::string(to_string(rec.termination))},
                   {"error", opt(rec.error)},
                   {"steps", rec.steps.size()},
                   {"final_metrics", sim::to_json(rec.final_metrics)},
                   {"best_metrics", sim::to_json(rec.best_metrics)},
                   {"best_step", rec.best_step}});
  return lines;
}

std::vector<json> transcript_lines(const TaskEpisodeRecord& rec, prompt::DetectionMode mode) {
  std::vector<json> lines;
  lines.push_back({{"type", "header"},
                   {"schema_version", kTranscriptSchemaVersion},
                   {"kind", "task"},
                   {"seed", rec.seed},
                   {"structure", rec.structure},
                   {"failure", rec.failure ? json(std::string(task::failure_label(*rec.failure))) : json(nullptr)},
                   {"phase", std::string(task::to_string(rec.phase))},
                   {"detection_mode", mode == prompt::DetectionMode::Decomposed ? "decomposed" : "combined"},
                   {"pre_state", to_json(rec.pre_state)},
                   {"backend", rec.backend},
                   {"backend_config", rec.backend_config}});
  for (const auto& t : rec.detection) {
    auto j = trace_json(t);
    j["type"] = "query";
    j["stage"] = "detection";
    lines.push_back(std::move(j));
  }
  if (rec.analysis) {
    auto j = trace_json(*rec.analysis);
    j["type"] = "query";
    j["stage"] = "analysis";
    lines.push_back(std::move(j));
  }
  if (rec.planning) {
    auto j = trace_json(*rec.planning);
    j["type"] = "query";
    j["stage"] = "plan";
    lines.push_back(std::move(j));
  }
  json criteria = json::array();
  for (const auto& c : rec.criteria) criteria.push_back({{"truth", c.truth}, {"answer", opt(c.answer)}});
  lines.push_back({{"type", "summary"},
                   {"post_state", to_json(rec.post_state)},
                   {"goal",
                    {{"phase", std::string(task::to_string(rec.goal.phase))},
                     {"prefix_len", rec.goal.prefix_len},
                     {"holding", colors_json(rec.goal.holding)}}},
                   {"criteria", criteria},
                   {"failure_detected", rec.failure_detected},
                   {"analysis_label", opt(rec.analysis_label)},
                   {"plan", rec.plan ? plan_json(*rec.plan) : json(nullptr)},
                   {"plan_error", opt(rec.plan_error)},
                   {"verdict", rec.verdict ? to_json(*rec.verdict) : json(nullptr)},
                   {"errored", rec.errored},
                   {"error", opt(rec.error)},
                   {"D", rec.D},
                   {"A", rec.A},
                   {"P", rec.P}});
  return lines;
}

std::string to_jsonl(const std::vector<json>& lines) {
  std::string out;
  for (const auto& l : lines) {
    out += l.dump();
    out += '\n';
  }
  return out;
}

void write_jsonl(const std::filesystem::path& path, const std::vector<json>& lines) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  const auto text = to_jsonl(lines);
  f.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!f) throw IoError("write failed for " + path.string());
}

std::vector<json> read_jsonl(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path.string());
  std::vector<json> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(f, line)) {
    ++n;
    if (line.empty()) continue;
    try {
      out.push_back(json::parse(line));
    } catch (const json::exception& e) {
      throw ParseError(path.string() + ":" + std::to_string(n) + ": " + e.what());
    }
  }
  return out;
}

ReplayResult replay_transcript(const std::vector<json>& lines) {
  if (lines.empty()) throw ParseError("empty transcript");
  const auto& h = lines.front();
  if (h.value("type", "") != "header") throw ParseError("transcript does not start with a header line");
  if (h.value("schema_version", 0) != kTranscriptSchemaVersion) {
    throw ParseError("unsupported transcript schema_version");
  }
  try {
    std::vector<vlm::ScriptedBackend::Reply> replies;
    const auto kind = h.at("kind").get<std::string>();
    RunOptions opts;
    opts.backend_config = h.at("backend_config");
    if (kind == "motion") {
      for (const auto& l : lines) {
        if (l.value("type", "") != "step") continue;
        for (const auto& q : l.at("queries")) replies.push_back(reply_from(q));
      }
      vlm::ScriptedBackend backend(std::move(replies), h.at("backend").get<std::string>());
      const auto spec = sim::task_spec_from_json(h.at("task"));
      const auto schedule = sim::schedule_from_json(h.at("schedule"));
      const auto rec = run_motion_episode(spec, prompt::parse_variant(h.at("variant").get<std::string>()), backend,
                                          schedule, h.at("seed").get<std::uint64_t>(), opts);
      return compare(lines, transcript_lines(rec), backend.remaining());
    }
    if (kind == "task") {
      for (const auto& l : lines) {
        if (l.value("type", "") == "query") replies.push_back(reply_from(l));
      }
      vlm::ScriptedBackend backend(std::move(replies), h.at("backend").get<std::string>());
      opts.detection_mode = h.at("detection_mode").get<std::string>() == "combined" ? prompt::DetectionMode::Combined
                                                                                   : prompt::DetectionMode::Decomposed;
      std::optional<task::FailureType> failure;
      if (!h.at("failure").is_null()) failure = task::parse_failure(h.at("failure").get<std::string>());
      const auto phase = h.at("phase").get<std::string>() == "pick" ? task::Phase::Pick : task::Phase::Place;
      const auto rec = run_task_episode(assembly_from_json(h.at("pre_state")), failure, phase, backend,
                                        h.at("seed").get<std::uint64_t>(), opts, h.at("structure").get<std::string>());
      return compare(lines, transcript_lines(rec, opts.detection_mode), backend.remaining());
    }
    throw ParseError("unknown transcript kind '" + kind + "'");
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed transcript: ") + e.what());
  }
}

}  // namespace vfr::control
