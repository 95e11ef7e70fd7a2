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

#include "vfr/bench/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "vfr/error.hpp"

namespace vfr::bench {

using nlohmann::json;

namespace {

std::string pointer_escape(const std::string& key) {
  std::string out;
  for (char c : key) {
    if (c == '~') {
      out += "~0";
    } else if (c == '/') {
      out += "~1";
    } else {
      out += c;
    }
  }
  return out;
}

/// Maps each JSON pointer of an already-valid document to the line where its
/// key (or array element) starts. nlohmann::json keeps no source positions.
class LocationScanner {
 public:
  explicit LocationScanner(const std::string& text) : s_(text) {
    value("");
  }
  std::map<std::string, int> take() { return std::move(lines_); }

 private:
  void ws() {
    while (i_ < s_.size() && (s_[i_] == ' ' || s_[i_] == '\t' || s_[i_] == '\n' || s_[i_] == '\r')) {
      if (s_[i_] == '\n') ++line_;
      ++i_;
    }
  }

  std::string string_token() {
    const std::size_t start = i_++;
    while (i_ < s_.size() && s_[i_] != '"') i_ += s_[i_] == '\\' ? 2 : 1;
    ++i_;
    return json::parse(s_.substr(start, i_ - start)).get<std::string>();
  }

  void value(const std::string& ptr) {
    ws();
    lines_.emplace(ptr, line_);
    if (i_ >= s_.size()) return;
    if (s_[i_] == '{') {
      ++i_;
      for (;;) {
        ws();
        if (s_[i_] == '}') break;
        if (s_[i_] == ',') {
          ++i_;
          continue;
        }
        const int key_line = line_;
        const auto key = string_token();
        const auto child = ptr + "/" + pointer_escape(key);
        lines_.emplace(child, key_line);
        ws();
        ++i_;  // ':'
        value(child);
      }
      ++i_;
    } else if (s_[i_] == '[') {
      ++i_;
      std::size_t n = 0;
      for (;;) {
        ws();
        if (s_[i_] == ']') break;
        if (s_[i_] == ',') {
          ++i_;
          continue;
        }
        value(ptr + "/" + std::to_string(n++));
      }
      ++i_;
    } else if (s_[i_] == '"') {
      string_token();
    } else {
      while (i_ < s_.size() && s_[i_] != ',' && s_[i_] != '}' && s_[i_] != ']' && s_[i_] != '\n' && s_[i_] != ' ') ++i_;
    }
  }

  const std::string& s_;
  std::size_t i_{0};
  int line_{1};
  std::map<std::string, int> lines_;
};

class Doc {
 public:
  Doc(const std::string& text, std::filesystem::path origin) : origin_(std::move(origin)) {
    try {
      root_ = json::parse(text);
    } catch (const json::parse_error& e) {
      throw ConfigError(origin_.string() + ": invalid JSON: " + e.what());
    }
    lines_ = LocationScanner(text).take();
  }

  const json& root() const { return root_; }
  const std::filesystem::path& origin() const { return origin_; }

  [[noreturn]] void fail(const std::string& ptr, const std::string& msg) const {
    std::string where = origin_.string();
    std::string p = ptr;
    // Fall back to the closest enclosing field that has a location.
    for (;;) {
      if (const auto it = lines_.find(p); it != lines_.end()) {
        where += ":" + std::to_string(it->second);
        break;
      }
      const auto slash = p.rfind('/');
      if (slash == std::string::npos) break;
      p = p.substr(0, slash);
    }
    throw ConfigError(where + ": field '" + (ptr.empty() ? "/" : ptr) + "': " + msg);
  }

 private:
  std::filesystem::path origin_;
  json root_;
  std::map<std::string, int> lines_;
};

/// A JSON object with its pointer, checked against a set of allowed keys.
class Obj {
 public:
  Obj(const Doc& doc, const json& j, std::string ptr, std::set<std::string> allowed)
      : doc_(doc), j_(j), ptr_(std::move(ptr)) {
    if (!j_.is_object()) doc_.fail(ptr_, "expected an object");
    for (const auto& [k, v] : j_.items()) {
      if (!allowed.count(k)) doc_.fail(child(k), "unrecognized field");
    }
  }

  bool has(const std::string& k) const { return j_.contains(k) && !j_.at(k).is_null(); }
  std::string child(const std::string& k) const { return ptr_ + "/" + pointer_escape(k); }
  const json& at(const std::string& k) const {
    if (!j_.contains(k)) doc_.fail(child(k), "required field is missing");
    return j_.at(k);
  }
  const Doc& doc() const { return doc_; }

  std::string str(const std::string& k) const {
    const auto& v = at(k);
    if (!v.is_string()) doc_.fail(child(k), "expected a string");
    return v.get<std::string>();
  }
  std::string str(const std::string& k, const std::string& def) const { return has(k) ? str(k) : def; }

  double num(const std::string& k) const {
    const auto& v = at(k);
    if (!v.is_number()) doc_.fail(child(k), "expected a number");
    return v.get<double>();
  }
  double num(const std::string& k, double def) const { return has(k) ? num(k) : def; }

  std::int64_t integer(const std::string& k) const {
    const auto& v = at(k);
    if (!v.is_number_integer()) doc_.fail(child(k), "expected an integer");
    return v.get<std::int64_t>();
  }
  std::int64_t integer(const std::string& k, std::int64_t def) const { return has(k) ? integer(k) : def; }

  std::uint64_t uinteger(const std::string& k, std::uint64_t def) const {
    if (!has(k)) return def;
    const auto& v = at(k);
    if (!v.is_number_unsigned()) doc_.fail(child(k), "expected a nonnegative integer");
    return v.get<std::uint64_t>();
  }

  bool boolean(const std::string& k, bool def) const {
    if (!has(k)) return def;
    const auto& v = at(k);
    if (!v.is_boolean()) doc_.fail(child(k), "expected true or false");
    return v.get<bool>();
  }

  std::vector<std::string> strings(const std::string& k) const {
    const auto& v = at(k);
    if (!v.is_array()) doc_.fail(child(k), "expected an array of strings");
    std::vector<std::string> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_string()) doc_.fail(child(k) + "/" + std::to_string(i), "expected a string");
      out.push_back(v[i].get<std::string>());
    }
    return out;
  }

  Obj object(const std::string& k, std::set<std::string> allowed) const {
    return Obj(doc_, at(k), child(k), std::move(allowed));
  }

  /// Runs `f` and rewrites a ConfigError from domain validation into one located at `k`.
  template <typename F>
  auto located(const std::string& k, F&& f) const {
    try {
      return f();
    } catch (const ConfigError& e) {
      doc_.fail(child(k), e.what());
    }
  }

 private:
  const Doc& doc_;
  const json& j_;
  std::string ptr_;
};

vlm::OracleKnobs parse_knobs(const Obj& o) {
  vlm::OracleKnobs k;
  k.axis_accuracy = o.num("axis_accuracy", k.axis_accuracy);
  k.combined_accuracy = o.num("combined_accuracy", k.combined_accuracy);
  k.unanchored_penalty = o.num("unanchored_penalty", k.unanchored_penalty);
  k.absolute_penalty = o.num("absolute_penalty", k.absolute_penalty);
  k.detection_accuracy = o.num("detection_accuracy", k.detection_accuracy);
  k.analysis_accuracy = o.num("analysis_accuracy", k.analysis_accuracy);
  k.plan_accuracy = o.num("plan_accuracy", k.plan_accuracy);
  k.move_threshold = o.num("move_threshold", k.move_threshold);
  if (o.has("stop_deadband")) k.stop_deadband = o.num("stop_deadband");
  return k;
}

vlm::LiveConfig parse_live(const Obj& o) {
  vlm::LiveConfig l;
  l.endpoint = o.str("endpoint");
  l.model = o.str("model");
  l.token_env = o.str("token_env", l.token_env);
  l.auth_header = o.str("auth_header", l.auth_header);
  l.auth_prefix = o.str("auth_prefix", l.auth_prefix);
  l.timeout_s = o.num("timeout_s", l.timeout_s);
  l.retries = static_cast<int>(o.integer("retries", l.retries));
  l.backoff_ms = static_cast<int>(o.integer("backoff_ms", l.backoff_ms));
  l.max_tokens = static_cast<int>(o.integer("max_tokens", l.max_tokens));
  l.temperature = o.num("temperature", l.temperature);
  l.response_pointer = o.str("response_pointer", l.response_pointer);
  if (o.has("wire")) {
    const auto w = o.object("wire", {"max_tokens_field", "image_type", "image_data_field", "image_media_type_field"});
    l.wire.max_tokens_field = w.str("max_tokens_field", l.wire.max_tokens_field);
    l.wire.image_type = w.str("image_type", l.wire.image_type);
    l.wire.image_data_field = w.str("image_data_field", l.wire.image_data_field);
    l.wire.image_media_type_field = w.str("image_media_type_field", l.wire.image_media_type_field);
  }
  return l;
}

const std::set<std::string> kLiveKeys{"kind",     "endpoint",   "model",      "token_env",   "auth_header",
                                      "auth_prefix", "timeout_s", "retries",    "backoff_ms",  "max_tokens",
                                      "temperature", "response_pointer", "wire"};

vlm::BackendConfig parse_backend(const Obj& parent, const std::string& key) {
  const auto& j = parent.at(key);
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string()) {
    parent.doc().fail(parent.child(key), "expected an object with a string 'kind'");
  }
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "oracle") {
    const auto o = parent.object(key, {"kind", "seed", "knobs"});
    vlm::OracleConfig cfg;
    cfg.seed = o.uinteger("seed", 0);
    if (o.has("knobs")) {
      const auto k = o.object("knobs", {"axis_accuracy", "combined_accuracy", "unanchored_penalty",
                                        "absolute_penalty", "detection_accuracy", "analysis_accuracy",
                                        "plan_accuracy", "move_threshold", "stop_deadband"});
      cfg.knobs = parse_knobs(k);
      o.located("knobs", [&] { cfg.knobs.validate(); return 0; });
    }
    return cfg;
  }
  if (kind == "live") {
    const auto o = parent.object(key, kLiveKeys);
    auto cfg = parse_live(o);
    parent.located(key, [&] { cfg.validate(); return 0; });
    return cfg;
  }
  parent.doc().fail(parent.child(key) + "/kind", "unknown backend kind '" + kind + "' (expected oracle or live)");
}

std::map<std::string, std::vector<task::RefBlock>> parse_structures(const Doc& doc) {
  const Obj top(doc, doc.root(), "", {"schema_version", "sets"});
  if (top.integer("schema_version") != kConfigSchemaVersion) doc.fail("/schema_version", "unsupported version");
  const auto& sets = top.at("sets");
  if (!sets.is_array() || sets.empty()) doc.fail("/sets", "expected a nonempty array");
  std::map<std::string, std::vector<task::RefBlock>> out;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    const auto ptr = "/sets/" + std::to_string(i);
    const Obj s(doc, sets[i], ptr, {"name", "blocks"});
    const auto name = s.str("name");
    if (out.count(name)) doc.fail(ptr + "/name", "duplicate structure set '" + name + "'");
    const auto& blocks = s.at("blocks");
    if (!blocks.is_array() || blocks.empty()) doc.fail(ptr + "/blocks", "expected a nonempty array");
    std::vector<task::RefBlock> ref;
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      const Obj blk(doc, blocks[b], ptr + "/blocks/" + std::to_string(b), {"color", "col", "row"});
      const auto color = blk.located("color", [&] {
        try {
          return task::parse_block_color(blk.str("color"));
        } catch (const Error& e) {
          throw ConfigError(e.what());
        }
      });
      ref.push_back({color, {static_cast<int>(blk.integer("col")), static_cast<int>(blk.integer("row"))}});
    }
    s.located("blocks", [&] {
      if (auto bad = task::check_state(task::make_phase_state(ref, 0, task::Phase::Pick))) throw ConfigError(*bad);
      return 0;
    });
    out.emplace(name, std::move(ref));
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot read " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

prompt::PromptVariant variant_at(const Obj& o, const std::string& key, std::size_t i, const std::string& name) {
  try {
    return prompt::parse_variant(name);
  } catch (const Error& e) {
    o.doc().fail(o.child(key) + "/" + std::to_string(i), e.what());
  }
}

}  // namespace

std::map<std::string, std::vector<task::RefBlock>> load_structures(const std::filesystem::path& path) {
  const Doc doc(read_file(path), path);
  return parse_structures(doc);
}

RunConfig parse_config(const std::string& text, const std::filesystem::path& origin) {
  const Doc doc(text, origin);
  const Obj top(doc, doc.root(), "",
                {"schema_version", "suite", "output_dir", "formats", "save_images", "structures", "backend", "live",
                 "experiments"});
  if (top.integer("schema_version") != kConfigSchemaVersion) {
    doc.fail("/schema_version", "unsupported version (expected " + std::to_string(kConfigSchemaVersion) + ")");
  }
  const auto base = origin.parent_path();
  RunConfig cfg;
  cfg.suite = top.str("suite");
  if (cfg.suite.empty()) doc.fail("/suite", "must not be empty");
  cfg.output_dir = base / top.str("output_dir", "out/" + cfg.suite);
  cfg.save_images = top.boolean("save_images", false);
  if (top.has("formats")) {
    cfg.formats.clear();
    const auto names = top.strings("formats");
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (names[i] == "markdown") {
        cfg.formats.push_back(ReportFormat::Markdown);
      } else if (names[i] == "csv") {
        cfg.formats.push_back(ReportFormat::Csv);
      } else {
        doc.fail("/formats/" + std::to_string(i), "unknown format '" + names[i] + "' (expected markdown or csv)");
      }
    }
  }
  if (top.has("structures")) {
    const auto path = base / top.str("structures");
    cfg.structures = top.located("structures", [&] { return load_structures(path); });
  }
  vlm::BackendConfig default_backend = vlm::OracleConfig{};
  if (top.has("backend")) default_backend = parse_backend(top, "backend");
  if (top.has("live")) {
    const auto o = top.object("live", kLiveKeys);
    auto live = parse_live(o);
    top.located("live", [&] { live.validate(); return 0; });
    cfg.live = live;
  }

  const auto& exps = top.at("experiments");
  if (!exps.is_array()) doc.fail("/experiments", "expected an array");
  if (exps.empty()) return cfg;
  std::set<std::string> ids;
  for (std::size_t i = 0; i < exps.size(); ++i) {
    const auto ptr = "/experiments/" + std::to_string(i);
    const auto& ej = exps[i];
    if (!ej.is_object() || !ej.contains("type") || !ej.at("type").is_string()) {
      doc.fail(ptr, "expected an object with a string 'type'");
    }
    const auto type = ej.at("type").get<std::string>();
    Experiment e;
    std::set<std::string> allowed{"id", "type", "backend", "episodes", "base_seed"};
    if (type == "motion") {
      e.type = ExperimentType::Motion;
      allowed.insert({"task", "variants", "schedule", "success_tolerance", "coverage_mode"});
    } else if (type == "task") {
      e.type = ExperimentType::Task;
      allowed.insert({"structure_sets", "failures", "controls", "detection_mode"});
    } else {
      doc.fail(ptr + "/type", "unknown experiment type '" + type + "' (expected motion or task)");
    }
    const Obj o(doc, ej, ptr, allowed);
    e.id = o.str("id");
    if (e.id.empty() || e.id.find_first_of("/\\") != std::string::npos || e.id == "." || e.id == "..") {
      doc.fail(o.child("id"), "must be a nonempty name without path separators");
    }
    if (!ids.insert(e.id).second) doc.fail(o.child("id"), "duplicate experiment id '" + e.id + "'");
    const auto episodes = o.integer("episodes", 1);
    if (episodes < 1) doc.fail(o.child("episodes"), "must be at least 1");
    e.episodes = static_cast<int>(episodes);
    e.base_seed = o.uinteger("base_seed", 0);
    e.backend = o.has("backend") ? parse_backend(o, "backend") : default_backend;

    if (e.type == ExperimentType::Motion) {
      const auto kind = o.located("task", [&] {
        try {
          return sim::parse_task_kind(o.str("task"));
        } catch (const Error& err) {
          throw ConfigError(err.what());
        }
      });
      e.motion.task = sim::default_task(kind);
      if (o.has("schedule")) {
        const auto s = o.object("schedule", {"initial_step", "decay", "step_limit"});
        auto& sched = e.motion.task.schedule;
        sched.initial_step = s.num("initial_step", sched.initial_step);
        sched.decay = s.num("decay", sched.decay);
        sched.step_limit = static_cast<int>(s.integer("step_limit", sched.step_limit));
      }
      e.motion.task.success_tolerance = o.num("success_tolerance", e.motion.task.success_tolerance);
      if (o.has("coverage_mode")) {
        const auto mode = o.str("coverage_mode");
        if (mode == "intersection_over_goal") {
          e.motion.task.coverage_mode = sim::CoverageMode::IntersectionOverGoal;
        } else if (mode == "intersection_over_union") {
          e.motion.task.coverage_mode = sim::CoverageMode::IntersectionOverUnion;
        } else {
          doc.fail(o.child("coverage_mode"), "unknown coverage mode '" + mode + "'");
        }
      }
      o.located("task", [&] { e.motion.task.validate(); return 0; });
      if (o.has("variants")) {
        const auto names = o.strings("variants");
        if (names.empty()) doc.fail(o.child("variants"), "must list at least one variant");
        for (std::size_t v = 0; v < names.size(); ++v) e.motion.variants.push_back(variant_at(o, "variants", v, names[v]));
      } else {
        e.motion.variants = {prompt::PromptVariant::Full};
      }
    } else {
      if (cfg.structures.empty()) doc.fail(o.child("type"), "task experiments need a 'structures' file");
      if (o.has("structure_sets")) {
        e.task.structure_sets = o.strings("structure_sets");
        if (e.task.structure_sets.empty()) doc.fail(o.child("structure_sets"), "must list at least one set");
        for (std::size_t s = 0; s < e.task.structure_sets.size(); ++s) {
          if (!cfg.structures.count(e.task.structure_sets[s])) {
            doc.fail(o.child("structure_sets") + "/" + std::to_string(s),
                     "undefined structure set '" + e.task.structure_sets[s] + "'");
          }
        }
      } else {
        for (const auto& [name, _] : cfg.structures) e.task.structure_sets.push_back(name);
      }
      if (o.has("failures")) {
        const auto names = o.strings("failures");
        for (std::size_t f = 0; f < names.size(); ++f) {
          try {
            e.task.failures.push_back(task::parse_failure(names[f]));
          } catch (const Error& err) {
            doc.fail(o.child("failures") + "/" + std::to_string(f), err.what());
          }
        }
      } else {
        e.task.failures.assign(task::kAllFailures.begin(), task::kAllFailures.end());
      }
      e.task.controls = o.boolean("controls", false);
      if (e.task.failures.empty() && !e.task.controls) {
        doc.fail(o.child("failures"), "no failures listed and controls disabled");
      }
      const auto mode = o.str("detection_mode", "decomposed");
      if (mode == "decomposed") {
        e.task.detection_mode = prompt::DetectionMode::Decomposed;
      } else if (mode == "combined") {
        e.task.detection_mode = prompt::DetectionMode::Combined;
      } else {
        doc.fail(o.child("detection_mode"), "unknown detection mode '" + mode + "' (expected decomposed or combined)");
      }
    }
    cfg.experiments.push_back(std::move(e));
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) { return parse_config(read_file(path), path); }

void apply_overrides(RunConfig& cfg, const Overrides& o) {
  if (o.out) cfg.output_dir = *o.out;
  for (auto& e : cfg.experiments) {
    if (o.seed) e.base_seed = *o.seed;
    if (!o.backend) continue;
    if (*o.backend == "oracle") {
      if (!std::holds_alternative<vlm::OracleConfig>(e.backend)) e.backend = vlm::OracleConfig{};
    } else if (*o.backend == "live") {
      if (std::holds_alternative<vlm::LiveConfig>(e.backend)) continue;
      if (!cfg.live) throw ConfigError("--backend live needs a 'live' section in the config");
      e.backend = *cfg.live;
    } else {
      throw ConfigError("unknown backend '" + *o.backend + "' (expected oracle or live)");
    }
  }
}

}  // namespace vfr::bench
