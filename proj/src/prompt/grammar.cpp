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

#include "vfr/prompt/grammar.hpp"

#include <algorithm>
#include <cctype>
#include <optional>

#include "vfr/error.hpp"

namespace vfr::prompt {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

/// Trims whitespace and markdown emphasis around a line.
std::string_view strip_decoration(std::string_view s) {
  s = trim(s);
  while (!s.empty() && (s.front() == '*' || s.front() == '`' || s.front() == '_')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == '*' || s.back() == '`' || s.back() == '_' || s.back() == '.')) s.remove_suffix(1);
  return trim(s);
}

bool starts_with_ci(std::string_view s, std::string_view prefix) {
  if (s.size() < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (std::toupper(static_cast<unsigned char>(s[i])) != std::toupper(static_cast<unsigned char>(prefix[i]))) {
      return false;
    }
  }
  return true;
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = text.find('\n', start);
    auto line = text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    out.push_back(line);
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return out;
}

/// Payload of the last line starting with `marker`, and that line's index.
std::optional<std::pair<std::string, std::size_t>> last_marker(const std::vector<std::string_view>& lines,
                                                               std::string_view marker) {
  std::optional<std::pair<std::string, std::size_t>> found;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto line = strip_decoration(lines[i]);
    if (starts_with_ci(line, marker)) {
      found = std::make_pair(std::string(strip_decoration(line.substr(marker.size()))), i);
    }
  }
  return found;
}

std::string upper(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

std::string label_key(std::string_view s) {
  std::string out;
  for (char c : trim(s)) {
    if (c == ' ' || c == '-') {
      out += '_';
    } else {
      out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
  }
  return out;
}

std::string excerpt(std::string_view s) {
  constexpr std::size_t kMax = 80;
  return s.size() <= kMax ? std::string(s) : std::string(s.substr(0, kMax)) + "...";
}

}  // namespace

std::string format_action(sim::DiscreteAction a) { return std::string(kActionMarker) + " " + std::string(sim::token(a)); }

std::string format_yes_no(bool yes) { return std::string(kAnswerMarker) + (yes ? " YES" : " NO"); }

std::string format_reason(std::string_view label) { return std::string(kReasonMarker) + " " + std::string(label); }

std::string format_plan(const task::RecoveryPlan& plan) {
  std::string out(kPlanMarker);
  for (const auto& s : plan) out += "\n" + task::describe(s);
  return out;
}

sim::DiscreteAction parse_action(std::string_view text, std::span<const sim::DiscreteAction> grammar) {
  if (grammar.empty()) throw ConfigError("empty action grammar");
  const auto found = last_marker(split_lines(text), kActionMarker);
  if (!found) throw ParseError("no " + std::string(kActionMarker) + " line in response: " + excerpt(text));
  const auto a = sim::action_from_token(found->first);
  if (!a) throw ProtocolError("unknown action token '" + found->first + "'");
  if (std::find(grammar.begin(), grammar.end(), *a) == grammar.end()) {
    throw ProtocolError("action " + std::string(sim::token(*a)) + " is outside the query grammar");
  }
  return *a;
}

bool parse_yes_no(std::string_view text) {
  const auto found = last_marker(split_lines(text), kAnswerMarker);
  if (!found) throw ParseError("no " + std::string(kAnswerMarker) + " line in response: " + excerpt(text));
  const auto v = upper(found->first);
  if (v == "YES") return true;
  if (v == "NO") return false;
  throw ProtocolError("answer '" + found->first + "' is neither YES nor NO");
}

std::string parse_reason(std::string_view text, std::span<const std::string> labels) {
  const auto found = last_marker(split_lines(text), kReasonMarker);
  if (!found) throw ParseError("no " + std::string(kReasonMarker) + " line in response: " + excerpt(text));
  const auto key = label_key(found->first);
  for (const auto& l : labels) {
    if (label_key(l) == key) return l;
  }
  throw ProtocolError("reason label '" + found->first + "' is not in the label set");
}

std::string normalize_line(std::string_view line) {
  auto s = trim(line);
  static constexpr std::string_view kBullet = "\xe2\x80\xa2";
  if (s.substr(0, kBullet.size()) == kBullet) {
    s.remove_prefix(kBullet.size());
  } else if (!s.empty() && (s.front() == '-' || s.front() == '*' || s.front() == '+')) {
    s.remove_prefix(1);
  } else {
    std::size_t d = 0;
    while (d < s.size() && std::isdigit(static_cast<unsigned char>(s[d]))) ++d;
    if (d > 0 && d < s.size() && (s[d] == '.' || s[d] == ')' || s[d] == ':')) s.remove_prefix(d + 1);
  }
  s = strip_decoration(s);
  std::string out;
  bool space = false;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      space = true;
      continue;
    }
    if (space && !out.empty()) out += ' ';
    space = false;
    out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

task::RecoveryPlan parse_plan(std::string_view text, std::span<const std::string> skill_catalog) {
  if (skill_catalog.empty()) throw ConfigError("skill catalog is empty");
  std::vector<std::pair<std::string, task::SkillKind>> names;
  for (const auto& entry : skill_catalog) {
    const auto key = normalize_line(entry);
    bool known = false;
    for (auto k : task::kAllSkillKinds) {
      if (normalize_line(task::skill_name(k)) == key) {
        names.emplace_back(key, k);
        known = true;
      }
    }
    if (!known) throw ConfigError("catalog entry '" + entry + "' is not a known skill");
  }

  const auto lines = split_lines(text);
  const auto found = last_marker(lines, kPlanMarker);
  if (!found) throw ParseError("no " + std::string(kPlanMarker) + " marker in response: " + excerpt(text));

  std::vector<std::string> items;
  if (!found->first.empty()) items.push_back(found->first);
  for (std::size_t i = found->second + 1; i < lines.size(); ++i) items.emplace_back(lines[i]);

  task::RecoveryPlan plan;
  for (const auto& raw : items) {
    const auto line = normalize_line(raw);
    if (line.empty()) continue;
    std::optional<task::Skill> skill;
    for (const auto& [key, kind] : names) {
      if (line == key) {
        skill = task::Skill::of(kind);
        break;
      }
      if (kind == task::SkillKind::Pick && line.rfind(key + " ", 0) == 0) {
        const auto color = line.substr(key.size() + 1);
        for (auto c : task::kAllColors) {
          if (task::to_string(c) == color) skill = task::Skill::pick(c);
        }
        if (skill) break;
      }
    }
    if (!skill) throw ParseError("plan line is not a catalog skill: '" + std::string(trim(raw)) + "'");
    if (plan.size() == task::kMaxPlanLength) {
      throw ParseError("plan longer than " + std::to_string(task::kMaxPlanLength) + " skills");
    }
    plan.push_back(*skill);
  }
  if (plan.empty()) throw ParseError("plan after " + std::string(kPlanMarker) + " is empty");
  return plan;
}

}  // namespace vfr::prompt
