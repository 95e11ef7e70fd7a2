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

#include "vfr/task/assembly.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "vfr/error.hpp"

namespace vfr::task {

namespace {

std::size_t idx(BlockColor c) { return static_cast<std::size_t>(c); }

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& ch : out) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return out;
}

std::string pos_str(GridPos p) { return "(" + std::to_string(p.col) + "," + std::to_string(p.row) + ")"; }

std::string built_str(const std::vector<BuiltBlock>& built) {
  if (built.empty()) return "{}";
  std::string out = "{";
  for (std::size_t i = 0; i < built.size(); ++i) {
    if (i) out += " ";
    out += std::string(to_string(built[i].color)) + "@" + pos_str(built[i].pos);
    if (!built[i].intact) out += "*";
  }
  return out + "}";
}

std::string colors_str(std::vector<BlockColor> colors) {
  std::string out = "[";
  for (std::size_t i = 0; i < colors.size(); ++i) {
    if (i) out += ",";
    out += to_string(colors[i]);
  }
  return out + "]";
}

const BuiltBlock* block_at(const std::vector<BuiltBlock>& built, GridPos p) {
  for (const auto& b : built) {
    if (b.pos == p) return &b;
  }
  return nullptr;
}

/// Length of the longest reference prefix that is present, intact and correctly
/// colored in `built` (other blocks may also be present).
std::size_t correct_prefix(const AssemblyState& s) {
  std::size_t k = 0;
  while (k < s.reference.size()) {
    const auto* b = block_at(s.built, s.reference[k].pos);
    if (!b || !b->intact || b->color != s.reference[k].color) break;
    ++k;
  }
  return k;
}

/// True when `built` is exactly reference[0, n), all intact.
bool is_exact_prefix(const AssemblyState& s, std::size_t n) {
  return s.built.size() == n && n <= s.reference.size() && correct_prefix(s) >= n;
}

bool same_multiset(std::vector<BlockColor> a, std::vector<BlockColor> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  return a == b;
}

PreconditionViolation violation(const Skill& s, std::string why) { return {s, std::move(why)}; }

}  // namespace

std::string_view to_string(BlockColor c) noexcept {
  switch (c) {
    case BlockColor::Green: return "green";
    case BlockColor::Red: return "red";
    case BlockColor::Blue: return "blue";
    case BlockColor::Yellow: return "yellow";
    case BlockColor::White: return "white";
  }
  return "?";
}

BlockColor parse_block_color(std::string_view name) {
  const auto n = lower(name);
  for (auto c : kAllColors) {
    if (to_string(c) == n) return c;
  }
  throw ConfigError("unknown block color '" + std::string(name) + "'");
}

raster::Rgba block_rgba(BlockColor c) noexcept {
  switch (c) {
    case BlockColor::Green: return {0, 170, 60};
    case BlockColor::Red: return {200, 20, 20};
    case BlockColor::Blue: return {0, 80, 220};
    case BlockColor::Yellow: return raster::palette::kYellow;
    case BlockColor::White: return raster::palette::kLegoWhite;
  }
  return raster::palette::kGray;
}

std::string_view to_string(Location l) noexcept {
  switch (l) {
    case Location::PickupArea: return "pickup";
    case Location::PlaceArea: return "place";
    case Location::DiscardArea: return "discard";
  }
  return "?";
}

std::string_view to_string(Phase p) noexcept { return p == Phase::Pick ? "pick" : "place"; }

ColorCounts color_totals(const AssemblyState& s) {
  ColorCounts t{};
  for (std::size_t i = 0; i < kColorCount; ++i) t[i] = s.supply[i] + s.discard_pile[i];
  for (auto c : s.holding) ++t[idx(c)];
  for (const auto& b : s.built) ++t[idx(b.color)];
  return t;
}

std::optional<std::string> check_state(const AssemblyState& s) {
  if (s.cursor > s.reference.size()) return "cursor beyond reference";
  if (s.holding.size() > kHoldingCapacity) return "gripper over capacity";
  for (std::size_t i = 0; i < kColorCount; ++i) {
    if (s.supply[i] < 0) return "negative supply";
    if (s.discard_pile[i] < 0) return "negative discard count";
  }
  for (std::size_t i = 0; i < s.built.size(); ++i) {
    const auto p = s.built[i].pos;
    if (p.col < 0 || p.col >= kGridColumns || p.row < 0) return "built block off the baseplate " + pos_str(p);
    for (std::size_t j = i + 1; j < s.built.size(); ++j) {
      if (s.built[j].pos == p) return "two blocks share cell " + pos_str(p);
    }
  }
  for (std::size_t i = 0; i < s.reference.size(); ++i) {
    for (std::size_t j = i + 1; j < s.reference.size(); ++j) {
      if (s.reference[j].pos == s.reference[i].pos) return "reference repeats cell " + pos_str(s.reference[i].pos);
    }
  }
  return std::nullopt;
}

std::string_view skill_name(SkillKind k) noexcept {
  switch (k) {
    case SkillKind::Pick: return "Pick";
    case SkillKind::Place: return "Place";
    case SkillKind::Sweep: return "Sweep away block";
    case SkillKind::MoveToPickup: return "Move to pickup location";
    case SkillKind::MoveToPlace: return "Move to place location";
    case SkillKind::MoveToDiscard: return "Move to discard location";
  }
  return "?";
}

std::string describe(const Skill& s) {
  std::string out(skill_name(s.kind));
  if (s.kind == SkillKind::Pick && s.color) out += " " + std::string(to_string(*s.color));
  return out;
}

std::vector<std::string> skill_catalog() {
  std::vector<std::string> out;
  for (auto k : kAllSkillKinds) out.emplace_back(skill_name(k));
  return out;
}

std::string describe(const RecoveryPlan& plan) {
  std::string out;
  for (std::size_t i = 0; i < plan.size(); ++i) {
    if (i) out += " -> ";
    out += describe(plan[i]);
  }
  return out.empty() ? "(empty)" : out;
}

std::string_view failure_label(FailureType f) noexcept {
  switch (f) {
    case FailureType::FailToPick: return "fail_to_pick";
    case FailureType::PickMultiple: return "pick_multiple";
    case FailureType::PickWrongColor: return "pick_wrong_color";
    case FailureType::PickMultipleWithWrong: return "pick_multiple_with_wrong";
    case FailureType::FailToPlace: return "fail_to_place";
    case FailureType::PlaceWrongColor: return "place_wrong_color";
    case FailureType::PlaceWrongPosition: return "place_wrong_position";
    case FailureType::StructureCollapse: return "structure_collapse";
  }
  return "?";
}

std::string_view failure_title(FailureType f) noexcept {
  switch (f) {
    case FailureType::FailToPick: return "Pick failed";
    case FailureType::PickMultiple: return "Picked several blocks";
    case FailureType::PickWrongColor: return "Picked wrong color";
    case FailureType::PickMultipleWithWrong: return "Picked several incl. wrong color";
    case FailureType::FailToPlace: return "Place failed";
    case FailureType::PlaceWrongColor: return "Placed wrong color";
    case FailureType::PlaceWrongPosition: return "Placed at wrong cell";
    case FailureType::StructureCollapse: return "Structure collapsed";
  }
  return "?";
}

FailureType parse_failure(std::string_view label) {
  const auto l = lower(label);
  for (auto f : kAllFailures) {
    if (failure_label(f) == l) return f;
  }
  throw ConfigError("unknown failure type '" + std::string(label) + "'");
}

Phase phase_of(FailureType f) noexcept {
  switch (f) {
    case FailureType::FailToPick:
    case FailureType::PickMultiple:
    case FailureType::PickWrongColor:
    case FailureType::PickMultipleWithWrong: return Phase::Pick;
    default: return Phase::Place;
  }
}

SkillResult apply_skill(const AssemblyState& state, const Skill& skill) {
  AssemblyState s = state;
  switch (skill.kind) {
    case SkillKind::MoveToPickup: s.gripper_location = Location::PickupArea; return s;
    case SkillKind::MoveToPlace: s.gripper_location = Location::PlaceArea; return s;
    case SkillKind::MoveToDiscard: s.gripper_location = Location::DiscardArea; return s;

    case SkillKind::Pick: {
      if (s.gripper_location != Location::PickupArea) return violation(skill, "gripper is not at the pickup area");
      if (!s.holding.empty()) return violation(skill, "gripper already holds a block");
      BlockColor c;
      if (skill.color) {
        c = *skill.color;
      } else {
        if (s.cursor >= s.reference.size()) return violation(skill, "no reference block left to pick");
        c = s.reference[s.cursor].color;
      }
      if (s.supply[idx(c)] <= 0) return violation(skill, "no " + std::string(to_string(c)) + " block in supply");
      --s.supply[idx(c)];
      s.holding.push_back(c);
      return s;
    }

    case SkillKind::Place: {
      if (s.holding.empty()) return violation(skill, "gripper is empty");
      if (s.gripper_location == Location::DiscardArea) {
        for (auto c : s.holding) ++s.discard_pile[idx(c)];
        s.holding.clear();
        return s;
      }
      if (s.gripper_location != Location::PlaceArea) return violation(skill, "place needs the place or discard area");
      if (s.holding.size() != 1) return violation(skill, "more than one block held at the place area");
      if (s.cursor >= s.reference.size()) return violation(skill, "structure already complete");
      const auto pos = s.reference[s.cursor].pos;
      if (block_at(s.built, pos)) return violation(skill, "target cell " + pos_str(pos) + " is occupied");
      s.built.push_back({s.holding.front(), pos, true});
      s.holding.clear();
      ++s.cursor;
      return s;
    }

    case SkillKind::Sweep: {
      if (s.gripper_location != Location::PlaceArea) return violation(skill, "gripper is not at the place area");
      if (!s.holding.empty()) return violation(skill, "gripper must be empty to sweep");
      const std::size_t keep = correct_prefix(s);
      std::vector<BuiltBlock> kept;
      for (const auto& b : s.built) {
        bool in_prefix = false;
        for (std::size_t i = 0; i < keep; ++i) in_prefix = in_prefix || b.pos == s.reference[i].pos;
        if (in_prefix) {
          kept.push_back(b);
        } else {
          ++s.discard_pile[idx(b.color)];
        }
      }
      s.built = std::move(kept);
      s.cursor = keep;
      return s;
    }
  }
  throw InternalError("unhandled skill kind");
}

AssemblyState make_phase_state(std::vector<RefBlock> reference, std::size_t cursor, Phase phase,
                               int supply_per_color) {
  if (cursor >= reference.size()) throw ConfigError("cursor must point at a reference block");
  AssemblyState s;
  s.reference = std::move(reference);
  s.supply.fill(supply_per_color);
  for (std::size_t i = 0; i < cursor; ++i) {
    s.built.push_back({s.reference[i].color, s.reference[i].pos, true});
    --s.supply[idx(s.reference[i].color)];
  }
  s.cursor = cursor;
  if (phase == Phase::Pick) {
    s.gripper_location = Location::PickupArea;
  } else {
    s.gripper_location = Location::PlaceArea;
    const auto c = s.reference[cursor].color;
    --s.supply[idx(c)];
    s.holding.push_back(c);
  }
  if (auto bad = check_state(s)) throw ConfigError("invalid phase state: " + *bad);
  for (auto n : s.supply) {
    if (n < 0) throw ConfigError("supply too small for the reference structure");
  }
  return s;
}

AssemblyState nominal_outcome(const AssemblyState& state, Phase phase) {
  auto r = apply_skill(state, Skill::of(phase == Phase::Pick ? SkillKind::Pick : SkillKind::Place));
  if (auto* v = std::get_if<PreconditionViolation>(&r)) {
    throw ConfigError("nominal " + std::string(to_string(phase)) + " impossible: " + v->condition);
  }
  return std::get<AssemblyState>(std::move(r));
}

namespace {

BlockColor pick_other_color(const AssemblyState& s, BlockColor not_this, Rng& rng) {
  std::vector<BlockColor> options;
  for (auto c : kAllColors) {
    if (c != not_this && s.supply[idx(c)] > 0) options.push_back(c);
  }
  if (options.empty()) throw ConfigError("no other color left in supply");
  return options[rng.below(options.size())];
}

GridPos pick_wrong_cell(const AssemblyState& s, Rng& rng) {
  std::vector<GridPos> options;
  for (int col = 0; col < kGridColumns; ++col) {
    int height = 0;
    while (block_at(s.built, {col, height})) ++height;
    const GridPos p{col, height};
    const bool in_reference =
        std::any_of(s.reference.begin(), s.reference.end(), [&](const RefBlock& r) { return r.pos == p; });
    if (!in_reference) options.push_back(p);
  }
  if (options.empty()) throw ConfigError("no free non-reference cell");
  return options[rng.below(options.size())];
}

}  // namespace

AssemblyState inject_failure(const AssemblyState& state, FailureType failure, Rng& rng) {
  if (state.cursor >= state.reference.size()) throw ConfigError("nothing left to assemble");
  const BlockColor t = state.reference[state.cursor].color;
  AssemblyState s = state;
  const auto need_supply = [&](BlockColor c, int n) {
    if (s.supply[idx(c)] < n) throw ConfigError("supply too small to inject " + std::string(failure_label(failure)));
  };

  if (phase_of(failure) == Phase::Pick) {
    if (s.gripper_location != Location::PickupArea || !s.holding.empty()) {
      throw ConfigError("pick failures need an empty gripper at the pickup area");
    }
    switch (failure) {
      case FailureType::FailToPick: break;
      case FailureType::PickMultiple:
        need_supply(t, 2);
        s.supply[idx(t)] -= 2;
        s.holding = {t, t};
        break;
      case FailureType::PickWrongColor: {
        const auto w = pick_other_color(s, t, rng);
        --s.supply[idx(w)];
        s.holding = {w};
        break;
      }
      case FailureType::PickMultipleWithWrong: {
        need_supply(t, 1);
        --s.supply[idx(t)];
        const auto w = pick_other_color(s, t, rng);
        --s.supply[idx(w)];
        s.holding = {t, w};
        break;
      }
      default: throw InternalError("unreachable pick failure");
    }
    return s;
  }

  if (s.gripper_location != Location::PlaceArea || s.holding != std::vector<BlockColor>{t}) {
    throw ConfigError("place failures need the next block held at the place area");
  }
  const auto target = s.reference[s.cursor].pos;
  switch (failure) {
    case FailureType::FailToPlace: break;
    case FailureType::PlaceWrongColor: {
      ++s.supply[idx(t)];
      s.holding.clear();
      const auto w = pick_other_color(s, t, rng);
      --s.supply[idx(w)];
      s.built.push_back({w, target, true});
      ++s.cursor;
      break;
    }
    case FailureType::PlaceWrongPosition:
      s.built.push_back({t, pick_wrong_cell(s, rng), true});
      s.holding.clear();
      break;
    case FailureType::StructureCollapse:
      s.built.push_back({t, target, true});
      s.holding.clear();
      ++s.cursor;
      for (auto& b : s.built) b.intact = false;
      break;
    default: throw InternalError("unreachable place failure");
  }
  return s;
}

GoalSpec subtask_goal(const AssemblyState& state, Phase phase) {
  if (state.cursor >= state.reference.size()) throw ConfigError("no subtask left: structure complete");
  if (phase == Phase::Pick) return {Phase::Pick, state.cursor, {state.reference[state.cursor].color}};
  return {Phase::Place, state.cursor + 1, {}};
}

bool meets_goal(const AssemblyState& state, const GoalSpec& goal) {
  return state.cursor == goal.prefix_len && is_exact_prefix(state, goal.prefix_len) &&
         same_multiset(state.holding, goal.holding);
}

std::string_view to_string(VerdictKind k) noexcept {
  switch (k) {
    case VerdictKind::Valid: return "valid";
    case VerdictKind::PreconditionViolation: return "precondition_violation";
    case VerdictKind::GoalMismatch: return "goal_mismatch";
    case VerdictKind::OutOfScope: return "out_of_scope";
  }
  return "?";
}

std::string Verdict::describe() const {
  std::string out(to_string(kind));
  if (kind == VerdictKind::PreconditionViolation) {
    out += " at step " + std::to_string(step);
    if (skill) out += " (" + task::describe(*skill) + ")";
  }
  if (!detail.empty()) out += ": " + detail;
  return out;
}

Verdict validate_plan(const AssemblyState& state, const RecoveryPlan& plan, const GoalSpec& goal) {
  AssemblyState s = state;
  for (std::size_t i = 0; i < plan.size(); ++i) {
    auto r = apply_skill(s, plan[i]);
    if (auto* v = std::get_if<PreconditionViolation>(&r)) {
      return {VerdictKind::PreconditionViolation, i + 1, plan[i], v->condition};
    }
    s = std::get<AssemblyState>(std::move(r));
  }
  if (meets_goal(s, goal)) return {};

  const std::size_t prefix = correct_prefix(s);
  if (prefix > goal.prefix_len && is_exact_prefix(s, prefix)) {
    return {VerdictKind::OutOfScope, 0, std::nullopt,
            "built " + std::to_string(prefix) + " blocks, subtask needs " + std::to_string(goal.prefix_len)};
  }

  std::ostringstream diff;
  std::vector<BuiltBlock> want;
  for (std::size_t i = 0; i < goal.prefix_len && i < s.reference.size(); ++i) {
    want.push_back({s.reference[i].color, s.reference[i].pos, true});
  }
  bool first = true;
  const auto sep = [&] {
    if (!first) diff << "; ";
    first = false;
  };
  if (!is_exact_prefix(s, goal.prefix_len)) {
    sep();
    diff << "built expected " << built_str(want) << " got " << built_str(s.built);
  }
  if (!same_multiset(s.holding, goal.holding)) {
    sep();
    diff << "holding expected " << colors_str(goal.holding) << " got " << colors_str(s.holding);
  }
  if (s.cursor != goal.prefix_len) {
    sep();
    diff << "cursor expected " << goal.prefix_len << " got " << s.cursor;
  }
  return {VerdictKind::GoalMismatch, 0, std::nullopt, diff.str()};
}

RecoveryPlan template_planner(const AssemblyState& state, FailureType failure, const GoalSpec& goal) {
  RecoveryPlan plan;
  const auto go = [&](SkillKind move, Location where) {
    if (state.gripper_location != where) plan.push_back(Skill::of(move));
  };
  switch (failure) {
    case FailureType::FailToPick:
      go(SkillKind::MoveToPickup, Location::PickupArea);
      plan.push_back(Skill::pick());
      break;
    case FailureType::PickMultiple:
    case FailureType::PickWrongColor:
    case FailureType::PickMultipleWithWrong:
      plan = {Skill::of(SkillKind::MoveToDiscard), Skill::of(SkillKind::Place), Skill::of(SkillKind::MoveToPickup),
              Skill::pick()};
      break;
    case FailureType::FailToPlace:
      go(SkillKind::MoveToPlace, Location::PlaceArea);
      plan.push_back(Skill::of(SkillKind::Place));
      break;
    case FailureType::PlaceWrongColor:
    case FailureType::PlaceWrongPosition:
      go(SkillKind::MoveToPlace, Location::PlaceArea);
      plan.insert(plan.end(), {Skill::of(SkillKind::Sweep), Skill::of(SkillKind::MoveToPickup), Skill::pick(),
                               Skill::of(SkillKind::MoveToPlace), Skill::of(SkillKind::Place)});
      break;
    case FailureType::StructureCollapse:
      go(SkillKind::MoveToPlace, Location::PlaceArea);
      plan.push_back(Skill::of(SkillKind::Sweep));
      for (std::size_t i = 0; i < goal.prefix_len; ++i) {
        plan.insert(plan.end(), {Skill::of(SkillKind::MoveToPickup), Skill::pick(), Skill::of(SkillKind::MoveToPlace),
                                 Skill::of(SkillKind::Place)});
      }
      break;
  }
  return plan;
}

std::array<bool, 3> detection_criteria(const AssemblyState& observed, const GoalSpec& goal) {
  const auto& s = observed;
  if (goal.phase == Phase::Pick) {
    const bool attached = !s.holding.empty();
    const bool color_ok = attached && !goal.holding.empty() &&
                          std::all_of(s.holding.begin(), s.holding.end(),
                                      [&](BlockColor c) { return c == goal.holding.front(); });
    const bool single = s.holding.size() == 1;
    return {attached, color_ok, single};
  }
  const std::size_t before = goal.prefix_len == 0 ? 0 : goal.prefix_len - 1;
  const bool added = s.built.size() > before;
  bool color_ok = added && before < s.reference.size();
  if (color_ok) {
    const auto want = s.reference[before].color;
    for (std::size_t i = before; i < s.built.size(); ++i) color_ok = color_ok && s.built[i].color == want;
  }
  const bool structure_ok = is_exact_prefix(s, goal.prefix_len);
  return {added, color_ok, structure_ok};
}

namespace {

constexpr int kCell = 32;
constexpr int kPlateX = 176;
constexpr int kPlateTop = 448;

void draw_block(raster::RasterImage& img, const BuiltBlock& b) {
  const auto cell = cell_rect(b.pos);
  const auto color = block_rgba(b.color);
  const bool light = b.color == BlockColor::White;
  if (b.intact) {
    const raster::PixelRect r{cell.x0 + 1, cell.y0 + 1, cell.x1 - 1, cell.y1 - 1};
    raster::fill_rect(img, r, color);
    if (light) raster::outline_rect(img, r, raster::palette::kDarkGray, 1);
  } else {
    const double cx = cell.x0 + kCell / 2.0;
    const double cy = cell.y0 + kCell / 2.0;
    raster::fill_rotated_rect(img, cx, cy, 11, 11, 30, color);
    if (light) raster::outline_rotated_rect(img, cx, cy, 11, 11, 30, raster::palette::kDarkGray, 1);
  }
}

void draw_small(raster::RasterImage& img, int x, int y, int size, BlockColor c) {
  const raster::PixelRect r{x, y, x + size, y + size};
  raster::fill_rect(img, r, block_rgba(c));
  if (c == BlockColor::White) raster::outline_rect(img, r, raster::palette::kDarkGray, 1);
}

void draw_bins(raster::RasterImage& img, const ColorCounts& counts, int x0, int pitch) {
  for (std::size_t i = 0; i < kColorCount; ++i) {
    const int n = std::min(counts[i], 8);
    for (int k = 0; k < n; ++k) draw_small(img, x0 + static_cast<int>(i) * pitch, kPlateTop - 14 * (k + 1), 12, kAllColors[i]);
  }
}

int location_x(Location l) {
  switch (l) {
    case Location::PickupArea: return 80;
    case Location::PlaceArea: return kPlateX + kGridColumns * kCell / 2;
    case Location::DiscardArea: return 448;
  }
  return 0;
}

}  // namespace

raster::PixelRect cell_rect(GridPos pos) noexcept {
  const int x0 = kPlateX + pos.col * kCell;
  const int y1 = kPlateTop - pos.row * kCell;
  return {x0, y1 - kCell, x0 + kCell, y1};
}

raster::RasterImage render_assembly(const AssemblyState& state, bool as_reference) {
  using namespace raster;
  RasterImage img(512, 512, palette::kWhite);
  fill_rect(img, {kPlateX, kPlateTop, kPlateX + kGridColumns * kCell, kPlateTop + 10}, palette::kDarkGray);

  if (as_reference) {
    for (const auto& r : state.reference) draw_block(img, {r.color, r.pos, true});
    return img;
  }

  fill_rect(img, {16, kPlateTop, 144, kPlateTop + 10}, palette::kLightGray);
  fill_rect(img, {400, kPlateTop, 496, kPlateTop + 10}, palette::kLightGray);
  draw_bins(img, state.supply, 24, 24);
  draw_bins(img, state.discard_pile, 404, 18);

  for (const auto& b : state.built) draw_block(img, b);

  const int gx = location_x(state.gripper_location);
  fill_rect(img, {gx - 36, 40, gx + 36, 52}, palette::kGray);
  fill_rect(img, {gx - 36, 52, gx - 30, 100}, palette::kGray);
  fill_rect(img, {gx + 30, 52, gx + 36, 100}, palette::kGray);
  const int n = static_cast<int>(state.holding.size());
  const int start = gx - (n * 19) / 2;
  for (int i = 0; i < n; ++i) draw_small(img, start + i * 19 + 1, 72, 18, state.holding[static_cast<std::size_t>(i)]);

  if (state.cursor < state.reference.size()) {
    outline_rect(img, cell_rect(state.reference[state.cursor].pos), palette::kRed, 2);
  }
  return img;
}

}  // namespace vfr::task
