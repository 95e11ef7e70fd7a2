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

#include <gtest/gtest.h>

#include <algorithm>

#include "vfr/bench/config.hpp"
#include "vfr/control/transcript.hpp"
#include "vfr/error.hpp"
#include "vfr/raster/image.hpp"
#include "vfr/rng.hpp"
#include "vfr/task/assembly.hpp"

using namespace vfr;
using namespace vfr::task;

namespace {

std::map<std::string, std::vector<RefBlock>> structures() {
  return bench::load_structures(std::string(VFR_SOURCE_DIR) + "/configs/structures.json");
}

const std::vector<RefBlock> kTower{{BlockColor::Green, {2, 0}},
                                   {BlockColor::Red, {2, 1}},
                                   {BlockColor::Blue, {2, 2}},
                                   {BlockColor::Yellow, {2, 3}}};

struct FailureCase {
  AssemblyState post;
  GoalSpec goal;
  RecoveryPlan plan;
};

FailureCase make_case(const std::vector<RefBlock>& ref, std::size_t cursor, FailureType f, std::uint64_t seed) {
  const auto pre = make_phase_state(ref, cursor, phase_of(f));
  Rng rng(seed, Stream::Failure);
  auto post = inject_failure(pre, f, rng);
  auto goal = subtask_goal(pre, phase_of(f));
  auto plan = template_planner(post, f, goal);
  return {std::move(post), std::move(goal), std::move(plan)};
}

bool same_totals(const AssemblyState& a, const AssemblyState& b) { return color_totals(a) == color_totals(b); }

}  // namespace

TEST(Structures, ConfiguredSetsAreValid) {
  const auto sets = structures();
  ASSERT_EQ(sets.size(), 3u);
  for (const auto& [name, ref] : sets) {
    EXPECT_EQ(ref.size(), 4u) << name;
    for (auto phase : {Phase::Pick, Phase::Place}) {
      for (std::size_t c = 0; c < ref.size(); ++c) EXPECT_FALSE(check_state(make_phase_state(ref, c, phase)));
    }
  }
}

TEST(Canonical, ThirtyTwoTowerPlansAreValid) {
  int valid = 0;
  for (auto f : kAllFailures) {
    for (std::size_t cursor = 0; cursor < kTower.size(); ++cursor) {
      const auto c = make_case(kTower, cursor, f, cursor);
      const auto v = validate_plan(c.post, c.plan, c.goal);
      EXPECT_TRUE(v.valid()) << failure_label(f) << " cursor " << cursor << ": " << v.describe();
      valid += v.valid();
    }
  }
  EXPECT_EQ(valid, 32);
}

TEST(Canonical, PlansValidAcrossStructuresAndFailureSeeds) {
  for (const auto& [name, ref] : structures()) {
    for (auto f : kAllFailures) {
      for (std::size_t cursor = 0; cursor < ref.size(); ++cursor) {
        for (std::uint64_t seed = 0; seed < 8; ++seed) {
          const auto c = make_case(ref, cursor, f, seed);
          EXPECT_TRUE(validate_plan(c.post, c.plan, c.goal).valid()) << name << " " << failure_label(f);
          EXPECT_LE(c.plan.size(), kMaxPlanLength);
        }
      }
    }
  }
}

TEST(Canonical, EverySingleSkillDeletionBreaksThePlan) {
  for (auto f : kAllFailures) {
    for (std::size_t cursor = 0; cursor < kTower.size(); ++cursor) {
      const auto c = make_case(kTower, cursor, f, 1);
      for (std::size_t i = 0; i < c.plan.size(); ++i) {
        auto mutated = c.plan;
        mutated.erase(mutated.begin() + static_cast<std::ptrdiff_t>(i));
        EXPECT_FALSE(validate_plan(c.post, mutated, c.goal).valid())
            << failure_label(f) << " cursor " << cursor << " without step " << i + 1;
      }
    }
  }
}

TEST(Canonical, AppendingASkillBreaksThePlan) {
  for (auto f : kAllFailures) {
    const auto c = make_case(kTower, 1, f, 2);
    for (auto kind : {SkillKind::Pick, SkillKind::Place}) {
      auto mutated = c.plan;
      mutated.push_back(Skill::of(kind));
      EXPECT_FALSE(validate_plan(c.post, mutated, c.goal).valid()) << failure_label(f) << " + " << skill_name(kind);
    }
  }
}

TEST(Skills, SweepLeavesACorrectStructureUntouched) {
  auto s = make_phase_state(kTower, 3, Phase::Pick);
  s.gripper_location = Location::PlaceArea;
  const auto r = apply_skill(s, Skill::of(SkillKind::Sweep));
  ASSERT_TRUE(std::holds_alternative<AssemblyState>(r));
  EXPECT_EQ(std::get<AssemblyState>(r), s);
}

TEST(Verdict, PlacingAfterTheRepickIsOutOfScope) {
  const auto c = make_case(kTower, 1, FailureType::FailToPick, 0);
  auto plan = c.plan;
  plan.push_back(Skill::of(SkillKind::MoveToPlace));
  plan.push_back(Skill::of(SkillKind::Place));
  const auto v = validate_plan(c.post, plan, c.goal);
  EXPECT_EQ(v.kind, VerdictKind::OutOfScope) << v.describe();
}

TEST(Verdict, PlaceWithEmptyGripperFailsAtStepOne) {
  const auto c = make_case(kTower, 2, FailureType::PlaceWrongPosition, 0);
  ASSERT_TRUE(c.post.holding.empty());
  const auto v = validate_plan(c.post, {Skill::of(SkillKind::Place)}, c.goal);
  EXPECT_EQ(v.kind, VerdictKind::PreconditionViolation);
  EXPECT_EQ(v.step, 1u);
  ASSERT_TRUE(v.skill);
  EXPECT_EQ(v.skill->kind, SkillKind::Place);
  EXPECT_NE(v.describe().find("at step 1"), std::string::npos);
}

TEST(Verdict, EmptyPlanIsGoalMismatchWithDetail) {
  const auto c = make_case(kTower, 0, FailureType::PickWrongColor, 0);
  const auto v = validate_plan(c.post, {}, c.goal);
  EXPECT_EQ(v.kind, VerdictKind::GoalMismatch);
  EXPECT_NE(v.detail.find("holding expected"), std::string::npos) << v.detail;
}

TEST(Verdict, PickingTheWrongColorExplicitlyIsGoalMismatch) {
  const auto c = make_case(kTower, 0, FailureType::FailToPick, 0);
  const auto v = validate_plan(c.post, {Skill::pick(BlockColor::White)}, c.goal);
  EXPECT_EQ(v.kind, VerdictKind::GoalMismatch);
  EXPECT_TRUE(validate_plan(c.post, {Skill::pick(BlockColor::Green)}, c.goal).valid());
}

TEST(Inject, PostconditionsPerFailure) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    for (auto f : kAllFailures) {
      const std::size_t cursor = seed % kTower.size();
      const auto pre = make_phase_state(kTower, cursor, phase_of(f));
      Rng rng(seed, Stream::Failure);
      const auto post = inject_failure(pre, f, rng);
      const auto t = kTower[cursor];
      EXPECT_FALSE(check_state(post)) << failure_label(f);
      EXPECT_TRUE(same_totals(pre, post)) << failure_label(f);
      const auto goal = subtask_goal(pre, phase_of(f));
      EXPECT_FALSE(meets_goal(post, goal)) << failure_label(f);
      const auto crit = detection_criteria(post, goal);
      EXPECT_FALSE(crit[0] && crit[1] && crit[2]) << failure_label(f);
      switch (f) {
        case FailureType::FailToPick: EXPECT_TRUE(post.holding.empty()); break;
        case FailureType::PickMultiple: EXPECT_EQ(post.holding, (std::vector{t.color, t.color})); break;
        case FailureType::PickWrongColor:
          ASSERT_EQ(post.holding.size(), 1u);
          EXPECT_NE(post.holding[0], t.color);
          break;
        case FailureType::PickMultipleWithWrong:
          ASSERT_EQ(post.holding.size(), 2u);
          EXPECT_EQ(post.holding[0], t.color);
          EXPECT_NE(post.holding[1], t.color);
          break;
        case FailureType::FailToPlace: EXPECT_EQ(post, pre); break;
        case FailureType::PlaceWrongColor:
          EXPECT_TRUE(post.holding.empty());
          EXPECT_EQ(post.built.back().pos, t.pos);
          EXPECT_NE(post.built.back().color, t.color);
          break;
        case FailureType::PlaceWrongPosition: {
          EXPECT_TRUE(post.holding.empty());
          const auto p = post.built.back().pos;
          EXPECT_TRUE(std::none_of(kTower.begin(), kTower.end(), [&](const RefBlock& r) { return r.pos == p; }));
          EXPECT_EQ(post.cursor, pre.cursor);
          break;
        }
        case FailureType::StructureCollapse:
          EXPECT_EQ(post.built.size(), cursor + 1);
          for (const auto& b : post.built) EXPECT_FALSE(b.intact);
          break;
      }
    }
  }
}

TEST(Inject, NominalOutcomeMeetsTheGoalAndPassesDetection) {
  for (auto phase : {Phase::Pick, Phase::Place}) {
    for (std::size_t cursor = 0; cursor < kTower.size(); ++cursor) {
      const auto pre = make_phase_state(kTower, cursor, phase);
      const auto post = nominal_outcome(pre, phase);
      const auto goal = subtask_goal(pre, phase);
      EXPECT_TRUE(meets_goal(post, goal));
      const auto crit = detection_criteria(post, goal);
      EXPECT_TRUE(crit[0] && crit[1] && crit[2]);
    }
  }
}

TEST(Inject, WrongPhaseOrExhaustedSupplyIsConfigError) {
  Rng rng(0);
  EXPECT_THROW(inject_failure(make_phase_state(kTower, 0, Phase::Pick), FailureType::FailToPlace, rng), ConfigError);
  EXPECT_THROW(inject_failure(make_phase_state(kTower, 0, Phase::Place), FailureType::FailToPick, rng), ConfigError);
  const auto scarce = make_phase_state(kTower, 0, Phase::Pick, 1);
  EXPECT_THROW(inject_failure(scarce, FailureType::PickMultiple, rng), ConfigError);
}

TEST(Skills, ConservationAndValidityUnderRandomSequences) {
  Rng rng(12345);
  const auto sets = structures();
  std::vector<std::vector<RefBlock>> refs;
  for (const auto& [_, ref] : sets) refs.push_back(ref);
  int applied = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    const auto& ref = refs[rng.below(refs.size())];
    const auto f = kAllFailures[rng.below(kAllFailures.size())];
    const auto pre = make_phase_state(ref, rng.below(ref.size()), phase_of(f));
    Rng frng(rng.next(), Stream::Failure);
    auto s = inject_failure(pre, f, frng);
    const auto totals = color_totals(pre);
    const auto len = 1 + rng.below(8);
    for (std::size_t i = 0; i < len; ++i) {
      const auto kind = kAllSkillKinds[rng.below(kAllSkillKinds.size())];
      Skill skill = Skill::of(kind);
      if (kind == SkillKind::Pick && rng.bernoulli(0.3)) skill = Skill::pick(kAllColors[rng.below(kColorCount)]);
      const auto r = apply_skill(s, skill);
      if (std::holds_alternative<PreconditionViolation>(r)) continue;
      s = std::get<AssemblyState>(r);
      ++applied;
      ASSERT_FALSE(check_state(s)) << *check_state(s);
      ASSERT_EQ(color_totals(s), totals);
      ASSERT_EQ(s.reference, ref);
    }
  }
  EXPECT_GT(applied, 10000);
}

TEST(Skills, PreconditionsAreReported) {
  const auto pick = make_phase_state(kTower, 0, Phase::Pick);
  EXPECT_TRUE(std::holds_alternative<PreconditionViolation>(apply_skill(pick, Skill::of(SkillKind::Place))));
  EXPECT_TRUE(std::holds_alternative<PreconditionViolation>(apply_skill(pick, Skill::of(SkillKind::Sweep))));
  const auto place = make_phase_state(kTower, 1, Phase::Place);
  EXPECT_TRUE(std::holds_alternative<PreconditionViolation>(apply_skill(place, Skill::pick())));
  EXPECT_FALSE(std::holds_alternative<PreconditionViolation>(apply_skill(place, Skill::of(SkillKind::Place))));
}

TEST(Render, AddingABlockChangesOnlyItsCell) {
  const auto base = make_phase_state(kTower, 1, Phase::Pick);
  auto more = base;
  more.built.push_back({BlockColor::White, {5, 0}, true});
  const auto a = render_assembly(base, false);
  const auto b = render_assembly(more, false);
  const auto cell = cell_rect({5, 0});
  std::size_t changed = 0;
  for (int y = 0; y < a.height(); ++y) {
    for (int x = 0; x < a.width(); ++x) {
      if (a.at(x, y) == b.at(x, y)) continue;
      ++changed;
      EXPECT_TRUE(x >= cell.x0 && x < cell.x1 && y >= cell.y0 && y < cell.y1) << x << "," << y;
    }
  }
  EXPECT_GT(changed, 0u);
}

TEST(Render, ReferenceShowsTheWholeStructureOnly) {
  const auto s0 = make_phase_state(kTower, 0, Phase::Pick);
  const auto s3 = make_phase_state(kTower, 3, Phase::Place);
  EXPECT_EQ(render_assembly(s0, true), render_assembly(s3, true));
  EXPECT_NE(render_assembly(s0, false), render_assembly(s3, false));
  for (const auto& r : kTower) {
    const auto cell = cell_rect(r.pos);
    EXPECT_EQ(render_assembly(s0, true).at(cell.x0 + 16, cell.y0 + 16), block_rgba(r.color));
  }
}

TEST(Json, AssemblyStateRoundTrip) {
  for (auto f : kAllFailures) {
    const auto c = make_case(kTower, 2, f, 3);
    EXPECT_EQ(control::assembly_from_json(control::to_json(c.post)), c.post) << failure_label(f);
  }
}

TEST(Names, LabelsAndCatalogRoundTrip) {
  for (auto f : kAllFailures) EXPECT_EQ(parse_failure(failure_label(f)), f);
  EXPECT_THROW(parse_failure("teleport"), ConfigError);
  for (auto c : kAllColors) EXPECT_EQ(parse_block_color(to_string(c)), c);
  EXPECT_EQ(skill_catalog().size(), kAllSkillKinds.size());
  EXPECT_EQ(describe(Skill::pick(BlockColor::Red)), "Pick red");
}
