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

#include <filesystem>
#include <fstream>
#include <set>

#include "vfr/control/controller.hpp"
#include "vfr/control/transcript.hpp"
#include "vfr/error.hpp"
#include "vfr/sim/scene.hpp"
#include "vfr/vlm/backend.hpp"

using namespace vfr;
using control::Termination;
using prompt::PromptVariant;
using sim::DiscreteAction;

namespace {

vlm::ScriptedBackend repeat(const std::string& text, int n) {
  return vlm::ScriptedBackend(std::vector<vlm::ScriptedBackend::Reply>(static_cast<std::size_t>(n), {text, {}, 0}));
}

const std::vector<task::RefBlock> kTower{{task::BlockColor::Green, {2, 0}},
                                         {task::BlockColor::Red, {2, 1}},
                                         {task::BlockColor::Blue, {2, 2}},
                                         {task::BlockColor::Yellow, {2, 3}}};

}  // namespace

TEST(Motion, ZeroOffsetConvergesAfterTwoIdleSteps) {
  auto spec = sim::default_task(sim::TaskKind::Grasp3D);
  spec.offset_range = {0, 0, 0};
  vlm::OracleBackend oracle({});
  const auto rec = control::run_motion_episode(spec, PromptVariant::Full, oracle, spec.schedule, 5);
  EXPECT_EQ(rec.termination, Termination::Converged);
  ASSERT_EQ(rec.steps.size(), 2u);
  for (const auto& s : rec.steps) EXPECT_TRUE(s.applied.empty());
  EXPECT_DOUBLE_EQ(*rec.final_metrics.distance_3d, 0.0);
}

TEST(Motion, AlwaysUpRunsToTheStepLimitInsideTheWorkspace) {
  const auto spec = sim::default_task(sim::TaskKind::Grasp1D);
  auto backend = repeat("ACTION: UP", spec.schedule.step_limit);
  const auto rec = control::run_motion_episode(spec, PromptVariant::Full, backend, spec.schedule, 1);
  EXPECT_EQ(rec.termination, Termination::StepLimit);
  ASSERT_EQ(rec.steps.size(), static_cast<std::size_t>(spec.schedule.step_limit));
  double z = rec.initial.gripper.position.z;
  for (const auto& s : rec.steps) {
    ASSERT_EQ(s.applied, std::vector<DiscreteAction>{DiscreteAction::Up});
    EXPECT_GE(s.gripper.position.z, z);
    EXPECT_TRUE(spec.workspace.contains(s.gripper.position));
    z = s.gripper.position.z;
  }
  EXPECT_EQ(backend.remaining(), 0u);
}

TEST(Motion, StepSizesFollowTheSchedule) {
  const auto spec = sim::default_task(sim::TaskKind::LegoAssembly);
  vlm::OracleBackend oracle({});
  const auto rec = control::run_motion_episode(spec, PromptVariant::Full, oracle, spec.schedule, 3);
  for (const auto& s : rec.steps) EXPECT_DOUBLE_EQ(s.step_size, sim::step_size(spec.schedule, s.step));
}

TEST(Motion, BackendFailureEndsTheEpisodeAsErrored) {
  const auto spec = sim::default_task(sim::TaskKind::Grasp1D);
  vlm::ScriptedBackend backend({{"ACTION: UP", {}, 0},
                                {"ACTION: UP", {}, 0},
                                {"rate limited", std::string("backend_error"), 429}});
  const auto rec = control::run_motion_episode(spec, PromptVariant::Full, backend, spec.schedule, 2);
  EXPECT_EQ(rec.termination, Termination::Errored);
  ASSERT_TRUE(rec.error);
  EXPECT_NE(rec.error->find("429"), std::string::npos);
  ASSERT_EQ(rec.steps.size(), 3u);
  const auto& last = rec.steps.back();
  EXPECT_TRUE(last.applied.empty());
  EXPECT_EQ(last.queries.back().error_kind, "backend_error");
  EXPECT_EQ(last.queries.back().error_status, 429);
  EXPECT_EQ(last.gripper, rec.steps[1].gripper);
  EXPECT_LE(rec.best_step, 1);
}

TEST(Motion, UnparseableAnswersActAsNone) {
  const auto spec = sim::default_task(sim::TaskKind::Grasp2D);
  auto backend = repeat("Move it a bit higher I guess.", 10);
  const auto rec = control::run_motion_episode(spec, PromptVariant::RelativeDecomposed, backend, spec.schedule, 4);
  EXPECT_EQ(rec.termination, Termination::Converged);
  ASSERT_EQ(rec.steps.size(), 2u);
  for (const auto& s : rec.steps) {
    EXPECT_TRUE(s.applied.empty());
    ASSERT_EQ(s.queries.size(), 2u);
    for (const auto& q : s.queries) {
      EXPECT_EQ(q.error_kind, "parse");
      EXPECT_FALSE(q.parsed);
    }
  }
  EXPECT_EQ(rec.final_metrics, rec.initial_metrics);
}

TEST(Motion, OutOfGrammarTokenIsProtocolErrorAndActsAsNone) {
  const auto spec = sim::default_task(sim::TaskKind::Grasp1D);
  auto backend = repeat("ACTION: LEFT", 2);
  const auto rec = control::run_motion_episode(spec, PromptVariant::Full, backend, spec.schedule, 4);
  EXPECT_EQ(rec.steps.at(0).queries.at(0).error_kind, "protocol");
  EXPECT_EQ(rec.termination, Termination::Converged);
}

TEST(Motion, BestMetricsTrackTheLowestError) {
  const auto spec = sim::default_task(sim::TaskKind::TargetReach);
  vlm::OracleConfig cfg;
  cfg.knobs.axis_accuracy = 0.5;
  vlm::OracleBackend oracle(cfg);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto rec = control::run_motion_episode(spec, PromptVariant::Full, oracle, spec.schedule, seed);
    for (const auto& s : rec.steps) EXPECT_LE(sim::primary_error(rec.best_metrics), sim::primary_error(s.metrics));
    EXPECT_EQ(rec.steps.at(static_cast<std::size_t>(rec.best_step)).metrics, rec.best_metrics);
  }
}

TEST(Motion, SameSeedSameEpisode) {
  const auto spec = sim::default_task(sim::TaskKind::Grasp3D);
  vlm::OracleConfig cfg;
  cfg.knobs.axis_accuracy = 0.8;
  cfg.seed = 11;
  vlm::OracleBackend oracle(cfg);
  const auto a = control::run_motion_episode(spec, PromptVariant::Full, oracle, spec.schedule, 9);
  const auto b = control::run_motion_episode(spec, PromptVariant::Full, oracle, spec.schedule, 9);
  EXPECT_EQ(control::to_jsonl(control::transcript_lines(a)), control::to_jsonl(control::transcript_lines(b)));
  const auto c = control::run_motion_episode(spec, PromptVariant::Full, oracle, spec.schedule, 10);
  EXPECT_NE(control::to_jsonl(control::transcript_lines(a)), control::to_jsonl(control::transcript_lines(c)));
}

TEST(Replay, MotionTranscriptReplaysIdentically) {
  for (auto kind : sim::kAllTaskKinds) {
    const auto spec = sim::default_task(kind);
    vlm::OracleConfig cfg;
    cfg.knobs.axis_accuracy = 0.7;
    vlm::OracleBackend oracle(cfg);
    const auto rec = control::run_motion_episode(spec, PromptVariant::Original, oracle, spec.schedule, 21);
    const auto lines = control::transcript_lines(rec);
    const auto r = control::replay_transcript(lines);
    EXPECT_TRUE(r.identical) << sim::to_string(kind) << ": " << r.difference;
  }
}

TEST(Replay, ErroredTranscriptReplaysIdentically) {
  const auto spec = sim::default_task(sim::TaskKind::Grasp1D);
  vlm::ScriptedBackend backend({{"ACTION: UP", {}, 0}, {"connection refused", std::string("backend_unavailable"), 0}});
  const auto lines = control::transcript_lines(
      control::run_motion_episode(spec, PromptVariant::Full, backend, spec.schedule, 2));
  const auto r = control::replay_transcript(lines);
  EXPECT_TRUE(r.identical) << r.difference;
}

TEST(Replay, TamperedResponseIsReported) {
  const auto spec = sim::default_task(sim::TaskKind::Grasp1D);
  vlm::OracleBackend oracle({});
  auto lines = control::transcript_lines(control::run_motion_episode(spec, PromptVariant::Full, oracle, spec.schedule, 2));
  ASSERT_GE(lines.size(), 3u);
  // A different recorded answer must change the regenerated trajectory.
  auto& q = lines[1]["queries"][0];
  const bool was_none = q["parsed"] == "NONE";
  q["response"] = was_none ? "ACTION: UP" : "ACTION: NONE";
  const auto r = control::replay_transcript(lines);
  EXPECT_FALSE(r.identical);
  EXPECT_FALSE(r.difference.empty());
}

TEST(Transcript, JsonlRoundTripThroughDisk) {
  const auto spec = sim::default_task(sim::TaskKind::Rotation);
  vlm::OracleBackend oracle({});
  const auto lines =
      control::transcript_lines(control::run_motion_episode(spec, PromptVariant::Full, oracle, spec.schedule, 0));
  const auto dir = std::filesystem::temp_directory_path() / "vfr_test_transcript";
  std::filesystem::create_directories(dir);
  control::write_jsonl(dir / "ep.jsonl", lines);
  EXPECT_EQ(control::read_jsonl(dir / "ep.jsonl"), lines);
  std::ofstream(dir / "bad.jsonl") << lines[0].dump() << "\n{oops\n";
  try {
    control::read_jsonl(dir / "bad.jsonl");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("bad.jsonl:2"), std::string::npos) << e.what();
  }
  std::filesystem::remove_all(dir);
}

TEST(Motion, ImageDirReceivesEveryDistinctImage) {
  const auto spec = sim::default_task(sim::TaskKind::Grasp1D);
  const auto dir = std::filesystem::temp_directory_path() / "vfr_test_images";
  std::filesystem::remove_all(dir);
  control::RunOptions opts;
  opts.image_dir = dir;
  vlm::OracleBackend oracle({});
  const auto rec = control::run_motion_episode(spec, PromptVariant::Full, oracle, spec.schedule, 1, opts);
  std::set<std::string> digests;
  for (const auto& s : rec.steps)
    for (const auto& q : s.queries) digests.insert(q.image_digests.begin(), q.image_digests.end());
  ASSERT_FALSE(digests.empty());
  for (const auto& d : digests) EXPECT_TRUE(std::filesystem::exists(dir / (d + ".png"))) << d;
  std::filesystem::remove_all(dir);
}

TEST(Task, PerfectOracleScoresEveryFailureAndControl) {
  vlm::OracleBackend oracle({});
  for (auto f : task::kAllFailures) {
    const auto phase = task::phase_of(f);
    const auto state = task::make_phase_state(kTower, 1, phase);
    const auto rec = control::run_task_episode(state, f, phase, oracle, 3, {}, "tower");
    EXPECT_FALSE(rec.errored) << task::failure_label(f);
    EXPECT_TRUE(rec.D && rec.A && rec.P) << task::failure_label(f) << " " << rec.verdict->describe();
  }
  for (auto phase : {task::Phase::Pick, task::Phase::Place}) {
    const auto rec = control::run_task_episode(task::make_phase_state(kTower, 2, phase), std::nullopt, phase, oracle, 4);
    EXPECT_FALSE(rec.failure_detected);
    EXPECT_TRUE(rec.D && rec.A && rec.P);
    EXPECT_FALSE(rec.analysis);
  }
}

TEST(Task, PlaceWithEmptyGripperIsPreconditionViolationAtStepOne) {
  const auto phase = task::Phase::Place;
  const auto state = task::make_phase_state(kTower, 1, phase);
  vlm::ScriptedBackend backend({{"ANSWER: NO", {}, 0},
                                {"ANSWER: NO", {}, 0},
                                {"ANSWER: NO", {}, 0},
                                {"REASON: place_wrong_position", {}, 0},
                                {"PLAN:\nPlace", {}, 0}});
  const auto rec =
      control::run_task_episode(state, task::FailureType::PlaceWrongPosition, phase, backend, 0, {}, "tower");
  EXPECT_TRUE(rec.D);
  EXPECT_TRUE(rec.A);
  ASSERT_TRUE(rec.verdict);
  EXPECT_EQ(rec.verdict->kind, task::VerdictKind::PreconditionViolation);
  EXPECT_EQ(rec.verdict->step, 1u);
  EXPECT_FALSE(rec.P);
}

TEST(Task, MissedDetectionFailsAllThreeScores) {
  const auto state = task::make_phase_state(kTower, 0, task::Phase::Pick);
  auto backend = repeat("ANSWER: YES", 3);
  const auto rec = control::run_task_episode(state, task::FailureType::FailToPick, task::Phase::Pick, backend, 0);
  EXPECT_FALSE(rec.failure_detected);
  EXPECT_FALSE(rec.D || rec.A || rec.P);
}

TEST(Task, BackendFailureMarksTheEpisodeErrored) {
  const auto state = task::make_phase_state(kTower, 0, task::Phase::Pick);
  vlm::ScriptedBackend backend({{"ANSWER: NO", {}, 0}, {"down", std::string("backend_unavailable"), 0}});
  const auto rec = control::run_task_episode(state, task::FailureType::FailToPick, task::Phase::Pick, backend, 0);
  EXPECT_TRUE(rec.errored);
  EXPECT_EQ(rec.detection.size(), 2u);
}

TEST(Task, UnparseablePlanIsRecordedAndScoresZero) {
  const auto state = task::make_phase_state(kTower, 0, task::Phase::Pick);
  vlm::ScriptedBackend backend({{"ANSWER: NO", {}, 0},
                                {"ANSWER: YES", {}, 0},
                                {"ANSWER: YES", {}, 0},
                                {"REASON: fail_to_pick", {}, 0},
                                {"PLAN:\nDo a little dance", {}, 0}});
  const auto rec = control::run_task_episode(state, task::FailureType::FailToPick, task::Phase::Pick, backend, 0);
  EXPECT_TRUE(rec.D);
  EXPECT_TRUE(rec.A);
  EXPECT_FALSE(rec.P);
  ASSERT_TRUE(rec.plan_error);
  EXPECT_FALSE(rec.verdict);
}

TEST(Task, PhaseMismatchIsConfigError) {
  vlm::OracleBackend oracle({});
  const auto state = task::make_phase_state(kTower, 0, task::Phase::Pick);
  EXPECT_THROW(control::run_task_episode(state, task::FailureType::FailToPlace, task::Phase::Pick, oracle, 0),
               ConfigError);
}

TEST(Replay, TaskTranscriptReplaysIdentically) {
  vlm::OracleConfig cfg;
  cfg.knobs.detection_accuracy = 0.8;
  cfg.knobs.analysis_accuracy = 0.7;
  cfg.knobs.plan_accuracy = 0.6;
  vlm::OracleBackend oracle(cfg);
  for (auto mode : {prompt::DetectionMode::Decomposed, prompt::DetectionMode::Combined}) {
    control::RunOptions opts;
    opts.detection_mode = mode;
    for (auto f : task::kAllFailures) {
      const auto phase = task::phase_of(f);
      const auto rec =
          control::run_task_episode(task::make_phase_state(kTower, 2, phase), f, phase, oracle, 17, opts, "tower");
      const auto r = control::replay_transcript(control::transcript_lines(rec, mode));
      EXPECT_TRUE(r.identical) << task::failure_label(f) << ": " << r.difference;
    }
  }
}
