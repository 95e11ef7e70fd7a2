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

#include <cmath>
#include <map>
#include <sstream>

#include "vfr/error.hpp"
#include "vfr/prompt/grammar.hpp"
#include "vfr/prompt/prompt.hpp"
#include "vfr/sim/scene.hpp"
#include "vfr/vlm/oracle.hpp"

using namespace vfr;
using prompt::PromptVariant;
using sim::Axis;
using sim::DiscreteAction;

namespace {

prompt::QueryPlan motion_plan(sim::TaskKind kind, PromptVariant variant) {
  const auto spec = sim::default_task(kind);
  const auto scene = sim::init_scene(spec, 0);
  const auto images = prompt::motion_images(scene, variant);
  return prompt::build_motion_queries(images, variant, spec);
}

vlm::MotionTruth truth(std::vector<vlm::AxisTruth> axes, double step = 0.04, double final_step = 0.03) {
  return vlm::MotionTruth{std::move(axes), step, final_step};
}

/// Per-axis judgments listed before the ACTION line.
std::map<std::string, DiscreteAction> axis_lines(const std::string& response) {
  std::map<std::string, DiscreteAction> out;
  std::istringstream in(response);
  std::string line;
  while (std::getline(in, line)) {
    const auto colon = line.find(": ");
    if (colon == std::string::npos || line.rfind("ACTION", 0) == 0) continue;
    out[line.substr(0, colon)] = sim::action_from_token(line.substr(colon + 2)).value();
  }
  return out;
}

/// Four-sigma half width of a binomial proportion estimate.
double four_sigma(double p, int n) { return 4.0 * std::sqrt(p * (1 - p) / n); }

prompt::ImagePrompt assembly_image(bool reference) {
  const auto state = task::make_phase_state({{task::BlockColor::Red, {2, 0}}}, 0, task::Phase::Pick);
  return prompt::ImagePrompt{std::make_shared<raster::RasterImage>(task::render_assembly(state, reference)),
                             {},
                             reference,
                             reference ? "reference" : "current"};
}

}  // namespace

TEST(Truthful, ThresholdIsTheLargerOfDeadbandAndStepFraction) {
  const vlm::OracleKnobs k;
  const auto t = truth({}, 0.04, 0.03);
  EXPECT_DOUBLE_EQ(vlm::effective_deadband(t, k), 0.015);
  // 0.52 * 0.04 = 0.0208 exceeds the deadband.
  EXPECT_EQ(vlm::truthful_action({Axis::Vertical, 0.021}, t, k), DiscreteAction::Down);
  EXPECT_EQ(vlm::truthful_action({Axis::Vertical, 0.0207}, t, k), DiscreteAction::None);
  EXPECT_EQ(vlm::truthful_action({Axis::Vertical, -0.03}, t, k), DiscreteAction::Up);
  EXPECT_EQ(vlm::truthful_action({Axis::Horizontal, 0.05}, t, k), DiscreteAction::Left);
  EXPECT_EQ(vlm::truthful_action({Axis::Depth, -0.05}, t, k), DiscreteAction::Forward);
  EXPECT_EQ(vlm::truthful_action({Axis::Yaw, 10.0}, truth({}, 5.0, 4.17), k), DiscreteAction::RotateLeft);
  EXPECT_EQ(vlm::truthful_action({Axis::Yaw, -10.0}, truth({}, 5.0, 4.17), k), DiscreteAction::RotateRight);

  // Once steps shrink, the deadband governs.
  const auto late = truth({}, 0.01, 0.03);
  EXPECT_EQ(vlm::truthful_action({Axis::Vertical, 0.014}, late, k), DiscreteAction::None);
  EXPECT_EQ(vlm::truthful_action({Axis::Vertical, 0.016}, late, k), DiscreteAction::Down);
  vlm::OracleKnobs tight;
  tight.stop_deadband = 0.0;
  EXPECT_EQ(vlm::truthful_action({Axis::Vertical, 0.006}, late, tight), DiscreteAction::Down);
}

TEST(Truthful, ActingNeverIncreasesTheResidual) {
  const vlm::OracleKnobs k;
  for (double step : {0.04, 0.02, 0.005}) {
    for (double r = -0.1; r <= 0.1; r += 0.0007) {
      const auto t = truth({}, step, 0.004 * 0.98);
      const auto a = vlm::truthful_action({Axis::Vertical, r}, t, k);
      const double after = a == DiscreteAction::Up ? r + step : a == DiscreteAction::Down ? r - step : r;
      EXPECT_LE(std::abs(after), std::abs(r) + 1e-15) << "r=" << r << " step=" << step;
    }
  }
}

TEST(Accuracy, VariantDeterminesEffectiveAccuracy) {
  const vlm::OracleKnobs k;
  const std::map<PromptVariant, double> expected{{PromptVariant::Original, 0.7 * 0.8 * 0.8},
                                                 {PromptVariant::Relative, 0.7 * 0.8},
                                                 {PromptVariant::RelativeDecomposed, 0.8},
                                                 {PromptVariant::Full, 1.0}};
  for (const auto& [variant, acc] : expected) {
    for (const auto& q : motion_plan(sim::TaskKind::Grasp3D, variant)) {
      EXPECT_NEAR(vlm::effective_accuracy(q, k), acc, 1e-12) << prompt::to_string(variant) << " " << q.id;
    }
  }
}

TEST(Accuracy, NonMotionKindsUseTheirOwnKnobs) {
  vlm::OracleKnobs k;
  k.detection_accuracy = 0.9;
  k.analysis_accuracy = 0.8;
  k.plan_accuracy = 0.7;
  prompt::SubQuery q;
  q.kind = prompt::AnswerKind::YesNo;
  EXPECT_DOUBLE_EQ(vlm::effective_accuracy(q, k), 0.9);
  q.kind = prompt::AnswerKind::Reason;
  EXPECT_DOUBLE_EQ(vlm::effective_accuracy(q, k), 0.8);
  q.kind = prompt::AnswerKind::Plan;
  EXPECT_DOUBLE_EQ(vlm::effective_accuracy(q, k), 0.7);
}

TEST(Statistics, DecomposedCorrectRateIsBinomialAndErrorsAreUniform) {
  vlm::OracleKnobs k;
  k.axis_accuracy = 0.6;
  const auto plan = motion_plan(sim::TaskKind::Grasp1D, PromptVariant::Full);
  ASSERT_EQ(plan.size(), 1u);
  const auto& q = plan[0];
  const vlm::GroundTruth gt = truth({{Axis::Vertical, 0.05}});
  Rng rng(42);
  constexpr int n = 20000;
  std::map<DiscreteAction, int> counts;
  for (int i = 0; i < n; ++i) counts[prompt::parse_action(vlm::oracle_answer(q, gt, k, rng), q.actions)]++;
  const double rate = static_cast<double>(counts[DiscreteAction::Down]) / n;
  EXPECT_NEAR(rate, 0.6, four_sigma(0.6, n));

  // The two wrong tokens split evenly: chi-square with one degree of freedom.
  const double wrong = counts[DiscreteAction::Up] + counts[DiscreteAction::None];
  const double half = wrong / 2;
  const double chi2 = std::pow(counts[DiscreteAction::Up] - half, 2) / half +
                      std::pow(counts[DiscreteAction::None] - half, 2) / half;
  EXPECT_LT(chi2, 10.83);  // p = 0.001
  EXPECT_EQ(counts.size(), 3u);
}

TEST(Statistics, CombinedThreeAxisJudgmentsAreIndependent) {
  vlm::OracleKnobs k;
  k.unanchored_penalty = 1.0;
  k.absolute_penalty = 1.0;
  const auto plan = motion_plan(sim::TaskKind::Grasp3D, PromptVariant::Original);
  ASSERT_EQ(plan.size(), 1u);
  const auto& q = plan[0];
  ASSERT_DOUBLE_EQ(vlm::effective_accuracy(q, k), 0.7);
  const auto t = truth({{Axis::Vertical, 0.05}, {Axis::Horizontal, -0.06}, {Axis::Depth, 0.07}});
  Rng rng(7);
  constexpr int n = 20000;
  int all_right = 0;
  for (int i = 0; i < n; ++i) {
    const auto lines = axis_lines(vlm::oracle_answer(q, t, k, rng));
    ASSERT_EQ(lines.size(), 3u);
    all_right += lines.at("vertical") == DiscreteAction::Down && lines.at("horizontal") == DiscreteAction::Right &&
                 lines.at("depth") == DiscreteAction::Backward;
  }
  const double p = 0.7 * 0.7 * 0.7;
  EXPECT_NEAR(static_cast<double>(all_right) / n, p, four_sigma(p, n));
}

TEST(Combined, ActsOnTheLargestOffsetThatWasJudgedToMove) {
  const vlm::OracleKnobs perfect{.combined_accuracy = 1.0, .unanchored_penalty = 1.0, .absolute_penalty = 1.0};
  const auto plan = motion_plan(sim::TaskKind::Grasp3D, PromptVariant::Original);
  const auto& q = plan[0];
  Rng rng(1);
  const auto t = truth({{Axis::Vertical, 0.03}, {Axis::Horizontal, -0.09}, {Axis::Depth, 0.001}});
  EXPECT_EQ(prompt::parse_action(vlm::oracle_answer(q, t, perfect, rng), q.actions), DiscreteAction::Right);
  const auto settled = truth({{Axis::Vertical, 0.001}, {Axis::Horizontal, -0.001}, {Axis::Depth, 0.0}});
  EXPECT_EQ(prompt::parse_action(vlm::oracle_answer(q, settled, perfect, rng), q.actions), DiscreteAction::None);
}

TEST(Detection, YesNoRateFollowsDetectionAccuracy) {
  vlm::OracleKnobs k;
  k.detection_accuracy = 0.75;
  const auto plan = prompt::build_detection_queries(task::Phase::Pick, assembly_image(false), assembly_image(true),
                                                    task::BlockColor::Red);
  ASSERT_FALSE(plan.empty());
  Rng rng(3);
  constexpr int n = 10000;
  int yes = 0;
  for (int i = 0; i < n; ++i) yes += prompt::parse_yes_no(vlm::oracle_answer(plan[0], vlm::CriterionTruth{true}, k, rng));
  EXPECT_NEAR(static_cast<double>(yes) / n, 0.75, four_sigma(0.75, n));
}

TEST(Recovery, WrongLabelsAndMutatedPlansDifferFromTruth) {
  vlm::OracleKnobs k;
  k.analysis_accuracy = 0.0;
  k.plan_accuracy = 0.0;
  const auto catalog = task::skill_catalog();
  const auto plan = prompt::build_recovery_queries("The red block was not picked.", catalog, assembly_image(false),
                                                   assembly_image(true));
  ASSERT_EQ(plan.size(), 2u);
  const task::RecoveryPlan truth_plan{task::Skill::of(task::SkillKind::MoveToPickup), task::Skill::pick()};
  Rng rng(5);
  std::map<std::size_t, int> sizes;
  for (int i = 0; i < 500; ++i) {
    const auto label = prompt::parse_reason(vlm::oracle_answer(plan[0], vlm::AnalysisTruth{"fail_to_pick"}, k, rng),
                                            plan[0].labels);
    EXPECT_NE(label, "fail_to_pick");
    const auto got = prompt::parse_plan(vlm::oracle_answer(plan[1], vlm::PlanTruth{truth_plan}, k, rng), catalog);
    EXPECT_NE(got, truth_plan);
    sizes[got.size()]++;
  }
  // A mutation removes or inserts exactly one skill.
  for (const auto& [size, count] : sizes) EXPECT_TRUE(size == 1 || size == 3) << size;
  EXPECT_EQ(sizes.size(), 2u);

  k.analysis_accuracy = 1.0;
  k.plan_accuracy = 1.0;
  EXPECT_EQ(prompt::parse_plan(vlm::oracle_answer(plan[1], vlm::PlanTruth{truth_plan}, k, rng), catalog), truth_plan);
}

TEST(Oracle, SameSeedSameAnswers) {
  vlm::OracleKnobs k;
  const auto plan = motion_plan(sim::TaskKind::Grasp3D, PromptVariant::Relative);
  const auto t = truth({{Axis::Vertical, 0.05}, {Axis::Horizontal, -0.06}, {Axis::Depth, 0.07}});
  Rng a(mix_seed(9, 1), Stream::Oracle), b(mix_seed(9, 1), Stream::Oracle);
  for (int i = 0; i < 50; ++i) EXPECT_EQ(vlm::oracle_answer(plan[0], t, k, a), vlm::oracle_answer(plan[0], t, k, b));
}

TEST(Oracle, MismatchedTruthAndBadKnobsAreRejected) {
  const vlm::OracleKnobs k;
  const auto plan = motion_plan(sim::TaskKind::Grasp1D, PromptVariant::Full);
  Rng rng(0);
  EXPECT_THROW(vlm::oracle_answer(plan[0], vlm::CriterionTruth{true}, k, rng), InternalError);
  EXPECT_THROW(vlm::oracle_answer(plan[0], truth({{Axis::Depth, 0.1}}), k, rng), InternalError);

  EXPECT_NO_THROW(k.validate());
  vlm::OracleKnobs bad;
  bad.axis_accuracy = 1.2;
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = {};
  bad.move_threshold = 0.4;
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = {};
  bad.stop_deadband = -1.0;
  EXPECT_THROW(bad.validate(), ConfigError);
}
