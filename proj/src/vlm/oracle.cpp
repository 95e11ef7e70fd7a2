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

#include "vfr/vlm/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "vfr/error.hpp"
#include "vfr/prompt/grammar.hpp"

namespace vfr::vlm {

using prompt::AnswerKind;
using sim::DiscreteAction;

void OracleKnobs::validate() const {
  const auto unit = [](double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0)) throw ConfigError(std::string(name) + " must lie in [0, 1]");
  };
  unit(axis_accuracy, "axis_accuracy");
  unit(combined_accuracy, "combined_accuracy");
  unit(unanchored_penalty, "unanchored_penalty");
  unit(absolute_penalty, "absolute_penalty");
  unit(detection_accuracy, "detection_accuracy");
  unit(analysis_accuracy, "analysis_accuracy");
  unit(plan_accuracy, "plan_accuracy");
  if (!(move_threshold >= 0.5 && move_threshold < 1.0)) throw ConfigError("move_threshold must lie in [0.5, 1)");
  if (stop_deadband && !(*stop_deadband >= 0.0 && std::isfinite(*stop_deadband))) {
    throw ConfigError("stop_deadband must be a nonnegative number");
  }
}

double effective_deadband(const MotionTruth& t, const OracleKnobs& k) {
  return k.stop_deadband.value_or(0.5 * t.final_step_size);
}

DiscreteAction truthful_action(const AxisTruth& a, const MotionTruth& t, const OracleKnobs& k) {
  const double threshold = std::max(effective_deadband(t, k), k.move_threshold * t.step_size);
  if (std::abs(a.residual) <= threshold) return DiscreteAction::None;
  // Positive residual: the mover is past the goal, so move in the negative direction.
  return sim::action_toward(a.axis, a.residual > 0 ? -1.0 : 1.0);
}

double effective_accuracy(const prompt::SubQuery& q, const OracleKnobs& k) {
  switch (q.kind) {
    case AnswerKind::Action: {
      double acc = q.decomposed ? k.axis_accuracy : k.combined_accuracy;
      if (!prompt::is_anchored(q)) acc *= k.unanchored_penalty;
      if (!prompt::is_relative_phrasing(q)) acc *= k.absolute_penalty;
      return acc;
    }
    case AnswerKind::YesNo: return k.detection_accuracy;
    case AnswerKind::Reason: return k.analysis_accuracy;
    case AnswerKind::Plan: return k.plan_accuracy;
  }
  return 0.0;
}

namespace {

template <typename T>
T pick_other(const std::vector<T>& options, const T& correct, Rng& rng) {
  std::vector<T> others;
  for (const auto& o : options) {
    if (!(o == correct)) others.push_back(o);
  }
  if (others.empty()) throw InternalError("grammar has no incorrect alternative");
  return others[rng.below(others.size())];
}

DiscreteAction perceive(const AxisTruth& a, const MotionTruth& t, const OracleKnobs& k, double acc,
                        const std::vector<DiscreteAction>& options, Rng& rng) {
  const auto correct = truthful_action(a, t, k);
  if (std::find(options.begin(), options.end(), correct) == options.end()) {
    throw InternalError("correct token " + std::string(sim::token(correct)) + " missing from the grammar");
  }
  if (rng.bernoulli(acc)) return correct;
  return pick_other(options, correct, rng);
}

std::string answer_motion(const prompt::SubQuery& q, const MotionTruth& t, const OracleKnobs& k, Rng& rng) {
  const double acc = effective_accuracy(q, k);
  std::string out;
  if (q.decomposed) {
    if (!q.axis) throw InternalError("decomposed motion query without an axis");
    const auto it = std::find_if(t.axes.begin(), t.axes.end(), [&](const AxisTruth& a) { return a.axis == *q.axis; });
    if (it == t.axes.end()) throw InternalError("no ground truth for axis " + std::string(sim::to_string(*q.axis)));
    const auto a = perceive(*it, t, k, acc, q.actions, rng);
    out = std::string(sim::to_string(*q.axis)) + ": " + std::string(sim::token(a)) + "\n";
    return out + prompt::format_action(a);
  }

  // Combined query: each axis is judged on its own, then the largest true
  // offset with a movement judgment is acted on.
  std::vector<DiscreteAction> seen;
  for (const auto& a : t.axes) {
    const auto pair = sim::axis_pair(a.axis);
    seen.push_back(perceive(a, t, k, acc, {pair.begin(), pair.end()}, rng));
    out += std::string(sim::to_string(a.axis)) + ": " + std::string(sim::token(seen.back())) + "\n";
  }
  std::vector<std::size_t> order(t.axes.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return std::abs(t.axes[i].residual) > std::abs(t.axes[j].residual);
  });
  DiscreteAction chosen = DiscreteAction::None;
  for (auto i : order) {
    if (seen[i] != DiscreteAction::None) {
      chosen = seen[i];
      break;
    }
  }
  if (std::find(q.actions.begin(), q.actions.end(), chosen) == q.actions.end()) {
    throw InternalError("combined answer " + std::string(sim::token(chosen)) + " is outside the grammar");
  }
  return out + prompt::format_action(chosen);
}

task::RecoveryPlan mutate_plan(task::RecoveryPlan plan, const std::vector<std::string>& catalog, Rng& rng) {
  const bool remove = plan.size() > 1 && rng.bernoulli(0.5);
  if (remove) {
    plan.erase(plan.begin() + static_cast<std::ptrdiff_t>(rng.below(plan.size())));
    return plan;
  }
  std::vector<task::SkillKind> kinds;
  for (const auto& name : catalog) {
    for (auto kind : task::kAllSkillKinds) {
      if (task::skill_name(kind) == name) kinds.push_back(kind);
    }
  }
  if (kinds.empty()) throw InternalError("plan query without catalog skills");
  const auto kind = kinds[rng.below(kinds.size())];
  const auto at = rng.below(plan.size() + 1);
  plan.insert(plan.begin() + static_cast<std::ptrdiff_t>(at), task::Skill::of(kind));
  return plan;
}

}  // namespace

std::string oracle_answer(const prompt::SubQuery& q, const GroundTruth& truth, const OracleKnobs& k, Rng& rng) {
  switch (q.kind) {
    case AnswerKind::Action: {
      const auto* t = std::get_if<MotionTruth>(&truth);
      if (!t) throw InternalError("action query needs motion ground truth");
      return answer_motion(q, *t, k, rng);
    }
    case AnswerKind::YesNo: {
      const auto* t = std::get_if<CriterionTruth>(&truth);
      if (!t) throw InternalError("yes/no query needs criterion ground truth");
      const bool answer = rng.bernoulli(k.detection_accuracy) ? t->holds : !t->holds;
      return std::string(answer ? "The condition holds in the current image.\n"
                                : "The condition does not hold in the current image.\n") +
             prompt::format_yes_no(answer);
    }
    case AnswerKind::Reason: {
      const auto* t = std::get_if<AnalysisTruth>(&truth);
      if (!t) throw InternalError("analysis query needs a ground-truth label");
      if (std::find(q.labels.begin(), q.labels.end(), t->label) == q.labels.end()) {
        throw InternalError("ground-truth label '" + t->label + "' is not in the query's label set");
      }
      const auto label = rng.bernoulli(k.analysis_accuracy) ? t->label : pick_other(q.labels, t->label, rng);
      return "Comparing the current image with the reference.\n" + prompt::format_reason(label);
    }
    case AnswerKind::Plan: {
      const auto* t = std::get_if<PlanTruth>(&truth);
      if (!t) throw InternalError("plan query needs a ground-truth plan");
      const auto plan = rng.bernoulli(k.plan_accuracy) ? t->plan : mutate_plan(t->plan, q.labels, rng);
      return "Recovery steps follow.\n" + prompt::format_plan(plan);
    }
  }
  throw InternalError("unhandled answer kind");
}

}  // namespace vfr::vlm
