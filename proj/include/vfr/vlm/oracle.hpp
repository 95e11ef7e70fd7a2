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

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "vfr/prompt/prompt.hpp"
#include "vfr/rng.hpp"
#include "vfr/sim/types.hpp"
#include "vfr/task/assembly.hpp"

namespace vfr::vlm {

struct OracleKnobs {
  /// Decomposed single-axis queries.
  double axis_accuracy{1.0};
  /// Per-axis accuracy of combined queries.
  double combined_accuracy{0.7};
  /// Multiplier when the query does not name drawn key elements.
  double unanchored_penalty{0.8};
  /// Multiplier when the query asks for a movement without relative framing.
  double absolute_penalty{0.8};
  double detection_accuracy{1.0};
  double analysis_accuracy{1.0};
  double plan_accuracy{1.0};
  /// Moves only when the offset exceeds this fraction of the current step, so
  /// a truthful answer never overshoots by more than it corrects.
  double move_threshold{0.52};
  /// Meters (degrees for Rotation). Empty means half the final step size.
  std::optional<double> stop_deadband;

  /// Throws ConfigError for values outside their ranges.
  void validate() const;
  friend bool operator==(const OracleKnobs&, const OracleKnobs&) = default;
};

struct AxisTruth {
  sim::Axis axis;
  /// Mover minus goal along the axis.
  double residual;
};

struct MotionTruth {
  std::vector<AxisTruth> axes;
  double step_size;
  double final_step_size;
};

struct CriterionTruth {
  bool holds;
};

struct AnalysisTruth {
  std::string label;
};

struct PlanTruth {
  task::RecoveryPlan plan;
};

using GroundTruth = std::variant<MotionTruth, CriterionTruth, AnalysisTruth, PlanTruth>;

/// What the oracle needs to answer one sub-query.
struct GroundTruthChannel {
  const prompt::SubQuery* query{nullptr};
  GroundTruth truth;
  /// The episode's stream; draws happen in query order.
  Rng* rng{nullptr};
};

/// Deadband in effect for a truth and knob set.
double effective_deadband(const MotionTruth& t, const OracleKnobs& k);

/// The geometrically correct token for an axis.
sim::DiscreteAction truthful_action(const AxisTruth& a, const MotionTruth& t, const OracleKnobs& k);

/// Probability of a correct token (or label) for the query.
double effective_accuracy(const prompt::SubQuery& q, const OracleKnobs& k);

/// Throws InternalError when the truth kind does not match the query.
std::string oracle_answer(const prompt::SubQuery& q, const GroundTruth& truth, const OracleKnobs& k, Rng& rng);

}  // namespace vfr::vlm
