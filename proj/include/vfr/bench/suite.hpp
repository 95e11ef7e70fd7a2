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

#include <functional>
#include <string>

#include "vfr/bench/config.hpp"
#include "vfr/bench/report.hpp"

namespace vfr::bench {

struct SuiteOptions {
  int workers{1};
  /// Called after each episode with (done, total); may be called from any worker.
  std::function<void(std::size_t, std::size_t)> progress;
};

/// Runs every episode, writes one transcript per episode under
/// cfg.output_dir, and returns the aggregated report (not yet emitted).
/// Throws IoError before any episode when the output directory is unusable.
Report run_suite(const RunConfig& cfg, const SuiteOptions& opts = {});

/// Pre-attempt state for the `round`-th use of a structure: the cursor walks
/// the reference, wrapping around.
task::AssemblyState task_episode_state(const std::vector<task::RefBlock>& reference, int round, task::Phase phase);

}  // namespace vfr::bench
