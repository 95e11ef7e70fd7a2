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

#include "vfr/bench/suite.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <fstream>
#include <memory>
#include <thread>

#include "vfr/control/transcript.hpp"
#include "vfr/error.hpp"

namespace vfr::bench {

using nlohmann::json;

namespace {

struct Job {
  const Experiment* exp{nullptr};
  vlm::Backend* backend{nullptr};
  std::string group;
  int index{0};
  std::uint64_t seed{0};
  std::string transcript;
  // Motion
  prompt::PromptVariant variant{prompt::PromptVariant::Full};
  // Task
  std::optional<task::FailureType> failure;
  task::Phase phase{task::Phase::Pick};
  std::string structure;
};

std::string episode_path(const std::string& exp, const std::string& group, int index) {
  char name[32];
  std::snprintf(name, sizeof name, "ep_%04d.jsonl", index);
  return exp + "/" + group + "/" + name;
}

void ensure_writable(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  const auto probe = dir / ".write_probe";
  {
    std::ofstream f(probe, std::ios::trunc);
    if (!f || !(f << "ok")) throw IoError("output directory " + dir.string() + " is not writable");
  }
  std::filesystem::remove(probe, ec);
}

std::vector<json> run_job(const Job& job, const RunConfig& cfg) {
  control::RunOptions opts;
  opts.backend_config = vlm::backend_to_json(job.exp->backend);
  if (cfg.save_images) opts.image_dir = cfg.output_dir / "images";
  if (job.exp->type == ExperimentType::Motion) {
    const auto& spec = job.exp->motion.task;
    const auto rec = control::run_motion_episode(spec, job.variant, *job.backend, spec.schedule, job.seed, opts);
    return control::transcript_lines(rec);
  }
  opts.detection_mode = job.exp->task.detection_mode;
  const auto& ref = cfg.structures.at(job.structure);
  const auto state = task_episode_state(ref, job.index / static_cast<int>(job.exp->task.structure_sets.size()),
                                        job.phase);
  const auto rec = control::run_task_episode(state, job.failure, job.phase, *job.backend, job.seed, opts,
                                             job.structure);
  return control::transcript_lines(rec, opts.detection_mode);
}

}  // namespace

task::AssemblyState task_episode_state(const std::vector<task::RefBlock>& reference, int round, task::Phase phase) {
  if (reference.empty()) throw ConfigError("empty reference structure");
  const auto cursor = static_cast<std::size_t>(round) % reference.size();
  return task::make_phase_state(reference, cursor, phase);
}

Report run_suite(const RunConfig& cfg, const SuiteOptions& opts) {
  if (cfg.experiments.empty()) return Report{cfg.suite, {}, {}, {}};
  ensure_writable(cfg.output_dir);

  std::vector<std::unique_ptr<vlm::Backend>> backends;
  std::vector<Job> jobs;
  for (const auto& e : cfg.experiments) {
    backends.push_back(vlm::make_backend(e.backend));
    auto* backend = backends.back().get();
    if (e.type == ExperimentType::Motion) {
      for (auto v : e.motion.variants) {
        for (int i = 0; i < e.episodes; ++i) {
          Job j;
          j.exp = &e;
          j.backend = backend;
          j.group = std::string(prompt::to_string(v));
          j.index = i;
          j.seed = e.base_seed + static_cast<std::uint64_t>(i);
          j.variant = v;
          jobs.push_back(std::move(j));
        }
      }
    } else {
      std::vector<std::pair<std::optional<task::FailureType>, task::Phase>> groups;
      for (auto f : e.task.failures) groups.emplace_back(f, task::phase_of(f));
      if (e.task.controls) {
        groups.emplace_back(std::nullopt, task::Phase::Pick);
        groups.emplace_back(std::nullopt, task::Phase::Place);
      }
      for (const auto& [failure, phase] : groups) {
        for (int i = 0; i < e.episodes; ++i) {
          Job j;
          j.exp = &e;
          j.backend = backend;
          j.group = failure ? std::string(task::failure_label(*failure)) : "control_" + std::string(task::to_string(phase));
          j.index = i;
          j.seed = e.base_seed + static_cast<std::uint64_t>(i);
          j.failure = failure;
          j.phase = phase;
          j.structure = e.task.structure_sets[static_cast<std::size_t>(i) % e.task.structure_sets.size()];
          jobs.push_back(std::move(j));
        }
      }
    }
  }
  for (auto& j : jobs) j.transcript = episode_path(j.exp->id, j.group, j.index);

  std::vector<std::vector<json>> transcripts(jobs.size());
  std::vector<std::exception_ptr> errors(jobs.size());
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  std::atomic<bool> abort{false};
  auto worker = [&] {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= jobs.size() || abort.load()) return;
      try {
        const auto& job = jobs[k];
        auto lines = run_job(job, cfg);
        const auto path = cfg.output_dir / job.transcript;
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
        if (ec) throw IoError("cannot create " + path.parent_path().string() + ": " + ec.message());
        control::write_jsonl(path, lines);
        transcripts[k] = std::move(lines);
      } catch (...) {
        errors[k] = std::current_exception();
        abort.store(true);
      }
      const auto n = done.fetch_add(1) + 1;
      if (opts.progress) opts.progress(n, jobs.size());
    }
  };
  const int threads = std::max(1, std::min<int>(opts.workers, static_cast<int>(jobs.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  std::vector<EpisodeRef> refs;
  for (const auto& j : jobs) refs.push_back({j.exp->id, j.group, j.index, j.seed, j.transcript, false});
  return aggregate(cfg.suite, refs, transcripts);
}

}  // namespace vfr::bench
