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

#include "vfr/control/controller.hpp"

#include <map>
#include <system_error>

#include "vfr/error.hpp"
#include "vfr/prompt/grammar.hpp"
#include "vfr/raster/png.hpp"
#include "vfr/rng.hpp"

namespace vfr::control {

namespace {

using prompt::SubQuery;

/// Digests each distinct image once and optionally stores it.
class ImageLog {
 public:
  explicit ImageLog(const RunOptions& opts) : dir_(opts.image_dir) {
    if (dir_) {
      std::error_code ec;
      std::filesystem::create_directories(*dir_, ec);
      if (ec) throw IoError("cannot create image directory " + dir_->string() + ": " + ec.message());
    }
  }

  std::vector<std::string> digests(const SubQuery& q) {
    std::vector<std::string> out;
    for (const auto& img : q.images) out.push_back(digest(img.image));
    return out;
  }

 private:
  std::string digest(const std::shared_ptr<const raster::RasterImage>& img) {
    if (const auto it = cache_.find(img.get()); it != cache_.end()) return it->second;
    const auto d = raster::pixel_digest(*img);
    cache_.emplace(img.get(), d);
    keep_.push_back(img);
    if (dir_) {
      const auto path = *dir_ / (d + ".png");
      if (!std::filesystem::exists(path)) raster::write_png(path, *img);
    }
    return d;
  }

  std::optional<std::filesystem::path> dir_;
  std::map<const raster::RasterImage*, std::string> cache_;
  // Holds the images alive so cached addresses are never reused.
  std::vector<std::shared_ptr<const raster::RasterImage>> keep_;
};

/// Issues one sub-query. Returns false when the backend failed.
bool issue(vlm::Backend& backend, const SubQuery& q, vlm::GroundTruth truth, Rng& rng, ImageLog& log,
           QueryTrace& t) {
  t.id = q.id;
  t.system_text = q.text.task_description;
  t.user_text = q.text.user_text();
  t.image_digests = log.digests(q);
  auto req = vlm::make_request(q);
  vlm::GroundTruthChannel channel{&q, std::move(truth), &rng};
  if (backend.is_oracle()) req.truth = &channel;
  try {
    t.response = backend.complete(req);
  } catch (const BackendError& e) {
    t.response = e.body_excerpt();
    t.error = e.what();
    t.error_kind = "backend_error";
    t.error_status = e.status();
    return false;
  } catch (const BackendUnavailable& e) {
    t.response = e.what();
    t.error = e.what();
    t.error_kind = "backend_unavailable";
    return false;
  }
  return true;
}

template <typename F>
void parse_into(QueryTrace& t, F&& parse) {
  try {
    t.parsed = parse();
  } catch (const ParseError& e) {
    t.error = e.what();
    t.error_kind = "parse";
  } catch (const ProtocolError& e) {
    t.error = e.what();
    t.error_kind = "protocol";
  }
}

Rng answer_stream(const vlm::Backend& backend, std::uint64_t seed) {
  return Rng(mix_seed(backend.stream_seed(), seed), Stream::Oracle);
}

}  // namespace

std::string_view to_string(Termination t) noexcept {
  switch (t) {
    case Termination::StepLimit: return "step_limit";
    case Termination::Converged: return "converged";
    case Termination::Errored: return "errored";
  }
  return "?";
}

Termination parse_termination(std::string_view s) {
  for (auto t : {Termination::StepLimit, Termination::Converged, Termination::Errored}) {
    if (to_string(t) == s) return t;
  }
  throw ParseError("unknown termination '" + std::string(s) + "'");
}

EpisodeRecord run_motion_episode(const sim::TaskSpec& spec, prompt::PromptVariant variant, vlm::Backend& backend,
                                 const sim::StepSchedule& schedule, std::uint64_t seed, const RunOptions& opts) {
  spec.validate();
  schedule.validate();
  EpisodeRecord rec;
  rec.spec = spec;
  rec.schedule = schedule;
  rec.variant = variant;
  rec.backend = backend.descriptor();
  rec.backend_config = opts.backend_config;
  rec.seed = seed;

  sim::Scene scene = sim::init_scene(spec, seed);
  scene.schedule = schedule;
  rec.initial = scene;
  rec.initial_metrics = sim::compute_metrics(scene);
  rec.final_metrics = rec.initial_metrics;
  rec.best_metrics = rec.initial_metrics;

  Rng rng = answer_stream(backend, seed);
  ImageLog log(opts);
  const auto axes = sim::enabled_axes(spec.kind);
  const double final_step = sim::step_size(schedule, schedule.step_limit - 1);
  int idle_steps = 0;
  rec.termination = Termination::StepLimit;

  for (int k = 0; k < schedule.step_limit; ++k) {
    StepEntry entry;
    entry.step = k;
    entry.step_size = sim::step_size(schedule, k);

    const auto images = prompt::motion_images(scene, variant);
    const auto plan = prompt::build_motion_queries(images, variant, spec);
    vlm::MotionTruth truth{{}, entry.step_size, final_step};
    for (auto axis : axes) truth.axes.push_back({axis, sim::residual(scene, axis)});

    bool failed = false;
    for (const auto& q : plan) {
      QueryTrace t;
      if (!issue(backend, q, truth, rng, log, t)) {
        rec.error = t.error;
        entry.queries.push_back(std::move(t));
        failed = true;
        break;
      }
      std::optional<sim::DiscreteAction> action;
      parse_into(t, [&] {
        action = prompt::parse_action(t.response, q.actions);
        return std::string(sim::token(*action));
      });
      if (action && *action != sim::DiscreteAction::None) {
        const auto axis = sim::axis_of(*action);
        const bool repeat = std::any_of(entry.applied.begin(), entry.applied.end(),
                                        [&](sim::DiscreteAction a) { return sim::axis_of(a) == axis; });
        if (!repeat) entry.applied.push_back(*action);
      }
      entry.queries.push_back(std::move(t));
    }
    if (failed) {
      // The interrupted step is kept for the record but moves nothing.
      entry.gripper = scene.gripper;
      entry.metrics = sim::compute_metrics(scene);
      entry.applied.clear();
      rec.steps.push_back(std::move(entry));
      rec.termination = Termination::Errored;
      break;
    }

    scene = sim::apply_step(scene, entry.applied);
    entry.gripper = scene.gripper;
    entry.metrics = sim::compute_metrics(scene);
    const bool idle = entry.applied.empty();
    rec.steps.push_back(std::move(entry));

    idle_steps = idle ? idle_steps + 1 : 0;
    if (idle_steps == 2) {
      rec.termination = Termination::Converged;
      break;
    }
  }

  double best = 0;
  for (const auto& e : rec.steps) {
    if (rec.termination == Termination::Errored && &e == &rec.steps.back()) break;
    const double err = sim::primary_error(e.metrics);
    if (rec.best_step < 0 || err < best) {
      best = err;
      rec.best_step = e.step;
      rec.best_metrics = e.metrics;
    }
  }
  rec.final_metrics = sim::compute_metrics(scene);
  return rec;
}

TaskEpisodeRecord run_task_episode(const task::AssemblyState& state, std::optional<task::FailureType> failure,
                                   task::Phase phase, vlm::Backend& backend, std::uint64_t seed,
                                   const RunOptions& opts, std::string structure) {
  if (failure && task::phase_of(*failure) != phase) {
    throw ConfigError("failure " + std::string(task::failure_label(*failure)) + " does not belong to the " +
                      std::string(task::to_string(phase)) + " phase");
  }
  if (auto bad = task::check_state(state)) throw ConfigError("invalid assembly state: " + *bad);

  TaskEpisodeRecord rec;
  rec.seed = seed;
  rec.structure = std::move(structure);
  rec.failure = failure;
  rec.phase = phase;
  rec.pre_state = state;
  rec.backend = backend.descriptor();
  rec.backend_config = opts.backend_config;
  rec.goal = task::subtask_goal(state, phase);

  Rng failure_rng(seed, Stream::Failure);
  rec.post_state = failure ? task::inject_failure(state, *failure, failure_rng) : task::nominal_outcome(state, phase);
  const auto criteria = task::detection_criteria(rec.post_state, rec.goal);

  Rng rng = answer_stream(backend, seed);
  ImageLog log(opts);
  const auto current = prompt::ImagePrompt::make(task::render_assembly(rec.post_state, false), {}, "current");
  const auto reference = prompt::ImagePrompt::make(task::render_assembly(rec.post_state, true), {}, "reference", true);
  const auto target = state.reference[state.cursor].color;

  const auto detection = prompt::build_detection_queries(phase, current, reference, target, opts.detection_mode);
  std::string report;
  for (const auto& q : detection) {
    const bool truth = q.criterion ? criteria[static_cast<std::size_t>(*q.criterion)]
                                   : (criteria[0] && criteria[1] && criteria[2]);
    QueryTrace t;
    const bool ok = issue(backend, q, vlm::CriterionTruth{truth}, rng, log, t);
    CriterionOutcome outcome{truth, std::nullopt};
    if (ok) {
      parse_into(t, [&] {
        outcome.answer = prompt::parse_yes_no(t.response);
        return std::string(*outcome.answer ? "YES" : "NO");
      });
    }
    report += "- " + q.text.query + " -> " + (outcome.answer ? (*outcome.answer ? "YES" : "NO") : "unclear") + "\n";
    rec.detection.push_back(std::move(t));
    rec.criteria.push_back(outcome);
    if (!ok) {
      rec.errored = true;
      rec.error = rec.detection.back().error;
      return rec;
    }
  }
  rec.failure_detected = std::any_of(rec.criteria.begin(), rec.criteria.end(),
                                     [](const CriterionOutcome& c) { return c.answer && !*c.answer; });
  rec.D = rec.failure_detected == failure.has_value();

  if (!rec.failure_detected) {
    // A control episode correctly left alone needs no analysis or plan.
    rec.A = rec.P = !failure.has_value();
    return rec;
  }

  const auto catalog = task::skill_catalog();
  auto recovery = prompt::build_recovery_queries(report, catalog, current, reference);

  QueryTrace at;
  const std::string label = failure ? std::string(task::failure_label(*failure)) : std::string(task::kOtherLabel);
  if (!issue(backend, recovery[0], vlm::AnalysisTruth{label}, rng, log, at)) {
    rec.errored = true;
    rec.error = at.error;
    rec.analysis = std::move(at);
    return rec;
  }
  parse_into(at, [&] { return prompt::parse_reason(at.response, recovery[0].labels); });
  rec.analysis_label = at.parsed;
  rec.A = failure && at.parsed && *at.parsed == label;
  prompt::attach_context(recovery[1], at.response);
  rec.analysis = std::move(at);

  QueryTrace pt;
  const auto canonical = failure ? task::template_planner(rec.post_state, *failure, rec.goal) : task::RecoveryPlan{};
  if (!issue(backend, recovery[1], vlm::PlanTruth{canonical}, rng, log, pt)) {
    rec.errored = true;
    rec.error = pt.error;
    rec.planning = std::move(pt);
    return rec;
  }
  parse_into(pt, [&] {
    rec.plan = prompt::parse_plan(pt.response, catalog);
    return task::describe(*rec.plan);
  });
  if (rec.plan) {
    rec.verdict = task::validate_plan(rec.post_state, *rec.plan, rec.goal);
    rec.P = failure.has_value() && rec.verdict->valid();
  } else {
    rec.plan_error = pt.error;
  }
  rec.planning = std::move(pt);
  return rec;
}

}  // namespace vfr::control
