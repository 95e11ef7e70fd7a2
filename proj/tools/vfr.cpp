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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <unistd.h>

#include <CLI11.hpp>

#include "vfr/bench/config.hpp"
#include "vfr/bench/report.hpp"
#include "vfr/bench/suite.hpp"
#include "vfr/control/transcript.hpp"
#include "vfr/error.hpp"
#include "vfr/prompt/prompt.hpp"
#include "vfr/raster/png.hpp"
#include "vfr/sim/scene.hpp"

namespace {

enum Exit { kOk = 0, kMismatch = 1, kConfig = 2, kIo = 3, kBackend = 4, kInternal = 5 };

int run_cmd(const std::string& config, int workers, const std::optional<std::string>& backend,
            const std::optional<std::uint64_t>& seed, const std::optional<std::string>& out) {
  auto cfg = vfr::bench::load_config(config);
  vfr::bench::Overrides o;
  o.backend = backend;
  o.seed = seed;
  if (out) o.out = *out;
  vfr::bench::apply_overrides(cfg, o);
  if (cfg.experiments.empty()) {
    std::cerr << "warning: config has no experiments; nothing to run\n";
    return kOk;
  }
  vfr::bench::SuiteOptions opts;
  opts.workers = workers;
  const bool tty = isatty(fileno(stderr));
  opts.progress = [tty](std::size_t done, std::size_t total) {
    if (tty && (done % 10 == 0 || done == total)) std::fprintf(stderr, "\r%zu/%zu episodes", done, total);
  };
  const auto report = vfr::bench::run_suite(cfg, opts);
  if (tty) std::fprintf(stderr, "\n");
  if (const auto warning = vfr::bench::emit_report(report, cfg.formats, cfg.output_dir)) {
    std::cerr << "warning: " << *warning << "\n";
    return kOk;
  }
  int errored = 0;
  for (const auto& e : report.episodes) errored += e.errored;
  std::cout << vfr::bench::render_markdown(report);
  std::cout << "\nwrote " << report.episodes.size() << " transcript(s) to " << cfg.output_dir.string();
  if (errored) std::cout << " (" << errored << " errored, excluded from aggregates)";
  std::cout << "\n";
  return kOk;
}

int verify_cmd(const std::string& dir) {
  const auto r = vfr::bench::verify_report(dir);
  std::cout << (r.ok ? "OK: " : "MISMATCH: ") << r.message << "\n";
  return r.ok ? kOk : kMismatch;
}

int render_cmd(const std::string& task, const std::string& variant_name, std::uint64_t seed,
               const std::optional<std::string>& out) {
  if (task == "assembly") {
    std::cout << vfr::prompt::render_task_prompt_catalog();
    return kOk;
  }
  const auto kind = vfr::sim::parse_task_kind(task);
  const auto variant = vfr::prompt::parse_variant(variant_name);
  std::cout << vfr::prompt::render_prompt_catalog(kind, variant);
  if (out) {
    std::filesystem::create_directories(*out);
    const auto scene = vfr::sim::init_scene(vfr::sim::default_task(kind), seed);
    for (const auto& img : vfr::prompt::motion_images(scene, variant)) {
      const auto path = std::filesystem::path(*out) / (task + "_" + variant_name + "_" + img.tag + ".png");
      vfr::raster::write_png(path, *img.image);
      std::cout << "wrote " << path.string() << "\n";
    }
  }
  return kOk;
}

int replay_cmd(const std::string& transcript) {
  const auto lines = vfr::control::read_jsonl(transcript);
  const auto r = vfr::control::replay_transcript(lines);
  if (r.identical) {
    std::cout << "OK: replay reproduced " << lines.size() << " line(s)\n";
    return kOk;
  }
  std::cout << "MISMATCH: " << r.difference << "\n";
  return kMismatch;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Visual feedback robot control benchmark"};
  app.require_subcommand(1);

  int workers = 1;
  std::optional<std::string> backend;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::string config, report_dir, task, variant, transcript;

  auto* run = app.add_subcommand("run", "Run every experiment in a suite config and emit the report");
  run->add_option("config", config, "Suite config (JSON)")->required()->check(CLI::ExistingFile);
  run->add_option("--workers", workers, "Episodes run concurrently")->check(CLI::PositiveNumber);
  run->add_option("--backend", backend, "Override every experiment's backend")
      ->check(CLI::IsMember({"oracle", "live"}));
  run->add_option("--seed", seed, "Override every experiment's base seed");
  run->add_option("--out", out, "Override the output directory");

  auto* verify = app.add_subcommand("verify", "Recompute a report from its transcripts and compare");
  verify->add_option("report-dir", report_dir, "Directory holding report.json")->required()->check(CLI::ExistingDirectory);

  std::uint64_t render_seed = 0;
  auto* render = app.add_subcommand("render-prompts", "Print the prompts a variant sends for a task");
  render->add_option("task", task, "Motion task kind, or 'assembly' for the task-level prompts")->required();
  render->add_option("variant", variant, "original, relative, relative_decomposed or full")->required();
  render->add_option("--seed", render_seed, "Scene seed for rendered images");
  render->add_option("--out", out, "Also write the prompt images here");

  auto* replay = app.add_subcommand("replay", "Re-run a transcript with its recorded responses");
  replay->add_option("transcript", transcript, "Episode transcript (JSONL)")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return run_cmd(config, workers, backend, seed, out);
    if (*verify) return verify_cmd(report_dir);
    if (*render) return render_cmd(task, variant, render_seed, out);
    if (*replay) return replay_cmd(transcript);
  } catch (const vfr::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const vfr::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kConfig;
  } catch (const vfr::IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kIo;
  } catch (const vfr::BackendError& e) {
    std::cerr << "backend error: " << e.what() << "\n";
    return kBackend;
  } catch (const vfr::BackendUnavailable& e) {
    std::cerr << "backend unavailable: " << e.what() << "\n";
    return kBackend;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kOk;
}
