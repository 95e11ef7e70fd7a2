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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <unistd.h>

#include "vfr/bench/config.hpp"
#include "vfr/bench/report.hpp"
#include "vfr/bench/suite.hpp"
#include "vfr/control/transcript.hpp"
#include "vfr/error.hpp"

using namespace vfr;
using namespace vfr::bench;
namespace fs = std::filesystem;

namespace {

class BenchTest : public ::testing::Test {
 protected:
  void SetUp() override {
    root_ = fs::temp_directory_path() /
            ("vfr_bench_" + std::to_string(::getpid()) + "_" +
             ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(root_);
    fs::create_directories(root_);
    fs::copy_file(fs::path(VFR_SOURCE_DIR) / "configs" / "structures.json", root_ / "structures.json");
  }
  void TearDown() override { fs::remove_all(root_); }

  fs::path write(const std::string& name, const std::string& text) const {
    std::ofstream(root_ / name) << text;
    return root_ / name;
  }

  /// Loads a config and asserts it fails with a message containing every needle.
  void expect_config_error(const std::string& text, std::initializer_list<std::string> needles) const {
    const auto path = write("c.json", text);
    try {
      load_config(path);
      ADD_FAILURE() << "expected ConfigError";
    } catch (const ConfigError& e) {
      for (const auto& n : needles) EXPECT_NE(std::string(e.what()).find(n), std::string::npos) << e.what();
    }
  }

  fs::path root_;
};

/// Small mixed suite: two motion variants and a task experiment with controls.
std::string mixed_suite(const std::string& out, const std::string& order = "motion_first") {
  const std::string motion = R"({
      "id": "grasp",
      "type": "motion",
      "task": "grasp_2d",
      "variants": ["relative", "full"],
      "episodes": 6,
      "base_seed": 40,
      "backend": {"kind": "oracle", "seed": 3, "knobs": {"axis_accuracy": 0.8}}
    })";
  const std::string task = R"({
      "id": "failures",
      "type": "task",
      "episodes": 4,
      "base_seed": 70,
      "controls": true,
      "failures": ["fail_to_pick", "structure_collapse"],
      "backend": {"kind": "oracle", "seed": 5, "knobs": {"detection_accuracy": 0.9, "plan_accuracy": 0.8}}
    })";
  const std::string exps = order == "motion_first" ? motion + "," + task : task + "," + motion;
  return R"({
  "schema_version": 1,
  "suite": "mixed",
  "output_dir": ")" +
         out + R"(",
  "structures": "structures.json",
  "experiments": [)" +
         exps + "]\n}\n";
}

std::map<std::string, std::string> read_tree(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    out[fs::relative(e.path(), dir).string()] = ss.str();
  }
  return out;
}

}  // namespace

TEST_F(BenchTest, ZeroEpisodesNamesFileLineAndField) {
  expect_config_error(R"({
  "schema_version": 1,
  "suite": "s",
  "experiments": [
    {
      "id": "a", "type": "motion", "task": "grasp_1d",
      "episodes": 0
    }
  ]
})",
                      {"c.json:7", "/experiments/0/episodes", "at least 1"});
}

TEST_F(BenchTest, UndefinedStructureSetIsRejected) {
  expect_config_error(R"({
  "schema_version": 1,
  "suite": "s",
  "structures": "structures.json",
  "experiments": [{"id": "t", "type": "task", "episodes": 1, "structure_sets": ["tower", "pyramid"]}]
})",
                      {"c.json:5", "undefined structure set 'pyramid'"});
}

TEST_F(BenchTest, UnknownFieldIsRejectedWithItsLine) {
  expect_config_error(R"({
  "schema_version": 1,
  "suite": "s",
  "experimnts": []
})",
                      {"c.json:4", "/experimnts", "unrecognized field"});
  expect_config_error(R"({
  "schema_version": 1,
  "suite": "s",
  "experiments": [{"id": "a", "type": "motion", "task": "grasp_1d", "episodes": 1,
                   "backend": {"kind": "oracle", "knobs": {"axis_acuracy": 0.5}}}]
})",
                      {"c.json:5", "axis_acuracy"});
}

TEST_F(BenchTest, OtherConfigErrors) {
  expect_config_error(R"({"schema_version": 2, "suite": "s", "experiments": []})", {"schema_version"});
  expect_config_error(R"({"schema_version": 1, "suite": "s", "experiments": [)", {"c.json"});
  expect_config_error(R"({"schema_version": 1, "suite": "s", "experiments": [
    {"id": "a", "type": "motion", "task": "juggling", "episodes": 1}]})",
                      {"c.json:2", "juggling"});
  expect_config_error(R"({"schema_version": 1, "suite": "s", "experiments": [
    {"id": "a", "type": "motion", "task": "grasp_1d", "episodes": 1},
    {"id": "a", "type": "motion", "task": "grasp_1d", "episodes": 1}]})",
                      {"duplicate", "'a'"});
  expect_config_error(R"({"schema_version": 1, "suite": "s", "experiments": [
    {"id": "a", "type": "motion", "task": "grasp_1d", "episodes": 1,
     "backend": {"kind": "oracle", "knobs": {"axis_accuracy": 1.5}}}]})",
                      {"c.json:3", "axis_accuracy"});
}

TEST_F(BenchTest, LiveOverrideWithoutLiveSectionIsConfigError) {
  auto cfg = load_config(write("c.json", mixed_suite("out")));
  Overrides o;
  o.backend = "live";
  EXPECT_THROW(apply_overrides(cfg, o), ConfigError);
}

TEST_F(BenchTest, OverridesReplaceSeedAndOutput) {
  auto cfg = load_config(write("c.json", mixed_suite("out")));
  EXPECT_EQ(cfg.output_dir, root_ / "out");
  Overrides o;
  o.seed = 99;
  o.out = root_ / "elsewhere";
  apply_overrides(cfg, o);
  for (const auto& e : cfg.experiments) EXPECT_EQ(e.base_seed, 99u);
  EXPECT_EQ(cfg.output_dir, root_ / "elsewhere");
}

TEST_F(BenchTest, DefaultsFillTaskExperiment) {
  const auto cfg = load_config(write("c.json", R"({"schema_version": 1, "suite": "s",
    "structures": "structures.json",
    "experiments": [{"id": "t", "type": "task", "episodes": 2}]})"));
  ASSERT_EQ(cfg.experiments.size(), 1u);
  const auto& t = cfg.experiments[0].task;
  EXPECT_EQ(t.failures.size(), 8u);
  EXPECT_EQ(t.structure_sets.size(), 3u);
  EXPECT_FALSE(t.controls);
  EXPECT_TRUE(std::holds_alternative<vlm::OracleConfig>(cfg.experiments[0].backend));
}

TEST_F(BenchTest, RunIsByteIdenticalAcrossWorkerCounts) {
  auto cfg = load_config(write("c.json", mixed_suite("w1")));
  const auto r1 = run_suite(cfg, {1, {}});
  ASSERT_FALSE(emit_report(r1, cfg.formats, cfg.output_dir));
  cfg.output_dir = root_ / "w4";
  const auto r4 = run_suite(cfg, {4, {}});
  ASSERT_FALSE(emit_report(r4, cfg.formats, cfg.output_dir));
  EXPECT_EQ(r1, r4);
  const auto a = read_tree(root_ / "w1");
  const auto b = read_tree(root_ / "w4");
  EXPECT_EQ(a, b);
  // 2 variants x 6 + (2 failures + 2 controls) x 4 transcripts, plus report files.
  EXPECT_EQ(r1.episodes.size(), 12u + 16u);
  EXPECT_TRUE(a.count("report.json") && a.count("report.md") && a.count("motion.csv") && a.count("task.csv"));
  EXPECT_TRUE(a.count("grasp/full/ep_0000.jsonl"));
  EXPECT_TRUE(a.count("failures/control_place/ep_0003.jsonl"));
}

TEST_F(BenchTest, RepeatedRunsAreByteIdentical) {
  auto cfg = load_config(write("c.json", mixed_suite("a")));
  ASSERT_FALSE(emit_report(run_suite(cfg, {2, {}}), cfg.formats, cfg.output_dir));
  cfg.output_dir = root_ / "b";
  ASSERT_FALSE(emit_report(run_suite(cfg, {2, {}}), cfg.formats, cfg.output_dir));
  EXPECT_EQ(read_tree(root_ / "a"), read_tree(root_ / "b"));
}

TEST_F(BenchTest, ExperimentOrderDoesNotChangeResults) {
  auto first = load_config(write("a.json", mixed_suite("a", "motion_first")));
  auto second = load_config(write("b.json", mixed_suite("b", "task_first")));
  const auto ra = run_suite(first);
  const auto rb = run_suite(second);
  EXPECT_EQ(ra.motion, rb.motion);
  EXPECT_EQ(ra.tasks, rb.tasks);
  ASSERT_FALSE(emit_report(ra, first.formats, first.output_dir));
  ASSERT_FALSE(emit_report(rb, second.formats, second.output_dir));
  const auto ta = read_tree(root_ / "a");
  const auto tb = read_tree(root_ / "b");
  for (const auto& [path, content] : ta) {
    if (path.ends_with(".jsonl")) EXPECT_EQ(tb.at(path), content) << path;
  }
}

TEST_F(BenchTest, VerifyAcceptsAFreshReportAndCatchesTampering) {
  auto cfg = load_config(write("c.json", mixed_suite("out")));
  ASSERT_FALSE(emit_report(run_suite(cfg), cfg.formats, cfg.output_dir));
  const auto dir = cfg.output_dir;
  const auto ok = verify_report(dir);
  ASSERT_TRUE(ok.ok) << ok.message;

  // Changing a stored aggregate is caught.
  auto report = nlohmann::json::parse(std::ifstream(dir / "report.json"));
  const auto original = report;
  report["tasks"][0]["D"] = report["tasks"][0]["D"].get<int>() + 1;
  std::ofstream(dir / "report.json") << report.dump(2);
  EXPECT_FALSE(verify_report(dir).ok);
  std::ofstream(dir / "report.json") << original.dump(2) << "\n";
  ASSERT_TRUE(verify_report(dir).ok) << verify_report(dir).message;

  // So is an edited transcript summary.
  const auto path = dir / "failures" / "fail_to_pick" / "ep_0000.jsonl";
  auto lines = control::read_jsonl(path);
  auto& summary = lines.back();
  summary["D"] = !summary["D"].get<bool>();
  control::write_jsonl(path, lines);
  EXPECT_FALSE(verify_report(dir).ok);
}

TEST_F(BenchTest, VerifyCatchesEditedRenderedTables) {
  auto cfg = load_config(write("c.json", mixed_suite("out")));
  ASSERT_FALSE(emit_report(run_suite(cfg), cfg.formats, cfg.output_dir));
  std::ofstream(cfg.output_dir / "report.md", std::ios::app) << "\nextra\n";
  const auto r = verify_report(cfg.output_dir);
  EXPECT_FALSE(r.ok);
  EXPECT_NE(r.message.find("report.md"), std::string::npos) << r.message;
}

TEST_F(BenchTest, EmptyReportWarnsAndWritesNothing) {
  const auto dir = root_ / "empty";
  const auto warning = emit_report(Report{"s", {}, {}, {}}, {ReportFormat::Markdown, ReportFormat::Csv}, dir);
  ASSERT_TRUE(warning);
  EXPECT_FALSE(warning->empty());
  EXPECT_FALSE(fs::exists(dir / "report.json"));
}

TEST_F(BenchTest, UnwritableOutputDirectoryIsIoErrorBeforeAnyEpisode) {
  write("blocker", "x");
  auto cfg = load_config(write("c.json", mixed_suite("blocker/out")));
  int progress_calls = 0;
  SuiteOptions opts;
  opts.progress = [&](std::size_t, std::size_t) { ++progress_calls; };
  EXPECT_THROW(run_suite(cfg, opts), IoError);
  EXPECT_EQ(progress_calls, 0);
}

TEST_F(BenchTest, ErroredEpisodesAreCountedAndExcluded) {
  ::setenv("VFR_BENCH_TEST_TOKEN", "t", 1);
  auto cfg = load_config(write("c.json", R"({"schema_version": 1, "suite": "s", "output_dir": "out",
    "live": {"kind": "live", "endpoint": "http://127.0.0.1:9/v1/chat/completions", "model": "m",
             "token_env": "VFR_BENCH_TEST_TOKEN", "retries": 0, "timeout_s": 1},
    "experiments": [{"id": "a", "type": "motion", "task": "grasp_1d", "variants": ["full"], "episodes": 3}]})"));
  Overrides o;
  o.backend = "live";
  apply_overrides(cfg, o);
  const auto r = run_suite(cfg);
  ::unsetenv("VFR_BENCH_TEST_TOKEN");
  ASSERT_EQ(r.motion.size(), 1u);
  EXPECT_EQ(r.motion[0].episodes, 3);
  EXPECT_EQ(r.motion[0].errored, 3);
  EXPECT_EQ(r.motion[0].final_distance.n, 0);
  EXPECT_FALSE(r.motion[0].final_distance.mean);
  for (const auto& e : r.episodes) EXPECT_TRUE(e.errored);
}

TEST(Report, SummarizeMeanAndMedian) {
  const auto odd = summarize({3, 1, 2});
  EXPECT_EQ(odd.n, 3);
  EXPECT_DOUBLE_EQ(*odd.mean, 2);
  EXPECT_DOUBLE_EQ(*odd.median, 2);
  const auto even = summarize({4, 1, 2, 10});
  EXPECT_DOUBLE_EQ(*even.mean, 4.25);
  EXPECT_DOUBLE_EQ(*even.median, 3);
  const auto none = summarize({});
  EXPECT_EQ(none.n, 0);
  EXPECT_FALSE(none.mean || none.median);
}

TEST(Report, JsonRoundTripAndLayout) {
  Report r;
  r.suite = "s";
  MotionCell c;
  c.experiment = "e";
  c.task = sim::TaskKind::Grasp3D;
  c.variant = prompt::PromptVariant::Relative;
  c.episodes = 2;
  c.final_distance = summarize({0.01, 0.03});
  c.successes = 1;
  c.success_total = 2;
  r.motion.push_back(c);
  r.tasks.push_back({"t", "fail_to_pick", 5, 1, 4, 3, 2});
  r.episodes.push_back({"e", "relative", 0, 7, "e/relative/ep_0000.jsonl", false});
  EXPECT_EQ(report_from_json(to_json(r)), r);

  const auto md = render_markdown(r);
  EXPECT_NE(md.find("Motion summary"), std::string::npos);
  EXPECT_NE(md.find("| Variant | Dist (m) | Angle Dist (deg) | Coverage | 1D | 2D | 3D |"), std::string::npos) << md;
  EXPECT_NE(md.find("Task level"), std::string::npos);
  EXPECT_NE(md.find("**Summary**"), std::string::npos);
  EXPECT_NE(render_task_csv(r).find("fail_to_pick"), std::string::npos);
  EXPECT_NE(render_motion_csv(r).find("relative"), std::string::npos);
  EXPECT_TRUE(render_task_csv(Report{}).empty());
}

TEST(Suite, TaskEpisodeStateCyclesTheCursor) {
  const std::vector<task::RefBlock> ref{{task::BlockColor::Green, {2, 0}},
                                        {task::BlockColor::Red, {2, 1}},
                                        {task::BlockColor::Blue, {2, 2}}};
  for (int round = 0; round < 7; ++round) {
    const auto s = task_episode_state(ref, round, task::Phase::Place);
    EXPECT_EQ(s.cursor, static_cast<std::size_t>(round % 3));
    EXPECT_EQ(s.built.size(), s.cursor);
    EXPECT_EQ(s.holding.size(), 1u);
  }
}
