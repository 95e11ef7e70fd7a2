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

#include "vfr/bench/report.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "vfr/control/transcript.hpp"
#include "vfr/error.hpp"
#include "vfr/sim/json.hpp"

namespace vfr::bench {

using nlohmann::json;

namespace {

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> opt_num(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

json stat_json(const Stat& s) { return {{"n", s.n}, {"mean", opt(s.mean)}, {"median", opt(s.median)}}; }

Stat stat_from(const json& j) { return {j.at("n").get<int>(), opt_num(j.at("mean")), opt_num(j.at("median"))}; }

std::string fmt(double v, const char* spec) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string cell(const std::optional<double>& v, const char* spec = "%.4f", double scale = 1.0) {
  return v ? fmt(*v * scale, spec) : "-";
}

std::string csv_num(const std::optional<double>& v) { return v ? fmt(*v, "%.10g") : ""; }

std::string ratio(int x, int y) { return std::to_string(x) + "/" + std::to_string(y); }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string group_of(const json& header) {
  if (header.at("kind") == "motion") return header.at("variant").get<std::string>();
  if (!header.at("failure").is_null()) return header.at("failure").get<std::string>();
  return "control_" + header.at("phase").get<std::string>();
}

void add_metrics(std::vector<double>& dist, std::vector<double>& angle, std::vector<double>& cov,
                 std::vector<double>& pix, const sim::MetricSet& m) {
  if (m.distance_3d) dist.push_back(*m.distance_3d);
  if (m.angle_error) angle.push_back(*m.angle_error);
  if (m.coverage) cov.push_back(*m.coverage);
  if (m.pixel_distance) pix.push_back(*m.pixel_distance);
}

struct MotionAcc {
  MotionCell cell;
  std::vector<double> fd, bd, fa, ba, fc, bc, fp, bp;
};

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  f << text;
  if (!f) throw IoError("write failed for " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

Stat summarize(std::vector<double> values) {
  Stat s;
  s.n = static_cast<int>(values.size());
  if (values.empty()) return s;
  double sum = 0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  std::sort(values.begin(), values.end());
  const std::size_t h = values.size() / 2;
  s.median = values.size() % 2 ? values[h] : 0.5 * (values[h - 1] + values[h]);
  return s;
}

json to_json(const Report& r) {
  json motion = json::array();
  for (const auto& c : r.motion) {
    motion.push_back({{"experiment", c.experiment},
                      {"task", std::string(sim::to_string(c.task))},
                      {"variant", std::string(prompt::to_string(c.variant))},
                      {"episodes", c.episodes},
                      {"errored", c.errored},
                      {"converged", c.converged},
                      {"final_distance", stat_json(c.final_distance)},
                      {"best_distance", stat_json(c.best_distance)},
                      {"final_angle", stat_json(c.final_angle)},
                      {"best_angle", stat_json(c.best_angle)},
                      {"final_coverage", stat_json(c.final_coverage)},
                      {"best_coverage", stat_json(c.best_coverage)},
                      {"final_pixel", stat_json(c.final_pixel)},
                      {"best_pixel", stat_json(c.best_pixel)},
                      {"successes", c.successes},
                      {"success_total", c.success_total}});
  }
  json tasks = json::array();
  for (const auto& t : r.tasks) {
    tasks.push_back({{"experiment", t.experiment},
                     {"label", t.label},
                     {"episodes", t.episodes},
                     {"errored", t.errored},
                     {"D", t.detected},
                     {"A", t.analyzed},
                     {"P", t.planned}});
  }
  json eps = json::array();
  for (const auto& e : r.episodes) {
    eps.push_back({{"experiment", e.experiment},
                   {"group", e.group},
                   {"index", e.index},
                   {"seed", e.seed},
                   {"transcript", e.transcript},
                   {"errored", e.errored}});
  }
  return {{"schema_version", kReportSchemaVersion}, {"suite", r.suite}, {"motion", motion}, {"tasks", tasks},
          {"episodes", eps}};
}

Report report_from_json(const json& j) {
  if (j.value("schema_version", 0) != kReportSchemaVersion) throw ParseError("unsupported report schema_version");
  try {
    Report r;
    r.suite = j.at("suite").get<std::string>();
    for (const auto& c : j.at("motion")) {
      MotionCell m;
      m.experiment = c.at("experiment").get<std::string>();
      m.task = sim::parse_task_kind(c.at("task").get<std::string>());
      m.variant = prompt::parse_variant(c.at("variant").get<std::string>());
      m.episodes = c.at("episodes").get<int>();
      m.errored = c.at("errored").get<int>();
      m.converged = c.at("converged").get<int>();
      m.final_distance = stat_from(c.at("final_distance"));
      m.best_distance = stat_from(c.at("best_distance"));
      m.final_angle = stat_from(c.at("final_angle"));
      m.best_angle = stat_from(c.at("best_angle"));
      m.final_coverage = stat_from(c.at("final_coverage"));
      m.best_coverage = stat_from(c.at("best_coverage"));
      m.final_pixel = stat_from(c.at("final_pixel"));
      m.best_pixel = stat_from(c.at("best_pixel"));
      m.successes = c.at("successes").get<int>();
      m.success_total = c.at("success_total").get<int>();
      r.motion.push_back(std::move(m));
    }
    for (const auto& t : j.at("tasks")) {
      r.tasks.push_back({t.at("experiment").get<std::string>(), t.at("label").get<std::string>(),
                         t.at("episodes").get<int>(), t.at("errored").get<int>(), t.at("D").get<int>(),
                         t.at("A").get<int>(), t.at("P").get<int>()});
    }
    for (const auto& e : j.at("episodes")) {
      r.episodes.push_back({e.at("experiment").get<std::string>(), e.at("group").get<std::string>(),
                            e.at("index").get<int>(), e.at("seed").get<std::uint64_t>(),
                            e.at("transcript").get<std::string>(), e.at("errored").get<bool>()});
    }
    return r;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed report: ") + e.what());
  } catch (const ConfigError& e) {
    throw ParseError(std::string("malformed report: ") + e.what());
  }
}

Report aggregate(const std::string& suite, const std::vector<EpisodeRef>& refs,
                 const std::vector<std::vector<json>>& transcripts) {
  if (refs.size() != transcripts.size()) throw InternalError("aggregate: refs and transcripts differ in length");
  Report r;
  r.suite = suite;
  std::vector<MotionAcc> motion;
  std::map<std::pair<std::string, std::string>, std::size_t> motion_index;
  std::map<std::pair<std::string, std::string>, std::size_t> task_index;

  for (std::size_t i = 0; i < refs.size(); ++i) {
    EpisodeRef ref = refs[i];
    const auto& lines = transcripts[i];
    if (lines.size() < 2) throw ParseError(ref.transcript + ": transcript needs a header and a summary");
    const auto& header = lines.front();
    const auto& summary = lines.back();
    if (header.value("type", "") != "header" || summary.value("type", "") != "summary") {
      throw ParseError(ref.transcript + ": transcript must start with a header and end with a summary");
    }
    try {
      ref.group = group_of(header);
      ref.seed = header.at("seed").get<std::uint64_t>();
      const auto key = std::make_pair(ref.experiment, ref.group);
      if (header.at("kind") == "motion") {
        const bool errored = summary.at("termination").get<std::string>() == "errored";
        ref.errored = errored;
        auto [it, fresh] = motion_index.emplace(key, motion.size());
        if (fresh) {
          MotionAcc acc;
          acc.cell.experiment = ref.experiment;
          acc.cell.task = sim::parse_task_kind(header.at("task").at("kind").get<std::string>());
          acc.cell.variant = prompt::parse_variant(ref.group);
          motion.push_back(std::move(acc));
        }
        auto& acc = motion[it->second];
        ++acc.cell.episodes;
        if (errored) {
          ++acc.cell.errored;
        } else {
          const auto fin = sim::metrics_from_json(summary.at("final_metrics"));
          const auto best = sim::metrics_from_json(summary.at("best_metrics"));
          if (summary.at("termination") == "converged") ++acc.cell.converged;
          add_metrics(acc.fd, acc.fa, acc.fc, acc.fp, fin);
          add_metrics(acc.bd, acc.ba, acc.bc, acc.bp, best);
          if (fin.grasp_success) {
            ++acc.cell.success_total;
            if (*fin.grasp_success) ++acc.cell.successes;
          }
        }
      } else {
        const bool errored = summary.at("errored").get<bool>();
        ref.errored = errored;
        auto [it, fresh] = task_index.emplace(key, r.tasks.size());
        if (fresh) r.tasks.push_back({ref.experiment, ref.group, 0, 0, 0, 0, 0});
        auto& row = r.tasks[it->second];
        ++row.episodes;
        if (errored) {
          ++row.errored;
        } else {
          row.detected += summary.at("D").get<bool>();
          row.analyzed += summary.at("A").get<bool>();
          row.planned += summary.at("P").get<bool>();
        }
      }
    } catch (const json::exception& e) {
      throw ParseError(ref.transcript + ": " + e.what());
    }
    r.episodes.push_back(std::move(ref));
  }

  for (auto& acc : motion) {
    acc.cell.final_distance = summarize(std::move(acc.fd));
    acc.cell.best_distance = summarize(std::move(acc.bd));
    acc.cell.final_angle = summarize(std::move(acc.fa));
    acc.cell.best_angle = summarize(std::move(acc.ba));
    acc.cell.final_coverage = summarize(std::move(acc.fc));
    acc.cell.best_coverage = summarize(std::move(acc.bc));
    acc.cell.final_pixel = summarize(std::move(acc.fp));
    acc.cell.best_pixel = summarize(std::move(acc.bp));
    r.motion.push_back(std::move(acc.cell));
  }
  return r;
}

std::string render_markdown(const Report& r) {
  std::ostringstream os;
  os << "# " << r.suite << "\n";
  if (!r.motion.empty()) {
    // One row per prompt variant; columns are filled from whichever experiment ran that task kind.
    struct Row {
      std::string label;
      prompt::PromptVariant variant;
      std::array<std::optional<std::string>, 6> cols;
    };
    std::vector<Row> rows;
    for (const auto& c : r.motion) {
      std::size_t col = 0;
      std::string text;
      switch (c.task) {
        case sim::TaskKind::LegoAssembly: col = 0; text = cell(c.final_distance.mean); break;
        case sim::TaskKind::Rotation: col = 1; text = cell(c.final_angle.mean, "%.2f"); break;
        case sim::TaskKind::TargetReach: col = 2; text = cell(c.final_coverage.mean, "%.2f%%", 100.0); break;
        case sim::TaskKind::Grasp1D: col = 3; text = ratio(c.successes, c.success_total); break;
        case sim::TaskKind::Grasp2D: col = 4; text = ratio(c.successes, c.success_total); break;
        case sim::TaskKind::Grasp3D: col = 5; text = ratio(c.successes, c.success_total); break;
      }
      auto it = std::find_if(rows.begin(), rows.end(), [&](const Row& row) {
        return row.variant == c.variant && !row.cols[col];
      });
      if (it == rows.end()) {
        const bool taken = std::any_of(rows.begin(), rows.end(), [&](const Row& row) { return row.variant == c.variant; });
        std::string label(prompt::to_string(c.variant));
        if (taken) label += " (" + c.experiment + ")";
        rows.push_back({label, c.variant, {}});
        it = rows.end() - 1;
      }
      it->cols[col] = text;
    }
    os << "\n## Motion summary\n\n";
    os << "| Variant | Dist (m) | Angle Dist (deg) | Coverage | 1D | 2D | 3D |\n";
    os << "|---|---|---|---|---|---|---|\n";
    for (const auto& row : rows) {
      os << "| " << row.label;
      for (const auto& c : row.cols) os << " | " << c.value_or("-");
      os << " |\n";
    }

    os << "\n## Motion details\n\n";
    os << "| Experiment | Task | Variant | Episodes | Errored | Converged | Final dist mean | Final dist median | "
          "Best dist mean | Final angle mean | Best angle mean | Final coverage mean | Best coverage mean | "
          "Final pixel dist mean | Best pixel dist mean | Success |\n";
    os << "|---|---|---|---|---|---|---|---|---|---|---|---|---|---|---|---|\n";
    for (const auto& c : r.motion) {
      os << "| " << c.experiment << " | " << sim::to_string(c.task) << " | " << prompt::to_string(c.variant) << " | "
         << c.episodes << " | " << c.errored << " | " << c.converged << " | " << cell(c.final_distance.mean) << " | "
         << cell(c.final_distance.median) << " | " << cell(c.best_distance.mean) << " | "
         << cell(c.final_angle.mean, "%.2f") << " | " << cell(c.best_angle.mean, "%.2f") << " | "
         << cell(c.final_coverage.mean, "%.2f%%", 100.0) << " | " << cell(c.best_coverage.mean, "%.2f%%", 100.0)
         << " | " << cell(c.final_pixel.mean, "%.1f") << " | " << cell(c.best_pixel.mean, "%.1f") << " | "
         << (c.success_total ? ratio(c.successes, c.success_total) : "-") << " |\n";
    }
  }
  if (!r.tasks.empty()) {
    os << "\n## Task level\n\n";
    os << "| Experiment | Failure | D | A | P | Errored |\n";
    os << "|---|---|---|---|---|---|\n";
    TaskRow total;
    for (const auto& t : r.tasks) {
      const int n = t.episodes - t.errored;
      os << "| " << t.experiment << " | " << t.label << " | " << ratio(t.detected, n) << " | " << ratio(t.analyzed, n)
         << " | " << ratio(t.planned, n) << " | " << t.errored << " |\n";
      total.episodes += t.episodes;
      total.errored += t.errored;
      total.detected += t.detected;
      total.analyzed += t.analyzed;
      total.planned += t.planned;
    }
    const int n = total.episodes - total.errored;
    os << "| **Summary** | | " << ratio(total.detected, n) << " | " << ratio(total.analyzed, n) << " | "
       << ratio(total.planned, n) << " | " << total.errored << " |\n";
  }
  return os.str();
}

std::string render_motion_csv(const Report& r) {
  if (r.motion.empty()) return {};
  std::ostringstream os;
  os << "experiment,task,variant,episodes,errored,converged,final_distance_mean,final_distance_median,"
        "best_distance_mean,best_distance_median,final_angle_mean,final_angle_median,best_angle_mean,"
        "best_angle_median,final_coverage_mean,final_coverage_median,best_coverage_mean,best_coverage_median,"
        "final_pixel_mean,final_pixel_median,best_pixel_mean,best_pixel_median,successes,success_total\n";
  for (const auto& c : r.motion) {
    os << csv_field(c.experiment) << ',' << sim::to_string(c.task) << ',' << prompt::to_string(c.variant) << ','
       << c.episodes << ',' << c.errored << ',' << c.converged;
    for (const Stat* s : {&c.final_distance, &c.best_distance, &c.final_angle, &c.best_angle, &c.final_coverage,
                          &c.best_coverage, &c.final_pixel, &c.best_pixel}) {
      os << ',' << csv_num(s->mean) << ',' << csv_num(s->median);
    }
    os << ',' << c.successes << ',' << c.success_total << '\n';
  }
  return os.str();
}

std::string render_task_csv(const Report& r) {
  if (r.tasks.empty()) return {};
  std::ostringstream os;
  os << "experiment,failure,episodes,errored,D,A,P\n";
  for (const auto& t : r.tasks) {
    os << csv_field(t.experiment) << ',' << t.label << ',' << t.episodes << ',' << t.errored << ',' << t.detected
       << ',' << t.analyzed << ',' << t.planned << '\n';
  }
  return os.str();
}

std::optional<std::string> emit_report(const Report& r, const std::vector<ReportFormat>& formats,
                                       const std::filesystem::path& dir) {
  if (r.motion.empty() && r.tasks.empty()) return "report for suite '" + r.suite + "' is empty; nothing written";
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  write_text(dir / "report.json", to_json(r).dump(2) + "\n");
  for (auto f : formats) {
    if (f == ReportFormat::Markdown) {
      write_text(dir / "report.md", render_markdown(r));
    } else {
      if (!r.motion.empty()) write_text(dir / "motion.csv", render_motion_csv(r));
      if (!r.tasks.empty()) write_text(dir / "task.csv", render_task_csv(r));
    }
  }
  return std::nullopt;
}

VerifyResult verify_report(const std::filesystem::path& dir) {
  const auto path = dir / "report.json";
  if (!std::filesystem::exists(path)) return {false, "no report.json in " + dir.string()};
  Report stored;
  try {
    stored = report_from_json(json::parse(read_text(path)));
  } catch (const json::exception& e) {
    return {false, path.string() + ": " + e.what()};
  }
  std::vector<EpisodeRef> refs;
  std::vector<std::vector<json>> transcripts;
  for (const auto& e : stored.episodes) {
    EpisodeRef ref{e.experiment, {}, e.index, 0, e.transcript, false};
    refs.push_back(ref);
    transcripts.push_back(control::read_jsonl(dir / e.transcript));
  }
  const auto recomputed = aggregate(stored.suite, refs, transcripts);
  if (to_json(recomputed) != to_json(stored)) {
    const auto patch = json::diff(to_json(stored), to_json(recomputed));
    return {false, "aggregates differ from report.json: " + patch.dump()};
  }
  const std::array<std::pair<const char*, std::string>, 3> rendered{{
      {"report.md", render_markdown(recomputed)},
      {"motion.csv", render_motion_csv(recomputed)},
      {"task.csv", render_task_csv(recomputed)},
  }};
  for (const auto& [name, text] : rendered) {
    const auto p = dir / name;
    if (!std::filesystem::exists(p)) continue;
    if (read_text(p) != text) return {false, std::string(name) + " does not match the recomputed aggregates"};
  }
  return {true, "recomputed " + std::to_string(stored.episodes.size()) + " episode(s); report matches"};
}

}  // namespace vfr::bench
