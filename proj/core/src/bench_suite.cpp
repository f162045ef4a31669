// Copyright 2026 The vidnav Authors.
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


#include "vidnav/bench_suite.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include <json.hpp>

#include "vidnav/error.hpp"
#include "vidnav/io.hpp"

namespace vidnav::bench {
namespace {

using nlohmann::json;

struct Row {
  int line = 0;
  std::vector<std::string> fields;
};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

// RFC 4180-style fields: commas separate, double quotes group, "" escapes.
std::vector<Row> parse_csv(const std::string& text) {
  std::vector<Row> rows;
  std::istringstream in(text);
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (trim(line).empty() || trim(line).front() == '#') continue;
    Row row{n, {}};
    std::string field;
    bool quoted = false;
    for (size_t i = 0; i < line.size(); ++i) {
      const char c = line[i];
      if (quoted) {
        if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else if (c == '"') {
          quoted = false;
        } else {
          field += c;
        }
      } else if (c == '"') {
        quoted = true;
      } else if (c == ',') {
        row.fields.push_back(trim(field));
        field.clear();
      } else {
        field += c;
      }
    }
    if (quoted) throw ParseError("unterminated quote on line " + std::to_string(n), line);
    row.fields.push_back(trim(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

void expect_header(const std::vector<Row>& rows, std::initializer_list<const char*> names) {
  if (rows.empty()) throw ParseError("missing header row", "");
  const Row& h = rows.front();
  bool ok = h.fields.size() == names.size();
  size_t i = 0;
  for (const char* name : names) {
    ok = ok && (i >= h.fields.size() || lower(h.fields[i]) == name);
    ++i;
  }
  if (!ok) {
    std::string want;
    for (const char* name : names) want += std::string(want.empty() ? "" : ",") + name;
    throw ParseError("expected header '" + want + "'", "line " + std::to_string(h.line));
  }
}

double score_field(const Row& row, size_t i) {
  const std::string& s = row.fields[i];
  size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size() || !std::isfinite(v)) {
    throw ParseError("bad number '" + s + "' on line " + std::to_string(row.line),
                     "line " + std::to_string(row.line));
  }
  if (v < 0.0 || v > 1.0) {
    throw ParseError("score " + s + " outside [0, 1] on line " + std::to_string(row.line),
                     "line " + std::to_string(row.line));
  }
  return v;
}

void check_width(const Row& row, size_t n) {
  if (row.fields.size() != n) {
    throw ParseError("expected " + std::to_string(n) + " fields on line " +
                         std::to_string(row.line),
                     "line " + std::to_string(row.line));
  }
}

std::string fixed2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string pad(std::string s, size_t width) {
  // Column widths count code points, not bytes.
  size_t cps = 0;
  for (unsigned char c : s) cps += (c & 0xC0) != 0x80;
  if (cps < width) s.append(width - cps, ' ');
  return s;
}

Metrics mean_of(const std::vector<Metrics>& v) {
  Metrics m;
  for (const Metrics& x : v) {
    m.vc += x.vc;
    m.df += x.df;
    m.tc += x.tc;
  }
  const double n = static_cast<double>(v.size());
  return {m.vc / n, m.df / n, m.tc / n};
}

void finish_average(ModelAggregate& m, std::vector<std::string>& warnings) {
  if (m.categories.size() == kCategories.size()) {
    std::vector<Metrics> values;
    for (Category c : kCategories) values.push_back(m.categories.at(c));
    m.average = mean_of(values);
  } else {
    warnings.push_back(m.model + ": average omitted, " +
                       std::to_string(kCategories.size() - m.categories.size()) +
                       " categories have no complete task");
  }
}

json metrics_json(const Metrics& m) { return {{"vc", m.vc}, {"df", m.df}, {"tc", m.tc}}; }

constexpr const char* kCategoryNames[] = {"ObjectNavigation", "PreciseNavigation",
                                          "SpatialGrounding", "LanguageControl",
                                          "SceneReasoning"};
constexpr const char* kCategoryLabels[] = {"Object Navigation", "Precise Navigation",
                                           "Spatial Grounding", "Language Control",
                                           "Scene Reasoning"};

}  // namespace

std::string_view to_string(Category category) {
  return kCategoryNames[static_cast<size_t>(category)];
}

Category parse_category(std::string_view name) {
  std::string key;
  for (unsigned char c : name) {
    if (std::isalnum(c)) key += static_cast<char>(std::tolower(c));
  }
  for (size_t i = 0; i < std::size(kCategoryNames); ++i) {
    if (lower(kCategoryNames[i]) == key) return static_cast<Category>(i);
  }
  throw Error(ErrorCode::kInput, "unknown task category '" + std::string(name) + "'");
}

std::vector<TaskSpec> load_suite() {
  using C = Category;
  return {
      {C::kObjectNavigation, "Find Chair", "Navigate to the black chair and stop directly in front."},
      {C::kObjectNavigation, "Find Column",
       "Navigate to the white round column and stop directly in front."},
      {C::kObjectNavigation, "Find Tree", "Navigate to the green tree and stop directly in front."},
      {C::kPreciseNavigation, "Above Cabinet",
       "Fly forward and upward to stop 0.5m above the cabinet center."},
      {C::kPreciseNavigation, "Behind Rock",
       "Orbit the large rock to its rear while keeping gaze on the target."},
      {C::kPreciseNavigation, "Left of Tree",
       "Move left past the tree until it is completely out of the frame."},
      {C::kSpatialGrounding, "Circle Orbit", "Perform a 180-degree orbit around the tree."},
      {C::kSpatialGrounding, "Gate Traversal",
       "Pass through the center of the circular hoop to the space beyond."},
      {C::kSpatialGrounding, "Midline Stop",
       "Advance and stop on the line connecting the pillar and the tree."},
      {C::kLanguageControl, "Timed Stop",
       "Accelerate for 3s toward the tree, then hover stationary for 2s."},
      {C::kLanguageControl, "Round Trip",
       "Approach the plants and retrace the path back to the starting position."},
      {C::kLanguageControl, "Turn and Advance",
       "Rotate 45° to the right and fly straight forward across the room."},
      {C::kSceneReasoning, "Find Kitchen",
       "Identify scene features and navigate to the room suitable for cooking."},
      {C::kSceneReasoning, "Find Exit",
       "Observe environment markers to locate and navigate toward the exit."},
      {C::kSceneReasoning, "Find Bathroom",
       "Identify scene features and navigate to the room for showering."},
  };
}

std::vector<TaskSpec> parse_suite(const std::string& csv) {
  const auto rows = parse_csv(csv);
  expect_header(rows, {"category", "name", "instruction"});
  std::vector<TaskSpec> out;
  std::set<std::string> names;
  for (size_t i = 1; i < rows.size(); ++i) {
    check_width(rows[i], 3);
    TaskSpec t{parse_category(rows[i].fields[0]), rows[i].fields[1], rows[i].fields[2]};
    if (t.name.empty() || t.instruction.empty()) {
      throw ParseError("empty task name or instruction", "line " + std::to_string(rows[i].line));
    }
    if (!names.insert(t.name).second) {
      throw ParseError("duplicate task '" + t.name + "'", "line " + std::to_string(rows[i].line));
    }
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<TaskSpec> load_suite_file(const std::filesystem::path& path) {
  return parse_suite(read_text_file(path));
}

std::vector<TrialScore> parse_trial_scores(const std::string& csv) {
  const auto rows = parse_csv(csv);
  expect_header(rows, {"model", "task", "trial", "vc", "df", "tc"});
  std::vector<TrialScore> out;
  for (size_t i = 1; i < rows.size(); ++i) {
    const Row& r = rows[i];
    check_width(r, 6);
    TrialScore s;
    s.model = r.fields[0];
    s.task = r.fields[1];
    try {
      size_t used = 0;
      s.trial = std::stoi(r.fields[2], &used);
      if (used != r.fields[2].size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ParseError("bad trial index on line " + std::to_string(r.line),
                       "line " + std::to_string(r.line));
    }
    s.scores = {score_field(r, 3), score_field(r, 4), score_field(r, 5)};
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<CategoryScore> parse_category_scores(const std::string& csv) {
  const auto rows = parse_csv(csv);
  expect_header(rows, {"model", "category", "vc", "df", "tc"});
  std::vector<CategoryScore> out;
  for (size_t i = 1; i < rows.size(); ++i) {
    const Row& r = rows[i];
    check_width(r, 5);
    out.push_back(CategoryScore{r.fields[0], parse_category(r.fields[1]),
                                {score_field(r, 2), score_field(r, 3), score_field(r, 4)}});
  }
  return out;
}

std::vector<SummaryRow> parse_summary_rows(const std::string& csv) {
  const auto rows = parse_csv(csv);
  if (rows.empty()) throw ParseError("missing header row", "");
  check_width(rows.front(), 4);
  std::vector<SummaryRow> out;
  for (size_t i = 1; i < rows.size(); ++i) {
    const Row& r = rows[i];
    check_width(r, 4);
    out.push_back(SummaryRow{r.fields[0], {score_field(r, 1), score_field(r, 2), score_field(r, 3)}});
  }
  return out;
}

ScoreFileKind detect_score_file(const std::string& csv) {
  const auto rows = parse_csv(csv);
  if (rows.empty()) throw ParseError("empty score file", "");
  std::vector<std::string> h;
  for (const auto& f : rows.front().fields) h.push_back(lower(f));
  if (h.size() == 6 && h[0] == "model" && h[1] == "task") return ScoreFileKind::kTrials;
  if (h.size() == 5 && h[0] == "model" && h[1] == "category") return ScoreFileKind::kCategories;
  if (h.size() == 4 && h[1] == "vc" && h[2] == "df" && h[3] == "tc") return ScoreFileKind::kSummary;
  throw ParseError("unrecognized score file header", "line " + std::to_string(rows.front().line));
}

Aggregates aggregate(std::span<const TrialScore> scores, std::span<const TaskSpec> suite,
                     int expected_trials) {
  if (expected_trials < 1) throw Error(ErrorCode::kArgument, "expected_trials must be >= 1");
  Aggregates out;
  std::vector<std::string> models;
  for (const TrialScore& s : scores) {
    if (std::find(models.begin(), models.end(), s.model) == models.end()) {
      models.push_back(s.model);
    }
    auto task = std::find_if(suite.begin(), suite.end(),
                             [&](const TaskSpec& t) { return t.name == s.task; });
    if (task == suite.end()) throw Error(ErrorCode::kInput, "unknown task '" + s.task + "'");
    const Metrics& m = s.scores;
    for (double v : {m.vc, m.df, m.tc}) {
      if (!(v >= 0.0 && v <= 1.0)) {
        throw Error(ErrorCode::kInput, "score outside [0, 1] for " + s.model + "/" + s.task);
      }
    }
    if (s.trial < 1 || s.trial > expected_trials) {
      throw Error(ErrorCode::kInput, "trial index " + std::to_string(s.trial) + " outside [1, " +
                                         std::to_string(expected_trials) + "] for " + s.model +
                                         "/" + s.task);
    }
  }
  for (const std::string& model : models) {
    ModelAggregate agg;
    agg.model = model;
    std::map<Category, std::vector<Metrics>> per_category;
    for (const TaskSpec& task : suite) {
      std::vector<Metrics> trials;
      std::set<int> seen;
      for (const TrialScore& s : scores) {
        if (s.model != model || s.task != task.name) continue;
        if (!seen.insert(s.trial).second) {
          throw Error(ErrorCode::kInput, "duplicate trial " + std::to_string(s.trial) + " for " +
                                             model + "/" + task.name);
        }
        trials.push_back(s.scores);
      }
      if (trials.empty()) continue;
      TaskAggregate t;
      t.task = task.name;
      t.category = task.category;
      t.trials = static_cast<int>(trials.size());
      t.complete = t.trials == expected_trials;
      t.mean = mean_of(trials);
      if (t.complete) {
        per_category[task.category].push_back(t.mean);
      } else {
        out.warnings.push_back(model + "/" + task.name + ": incomplete (" +
                               std::to_string(t.trials) + " of " +
                               std::to_string(expected_trials) + " trials), excluded");
      }
      agg.tasks.push_back(std::move(t));
    }
    for (const auto& [category, values] : per_category) {
      agg.categories[category] = mean_of(values);
    }
    finish_average(agg, out.warnings);
    out.models.push_back(std::move(agg));
  }
  return out;
}

Aggregates aggregate_categories(std::span<const CategoryScore> scores) {
  Aggregates out;
  for (const CategoryScore& s : scores) {
    auto it = std::find_if(out.models.begin(), out.models.end(),
                           [&](const ModelAggregate& m) { return m.model == s.model; });
    if (it == out.models.end()) {
      out.models.push_back(ModelAggregate{s.model, {}, {}, std::nullopt});
      it = std::prev(out.models.end());
    }
    if (!it->categories.emplace(s.category, s.scores).second) {
      throw Error(ErrorCode::kInput, "duplicate category " + std::string(to_string(s.category)) +
                                         " for " + s.model);
    }
  }
  for (ModelAggregate& m : out.models) finish_average(m, out.warnings);
  return out;
}

std::string render_table(const Aggregates& a) {
  const size_t w0 = 20, w1 = 21, wc = 14;
  std::ostringstream out;
  out << pad("Task", w0) << pad("Metric", w1);
  for (const ModelAggregate& m : a.models) out << pad(m.model, wc);
  out << '\n' << std::string(w0 + w1 + wc * a.models.size(), '-') << '\n';
  if (a.models.empty()) return out.str();

  auto block = [&](const std::string& label, auto value_of) {
    const char* metrics[] = {"Visual Consistency", "Dynamic Feasibility", "Task Completion"};
    for (int k = 0; k < 3; ++k) {
      out << pad(k == 0 ? label : "", w0) << pad(metrics[k], w1);
      for (const ModelAggregate& m : a.models) {
        const std::optional<Metrics> v = value_of(m);
        const double x = !v ? 0.0 : k == 0 ? v->vc : k == 1 ? v->df : v->tc;
        out << pad(v ? fixed2(x) : "-", wc);
      }
      out << '\n';
    }
  };
  for (Category c : kCategories) {
    block(kCategoryLabels[static_cast<size_t>(c)], [c](const ModelAggregate& m) {
      auto it = m.categories.find(c);
      return it == m.categories.end() ? std::optional<Metrics>() : it->second;
    });
  }
  out << std::string(w0 + w1 + wc * a.models.size(), '-') << '\n';
  block("Average", [](const ModelAggregate& m) { return m.average; });
  return out.str();
}

std::string render_summary(std::span<const SummaryRow> rows, std::string_view label) {
  const size_t w0 = 16, wc = 10;
  std::ostringstream out;
  out << pad(std::string(label), w0) << pad("VC", wc) << pad("DF", wc) << "TC\n"
      << std::string(w0 + 2 * wc + 4, '-') << '\n';
  for (const SummaryRow& r : rows) {
    out << pad(r.label, w0) << pad(fixed2(r.scores.vc), wc) << pad(fixed2(r.scores.df), wc)
        << fixed2(r.scores.tc) << '\n';
  }
  return out.str();
}

std::string aggregates_to_json(const Aggregates& a) {
  json models = json::array();
  for (const ModelAggregate& m : a.models) {
    json tasks = json::array();
    for (const TaskAggregate& t : m.tasks) {
      tasks.push_back({{"task", t.task},
                       {"category", std::string(to_string(t.category))},
                       {"trials", t.trials},
                       {"complete", t.complete},
                       {"mean", metrics_json(t.mean)}});
    }
    json cats = json::object();
    for (const auto& [c, v] : m.categories) cats[std::string(to_string(c))] = metrics_json(v);
    json avg = m.average ? metrics_json(*m.average) : json(nullptr);
    json avg_display = nullptr;
    if (m.average) {
      avg_display = {{"vc", fixed2(m.average->vc)},
                     {"df", fixed2(m.average->df)},
                     {"tc", fixed2(m.average->tc)}};
    }
    models.push_back({{"model", m.model},
                      {"tasks", tasks},
                      {"categories", cats},
                      {"average", avg},
                      {"average_display", avg_display}});
  }
  return json{{"models", models}, {"warnings", a.warnings}}.dump(2);
}

void emit_report(const Aggregates& a, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_file_atomic(dir / "report.txt", render_table(a));
  write_file_atomic(dir / "report.json", aggregates_to_json(a));
}

void emit_summary_report(std::span<const SummaryRow> rows, std::string_view label,
                         const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_file_atomic(dir / "report.txt", render_summary(rows, label));
  json list = json::array();
  for (const SummaryRow& r : rows) {
    list.push_back({{"label", r.label}, {"scores", metrics_json(r.scores)}});
  }
  write_file_atomic(dir / "report.json", json{{"label", std::string(label)}, {"rows", list}}.dump(2));
}

}  // namespace vidnav::bench
