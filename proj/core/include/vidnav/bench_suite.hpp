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


#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace vidnav::bench {

enum class Category {
  kObjectNavigation,
  kPreciseNavigation,
  kSpatialGrounding,
  kLanguageControl,
  kSceneReasoning,
};

inline constexpr std::array<Category, 5> kCategories = {
    Category::kObjectNavigation, Category::kPreciseNavigation, Category::kSpatialGrounding,
    Category::kLanguageControl, Category::kSceneReasoning};

std::string_view to_string(Category category);
// Accepts "ObjectNavigation", "Object Navigation", "object_navigation", ...
Category parse_category(std::string_view name);

struct TaskSpec {
  Category category = Category::kObjectNavigation;
  std::string name;
  std::string instruction;
};

// The built-in 15-task suite, three tasks per category.
std::vector<TaskSpec> load_suite();
// CSV with header "category,name,instruction".
std::vector<TaskSpec> load_suite_file(const std::filesystem::path& path);
std::vector<TaskSpec> parse_suite(const std::string& csv);

struct Metrics {
  double vc = 0.0;  // visual consistency
  double df = 0.0;  // dynamic feasibility
  double tc = 0.0;  // task completion
};

struct TrialScore {
  std::string model;
  std::string task;
  int trial = 1;
  Metrics scores;
};

// Per-category values reported directly, as in a published table.
struct CategoryScore {
  std::string model;
  Category category = Category::kObjectNavigation;
  Metrics scores;
};

// A labelled single-row result, e.g. one prompting strategy.
struct SummaryRow {
  std::string label;
  Metrics scores;
};

// Header "model,task,trial,vc,df,tc". Throws kParse with the line number.
std::vector<TrialScore> parse_trial_scores(const std::string& csv);
// Header "model,category,vc,df,tc".
std::vector<CategoryScore> parse_category_scores(const std::string& csv);
// Header "<label>,vc,df,tc" for any label column name.
std::vector<SummaryRow> parse_summary_rows(const std::string& csv);

enum class ScoreFileKind { kTrials, kCategories, kSummary };
ScoreFileKind detect_score_file(const std::string& csv);

struct TaskAggregate {
  std::string task;
  Category category = Category::kObjectNavigation;
  int trials = 0;
  bool complete = false;
  Metrics mean;
};

struct ModelAggregate {
  std::string model;
  std::vector<TaskAggregate> tasks;
  std::map<Category, Metrics> categories;  // categories with complete tasks
  std::optional<Metrics> average;          // mean of the five category values
};

struct Aggregates {
  std::vector<ModelAggregate> models;  // in order of first appearance
  std::vector<std::string> warnings;
};

// Task mean over trials; category value = mean of its complete task means;
// average = mean of the five category values. Tasks with fewer than
// `expected_trials` trials are excluded with a warning. Throws kInput on
// duplicate trials, unknown tasks or scores outside [0, 1].
Aggregates aggregate(std::span<const TrialScore> scores, std::span<const TaskSpec> suite,
                     int expected_trials = 5);
Aggregates aggregate_categories(std::span<const CategoryScore> scores);

// Table with one column per model: category x metric rows, then Average.
std::string render_table(const Aggregates& aggregates);
std::string render_summary(std::span<const SummaryRow> rows, std::string_view label = "Strategy");
std::string aggregates_to_json(const Aggregates& aggregates);

// Writes report.txt and report.json into `dir`.
void emit_report(const Aggregates& aggregates, const std::filesystem::path& dir);
void emit_summary_report(std::span<const SummaryRow> rows, std::string_view label,
                         const std::filesystem::path& dir);

}  // namespace vidnav::bench
