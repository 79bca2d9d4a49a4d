#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "precog/analytics.hpp"
#include "precog/backend.hpp"
#include "precog/ingestion.hpp"
#include "precog/measures.hpp"
#include "precog/report.hpp"
#include "precog/tokenizer.hpp"
#include "precog/vocabulary.hpp"

namespace precog {

inline constexpr std::string_view kToolVersion = "0.1.0";

/// Invalid or inconsistent configuration (exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TaskConfig {
  TaskSchema schema;
  std::filesystem::path dataset;
  DatasetFormat format = DatasetFormat::jsonl;
  /// prediction set name -> predictions file, in report order
  std::vector<std::pair<std::string, std::filesystem::path>> predictions;
};

struct BackendSpec {
  std::string url;
  std::filesystem::path cache;
  std::filesystem::path mock_corpus;
};

struct RunConfig {
  std::filesystem::path vocab;
  bool cased = false;
  BackendSpec backend;
  int k = kDefaultTopK;
  int bin_width = 20;
  std::vector<Measure> measures{kAllMeasures[0], kAllMeasures[1], kAllMeasures[2]};
  std::vector<TaskConfig> tasks;
  std::filesystem::path out = "precog-out";
  std::filesystem::path scores;  // defaults to out/scores.jsonl
  int jobs = 8;
  bool lexcov_set_semantics = false;
  Abscissa corr_abscissa = Abscissa::midpoint;
  /// remote retry tuning; not part of the declarative file
  int retry_backoff_ms = 1000;

  std::filesystem::path scores_path() const { return scores.empty() ? out / "scores.jsonl" : scores; }
  bool wants(Measure m) const;
  /// Throws ConfigError when an invariant is broken.
  void validate() const;
};

/// Reads the JSON config; relative paths resolve against the file's directory.
RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_config(const nlohmann::ordered_json& j, const std::filesystem::path& base_dir = {});
nlohmann::ordered_json config_snapshot(const RunConfig& config);

struct LoadedTask {
  TaskConfig config;
  std::vector<Example> examples;
};

std::vector<LoadedTask> load_tasks(const RunConfig& config);

/// Tokenizes a text corpus (one example per line, optional tab-separated
/// second segment) for the mock backend.
std::vector<TokenSequence> load_corpus(const std::filesystem::path& path, const Vocabulary& vocab);

/// Builds the backend named by the config: remote or mock, wrapped in the
/// prediction cache when one is configured (explicitly or through
/// PRECOG_CACHE_DIR). A cache alone gives cache-only mode.
std::shared_ptr<MlmBackend> make_backend(const RunConfig& config, const Vocabulary& vocab);

struct FailedExample {
  std::string task;
  std::string example_id;
  std::string error;
};

struct ScoreRun {
  std::vector<ScoreRecord> records;
  std::vector<FailedExample> failed;
  /// task -> (examples, scored)
  std::vector<std::tuple<std::string, std::size_t, std::size_t>> per_task;
};

/// Scores every example of every task. Backend may be null when precog is
/// not selected. Record order is task order, then example order, then
/// measure order, independent of scheduling.
ScoreRun score_tasks(const RunConfig& config, const std::vector<LoadedTask>& tasks, const Vocabulary& vocab,
                     MlmBackend* backend);

/// Joins scores and predictions and computes every report table.
/// Throws AnalysisError on join failures or an empty join.
AnalysisReport analyze(const RunConfig& config, const std::vector<LoadedTask>& tasks,
                       const std::vector<ScoreRecord>& scores);

struct CommandResult {
  int exit_code = 0;
  std::string summary;
};

/// score: load vocab, tasks and backend, write scores file + manifest.
CommandResult cmd_score(const RunConfig& config);
CommandResult cmd_score(const RunConfig& config, std::shared_ptr<MlmBackend> backend);
/// analyze: read scores + predictions, write bins.csv, intervals.csv,
/// correlation.json, coverage.csv + manifest into config.out.
CommandResult cmd_analyze(const RunConfig& config);

}  // namespace precog
