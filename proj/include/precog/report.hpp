#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "precog/analytics.hpp"
#include "precog/measures.hpp"

namespace precog {

/// One line of the scores file:
///   {eid, task, measure, value, detail?, k?, t_wordpiece, t_words}
/// detail is the 0/1 hit list for precog and the OOV word list for lexcov.
struct ScoreRecord {
  std::string example_id;
  std::string task;
  Measure measure = Measure::precog;
  double value = 0.0;
  std::vector<bool> hits;
  std::vector<std::string> oov_words;
  std::optional<int> k;
  std::size_t t_wordpiece = 0;
  std::size_t t_words = 0;

  bool operator==(const ScoreRecord&) const = default;
};

std::string format_score_line(const ScoreRecord& record);
std::string format_scores(const std::vector<ScoreRecord>& records);
/// Throws std::runtime_error naming the offending line.
std::vector<ScoreRecord> parse_scores(std::string_view text);

struct PooledBinsRow {
  Measure measure;
  std::string prediction_set;
  std::vector<Bin> bins;
};

struct IntervalRow {
  std::string task;
  Measure measure;
  std::string interval;  // "(80,100]" or "[0,80]"
  std::string prediction_set;
  std::size_t samples = 0;
  std::optional<double> accuracy;
};

struct CorrelationRow {
  Measure measure;
  std::string prediction_set;
  std::optional<CorrelationReport> report;
  std::string error;
};

struct CoverageRow {
  Measure measure;
  std::vector<Bin> bins;  // counts only; shared by all prediction sets
  CoverageCurve curve;
  /// accuracy per prediction set, parallel to `bins`
  std::vector<std::vector<std::optional<double>>> accuracy;
};

/// Report header fields repeated at the top of every CSV and inside the JSON.
struct ReportContext {
  std::string manifest = "analyze_manifest.json";
  std::optional<int> k;
  int bin_width = 20;
  Abscissa abscissa = Abscissa::midpoint;
  bool lexcov_set_semantics = false;
};

struct AnalysisReport {
  ReportContext context;
  std::vector<std::string> prediction_sets;
  std::vector<PooledBinsRow> bins;
  std::vector<IntervalRow> intervals;
  std::vector<CorrelationRow> correlations;
  std::vector<CoverageRow> coverage;
  /// (task, prediction set) -> examples dropped for lacking a prediction
  std::vector<std::tuple<std::string, std::string, std::size_t>> excluded;
};

std::string render_bins_csv(const AnalysisReport& report);
std::string render_intervals_csv(const AnalysisReport& report);
std::string render_correlation_json(const AnalysisReport& report);
std::string render_coverage_csv(const AnalysisReport& report);

}  // namespace precog
