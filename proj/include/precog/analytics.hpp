#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "precog/measures.hpp"
#include "precog/statistics.hpp"

namespace precog {

class AnalysisError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// One example's measure value joined with whether the classifier got it right.
struct ScoredOutcome {
  std::string example_id;
  std::string task;
  Measure measure = Measure::precog;
  double value = 0.0;  // [0, 1]
  bool correct = false;
};

/// Measure interval on the 0-100 scale. Lower-exclusive and upper-inclusive,
/// except that a bin starting at 0 also holds 0.
struct Bin {
  double lower = 0.0;
  double upper = 0.0;
  std::size_t count = 0;
  std::size_t correct_count = 0;
  /// Sum of member values on the 0-100 scale, for the mean abscissa.
  double value_sum = 0.0;

  std::optional<double> accuracy() const;
  double midpoint() const { return 0.5 * (lower + upper); }
  bool contains(double points) const;
  void add(double points, bool correct);
};

/// Value in [0, 1] mapped to points, snapping to an integer within 1e-9 so
/// that ratios like 4/5 land exactly on 80.
double to_points(double value);

/// Uniform bins of `width` points over [0, 100]. Width must divide 100 and
/// all outcomes must share one measure.
std::vector<Bin> bin_examples(std::span<const ScoredOutcome> outcomes, int width);
std::vector<Bin> empty_bins(int width);

struct IntervalSplit {
  Bin high{80.0, 100.0};  // (80, 100]
  Bin low{0.0, 80.0};     // [0, 80]

  std::size_t total() const { return high.count + low.count; }
};

IntervalSplit interval_split(std::span<const ScoredOutcome> outcomes);

/// Pools per-task bins: per bin, sum of correct over sum of count. All tasks
/// must share bin edges.
std::vector<Bin> weighted_task_aggregate(const std::map<std::string, std::vector<Bin>>& per_task_bins);

enum class Abscissa { midpoint, mean };
std::string_view to_string(Abscissa a);
std::optional<Abscissa> parse_abscissa(std::string_view name);

struct CorrelationReport {
  std::string measure_name;
  double r = 0.0;
  double p_value = 1.0;
  std::size_t n_bins = 0;
};

/// Pearson over (bin position, bin accuracy) for non-empty bins.
CorrelationReport correlate_measure(std::span<const Bin> bins, Abscissa abscissa = Abscissa::midpoint,
                                    std::string measure_name = {});

struct CoverageCurve {
  std::vector<double> percent;
  std::vector<double> cumulative;
};

CoverageCurve coverage_curve(std::span<const Bin> bins, std::size_t total);

}  // namespace precog
