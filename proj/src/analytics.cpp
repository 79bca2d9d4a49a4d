#include "precog/analytics.hpp"

#include <cmath>

namespace precog {

std::optional<double> Bin::accuracy() const {
  if (count == 0) return std::nullopt;
  return static_cast<double>(correct_count) / static_cast<double>(count);
}

bool Bin::contains(double points) const {
  if (points == lower) return lower == 0.0;
  return points > lower && points <= upper;
}

void Bin::add(double points, bool correct) {
  ++count;
  correct_count += correct;
  value_sum += points;
}

double to_points(double value) {
  if (!(value >= 0.0 && value <= 1.0)) throw AnalysisError("measure value outside [0, 1]: " + std::to_string(value));
  double p = value * 100.0;
  const double nearest = std::round(p);
  if (std::fabs(p - nearest) < 1e-9) p = nearest;
  return p;
}

std::vector<Bin> empty_bins(int width) {
  if (width <= 0 || width > 100 || 100 % width != 0) {
    throw AnalysisError("bin width must divide 100, got " + std::to_string(width));
  }
  std::vector<Bin> bins;
  for (int lo = 0; lo < 100; lo += width) bins.push_back(Bin{double(lo), double(lo + width)});
  return bins;
}

std::vector<Bin> bin_examples(std::span<const ScoredOutcome> outcomes, int width) {
  std::vector<Bin> bins = empty_bins(width);
  for (const ScoredOutcome& o : outcomes) {
    if (o.measure != outcomes.front().measure) throw AnalysisError("bin_examples: mixed measures");
    const double p = to_points(o.value);
    auto idx = static_cast<std::ptrdiff_t>(std::ceil(p / width)) - 1;
    if (idx < 0) idx = 0;
    bins[static_cast<std::size_t>(idx)].add(p, o.correct);
  }
  return bins;
}

IntervalSplit interval_split(std::span<const ScoredOutcome> outcomes) {
  if (outcomes.empty()) throw AnalysisError("interval_split: no joined examples");
  IntervalSplit split;
  for (const ScoredOutcome& o : outcomes) {
    if (o.measure != outcomes.front().measure) throw AnalysisError("interval_split: mixed measures");
    const double p = to_points(o.value);
    (p > 80.0 ? split.high : split.low).add(p, o.correct);
  }
  return split;
}

std::vector<Bin> weighted_task_aggregate(const std::map<std::string, std::vector<Bin>>& per_task_bins) {
  std::vector<Bin> pooled;
  bool first = true;
  for (const auto& [task, bins] : per_task_bins) {
    if (first) {
      pooled.reserve(bins.size());
      for (const Bin& b : bins) pooled.push_back(Bin{b.lower, b.upper});
      first = false;
    }
    if (bins.size() != pooled.size()) throw AnalysisError("weighted_task_aggregate: mismatched bin edges in " + task);
    for (std::size_t i = 0; i < bins.size(); ++i) {
      if (bins[i].lower != pooled[i].lower || bins[i].upper != pooled[i].upper) {
        throw AnalysisError("weighted_task_aggregate: mismatched bin edges in " + task);
      }
      pooled[i].count += bins[i].count;
      pooled[i].correct_count += bins[i].correct_count;
      pooled[i].value_sum += bins[i].value_sum;
    }
  }
  return pooled;
}

std::string_view to_string(Abscissa a) { return a == Abscissa::midpoint ? "midpoint" : "mean"; }

std::optional<Abscissa> parse_abscissa(std::string_view name) {
  if (name == "midpoint") return Abscissa::midpoint;
  if (name == "mean") return Abscissa::mean;
  return std::nullopt;
}

CorrelationReport correlate_measure(std::span<const Bin> bins, Abscissa abscissa, std::string measure_name) {
  std::vector<double> xs, ys;
  for (const Bin& b : bins) {
    auto acc = b.accuracy();
    if (!acc) continue;
    xs.push_back(abscissa == Abscissa::midpoint ? b.midpoint() : b.value_sum / static_cast<double>(b.count));
    ys.push_back(*acc);
  }
  if (xs.size() < 3) {
    throw CorrelationError("correlate_measure: need at least 3 non-empty bins, have " + std::to_string(xs.size()));
  }
  PearsonResult pr = pearson(xs, ys);
  return CorrelationReport{std::move(measure_name), pr.r, pr.p_value, pr.n};
}

CoverageCurve coverage_curve(std::span<const Bin> bins, std::size_t total) {
  std::size_t sum = 0;
  for (const Bin& b : bins) sum += b.count;
  if (sum != total) {
    throw AnalysisError("coverage_curve: bins hold " + std::to_string(sum) + " examples, expected " +
                        std::to_string(total));
  }
  CoverageCurve curve;
  if (total == 0) {
    curve.percent.assign(bins.size(), 0.0);
    curve.cumulative.assign(bins.size(), 0.0);
    return curve;
  }
  std::size_t running = 0;
  const auto denom = static_cast<double>(total);
  for (const Bin& b : bins) {
    running += b.count;
    curve.percent.push_back(100.0 * static_cast<double>(b.count) / denom);
    curve.cumulative.push_back(100.0 * static_cast<double>(running) / denom);
  }
  return curve;
}

}  // namespace precog
