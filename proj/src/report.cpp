#include "precog/report.hpp"

#include <nlohmann/json.hpp>

#include <sstream>
#include <stdexcept>

#include "precog/file_util.hpp"

namespace precog {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

std::string header_comment(const ReportContext& ctx) {
  std::ostringstream os;
  os << "# manifest=" << ctx.manifest << " masking=wordpiece specials=excluded";
  if (ctx.k) os << " k=" << *ctx.k;
  os << " bin_width=" << ctx.bin_width << " abscissa=" << to_string(ctx.abscissa)
     << " lexcov=" << (ctx.lexcov_set_semantics ? "set" : "occurrence") << '\n';
  return os.str();
}

std::string bound(double v) {
  if (v == static_cast<double>(static_cast<long long>(v))) return std::to_string(static_cast<long long>(v));
  return format_fixed(v);
}

std::string opt_fixed(const std::optional<double>& v) { return v ? format_fixed(*v) : std::string(); }

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

}  // namespace

std::string format_score_line(const ScoreRecord& r) {
  ordered_json j;
  j["eid"] = r.example_id;
  j["task"] = r.task;
  j["measure"] = to_string(r.measure);
  j["value"] = r.value;
  if (r.measure == Measure::precog) {
    std::vector<int> hits(r.hits.begin(), r.hits.end());
    j["detail"] = hits;
  } else if (r.measure == Measure::lexcov) {
    j["detail"] = r.oov_words;
  }
  if (r.k) j["k"] = *r.k;
  j["t_wordpiece"] = r.t_wordpiece;
  j["t_words"] = r.t_words;
  return j.dump();
}

std::string format_scores(const std::vector<ScoreRecord>& records) {
  std::string out;
  for (const auto& r : records) {
    out += format_score_line(r);
    out += '\n';
  }
  return out;
}

std::vector<ScoreRecord> parse_scores(std::string_view text) {
  std::vector<ScoreRecord> out;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    try {
      json j = json::parse(line);
      ScoreRecord r;
      r.example_id = j.at("eid").get<std::string>();
      r.task = j.at("task").get<std::string>();
      auto m = parse_measure(j.at("measure").get<std::string>());
      if (!m) throw std::runtime_error("unknown measure");
      r.measure = *m;
      r.value = j.at("value").get<double>();
      if (j.contains("detail")) {
        if (r.measure == Measure::precog) {
          for (int h : j["detail"].get<std::vector<int>>()) r.hits.push_back(h != 0);
        } else if (r.measure == Measure::lexcov) {
          r.oov_words = j["detail"].get<std::vector<std::string>>();
        }
      }
      if (j.contains("k")) r.k = j["k"].get<int>();
      r.t_wordpiece = j.at("t_wordpiece").get<std::size_t>();
      r.t_words = j.at("t_words").get<std::size_t>();
      out.push_back(std::move(r));
    } catch (const std::exception& e) {
      throw std::runtime_error("scores line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::string render_bins_csv(const AnalysisReport& report) {
  std::string out = header_comment(report.context);
  out += "measure,prediction_set,bin_lower,bin_upper,count,accuracy\n";
  for (const auto& row : report.bins) {
    for (const Bin& b : row.bins) {
      out += std::string(to_string(row.measure)) + ',' + csv_field(row.prediction_set) + ',' + bound(b.lower) + ',' +
             bound(b.upper) + ',' + std::to_string(b.count) + ',' + opt_fixed(b.accuracy()) + '\n';
    }
  }
  return out;
}

std::string render_intervals_csv(const AnalysisReport& report) {
  std::string out = header_comment(report.context);
  out += "task,measure,interval,prediction_set,samples,accuracy\n";
  for (const auto& row : report.intervals) {
    out += csv_field(row.task) + ',' + std::string(to_string(row.measure)) + ',' + csv_field(row.interval) + ',' +
           csv_field(row.prediction_set) + ',' + std::to_string(row.samples) + ',' + opt_fixed(row.accuracy) + '\n';
  }
  return out;
}

std::string render_correlation_json(const AnalysisReport& report) {
  const ReportContext& ctx = report.context;
  ordered_json j;
  j["manifest"] = ctx.manifest;
  j["masking"] = "wordpiece";
  j["specials"] = "excluded";
  j["k"] = ctx.k ? json(*ctx.k) : json(nullptr);
  j["bin_width"] = ctx.bin_width;
  j["abscissa"] = to_string(ctx.abscissa);
  j["lexcov"] = ctx.lexcov_set_semantics ? "set" : "occurrence";
  ordered_json rows = ordered_json::array();
  for (const auto& c : report.correlations) {
    ordered_json row;
    row["measure"] = to_string(c.measure);
    row["prediction_set"] = c.prediction_set;
    if (c.report) {
      row["r"] = round_to(c.report->r);
      row["p"] = round_to(c.report->p_value);
      row["n_bins"] = c.report->n_bins;
    } else {
      row["r"] = nullptr;
      row["p"] = nullptr;
      row["n_bins"] = 0;
      row["error"] = c.error;
    }
    rows.push_back(std::move(row));
  }
  j["correlations"] = std::move(rows);
  return j.dump(2) + "\n";
}

std::string render_coverage_csv(const AnalysisReport& report) {
  std::string out = header_comment(report.context);
  out += "measure,bin_lower,bin_upper,count,percent,cumulative_percent";
  for (const auto& s : report.prediction_sets) out += ",accuracy_" + csv_field(s);
  out += '\n';
  for (const auto& row : report.coverage) {
    for (std::size_t i = 0; i < row.bins.size(); ++i) {
      const Bin& b = row.bins[i];
      out += std::string(to_string(row.measure)) + ',' + bound(b.lower) + ',' + bound(b.upper) + ',' +
             std::to_string(b.count) + ',' + format_fixed(row.curve.percent[i]) + ',' +
             format_fixed(row.curve.cumulative[i]);
      for (const auto& acc : row.accuracy) out += ',' + opt_fixed(acc[i]);
      out += '\n';
    }
  }
  return out;
}

}  // namespace precog
