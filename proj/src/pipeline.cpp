#include "precog/pipeline.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "precog/file_util.hpp"
#include "precog/prediction_cache.hpp"
#include "precog/remote_backend.hpp"

namespace precog {

using nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

fs::path resolve(const fs::path& base, const std::string& p) {
  if (p.empty()) return {};
  fs::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

std::string opt_string(const ordered_json& j, const char* key, const std::string& fallback) {
  if (!j.contains(key)) return fallback;
  if (j[key].is_null()) return {};
  return j[key].get<std::string>();
}

std::string cache_eid(const std::string& task, const std::string& id) { return task + "/" + id; }

std::string hash_hex(std::string_view bytes) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(bytes)));
  return buf;
}

}  // namespace

bool RunConfig::wants(Measure m) const { return std::find(measures.begin(), measures.end(), m) != measures.end(); }

void RunConfig::validate() const {
  if (k < 1) throw ConfigError("k must be >= 1");
  if (bin_width <= 0 || bin_width > 100 || 100 % bin_width != 0) throw ConfigError("bin width must divide 100");
  if (measures.empty()) throw ConfigError("at least one measure must be selected");
  if (jobs < 1) throw ConfigError("jobs must be >= 1");
  if (!backend.url.empty() && !backend.mock_corpus.empty()) {
    throw ConfigError("choose one of a remote backend URL and a mock corpus");
  }
  std::set<std::string> names;
  for (const auto& t : tasks) {
    if (!names.insert(t.schema.task).second) throw ConfigError("duplicate task name " + t.schema.task);
  }
}

RunConfig parse_config(const ordered_json& j, const fs::path& base_dir) {
  RunConfig c;
  try {
    if (j.contains("vocab")) c.vocab = resolve(base_dir, j["vocab"].get<std::string>());
    c.cased = j.value("cased", false);
    if (j.contains("backend")) {
      const auto& b = j["backend"];
      c.backend.url = opt_string(b, "url", "");
      c.backend.cache = resolve(base_dir, opt_string(b, "cache", ""));
      c.backend.mock_corpus = resolve(base_dir, opt_string(b, "mock_corpus", ""));
    }
    c.k = j.value("k", kDefaultTopK);
    c.bin_width = j.value("bin_width", 20);
    if (j.contains("measures")) {
      c.measures.clear();
      for (const auto& m : j["measures"]) {
        auto parsed = parse_measure(m.get<std::string>());
        if (!parsed) throw ConfigError("unknown measure " + m.get<std::string>());
        c.measures.push_back(*parsed);
      }
    }
    if (j.contains("out")) c.out = resolve(base_dir, j["out"].get<std::string>());
    if (j.contains("scores")) c.scores = resolve(base_dir, j["scores"].get<std::string>());
    c.jobs = j.value("jobs", 8);
    c.lexcov_set_semantics = j.value("lexcov_set_semantics", false);
    if (j.contains("corr_abscissa")) {
      auto a = parse_abscissa(j["corr_abscissa"].get<std::string>());
      if (!a) throw ConfigError("corr_abscissa must be midpoint or mean");
      c.corr_abscissa = *a;
    }
    if (j.contains("tasks")) {
      for (const auto& t : j["tasks"]) {
        TaskConfig tc;
        tc.schema.task = t.at("name").get<std::string>();
        tc.dataset = resolve(base_dir, t.at("dataset").get<std::string>());
        auto fmt = parse_format(t.value("format", std::string("jsonl")));
        if (!fmt) throw ConfigError("task " + tc.schema.task + ": format must be jsonl or tsv");
        tc.format = *fmt;
        tc.schema.id_field = opt_string(t, "id", "id");
        tc.schema.a_field = opt_string(t, "a", "a");
        tc.schema.b_field = opt_string(t, "b", tc.format == DatasetFormat::jsonl ? "b" : "");
        tc.schema.label_field = opt_string(t, "label", "label");
        if (t.contains("label_map")) {
          for (const auto& [k, v] : t["label_map"].items()) tc.schema.label_map[k] = v.get<std::string>();
        }
        if (t.contains("predictions")) {
          for (const auto& [name, path] : t["predictions"].items()) {
            tc.predictions.emplace_back(name, resolve(base_dir, path.get<std::string>()));
          }
        }
        c.tasks.push_back(std::move(tc));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  return c;
}

RunConfig load_config(const fs::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const IngestionError& e) {
    throw ConfigError(e.what());
  }
  ordered_json j = ordered_json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw ConfigError("config " + path.string() + " is not a JSON object");
  return parse_config(j, path.parent_path());
}

ordered_json config_snapshot(const RunConfig& c) {
  ordered_json j;
  j["vocab"] = c.vocab.string();
  j["cased"] = c.cased;
  j["backend"] = {{"url", c.backend.url}, {"cache", c.backend.cache.string()},
                  {"mock_corpus", c.backend.mock_corpus.string()}};
  j["k"] = c.k;
  j["bin_width"] = c.bin_width;
  ordered_json ms = ordered_json::array();
  for (Measure m : c.measures) ms.push_back(to_string(m));
  j["measures"] = ms;
  ordered_json tasks = ordered_json::array();
  for (const auto& t : c.tasks) {
    ordered_json tj;
    tj["name"] = t.schema.task;
    tj["dataset"] = t.dataset.string();
    tj["format"] = t.format == DatasetFormat::jsonl ? "jsonl" : "tsv";
    tj["id"] = t.schema.id_field;
    tj["a"] = t.schema.a_field;
    tj["b"] = t.schema.b_field;
    tj["label"] = t.schema.label_field;
    tj["label_map"] = t.schema.label_map;
    ordered_json preds = ordered_json::object();
    for (const auto& [name, path] : t.predictions) preds[name] = path.string();
    tj["predictions"] = preds;
    tasks.push_back(std::move(tj));
  }
  j["tasks"] = tasks;
  j["out"] = c.out.string();
  j["scores"] = c.scores_path().string();
  j["jobs"] = c.jobs;
  j["lexcov_set_semantics"] = c.lexcov_set_semantics;
  j["corr_abscissa"] = to_string(c.corr_abscissa);
  return j;
}

std::vector<LoadedTask> load_tasks(const RunConfig& config) {
  std::vector<LoadedTask> out;
  for (const auto& t : config.tasks) {
    out.push_back(LoadedTask{t, load_dataset(t.dataset, t.format, t.schema)});
  }
  return out;
}

std::vector<TokenSequence> load_corpus(const fs::path& path, const Vocabulary& vocab) {
  const std::string text = read_file(path);
  std::vector<TokenSequence> corpus;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) {
      corpus.push_back(tokenize(line, std::nullopt, vocab));
    } else {
      std::string a = line.substr(0, tab);
      if (trim(a).empty()) continue;
      corpus.push_back(tokenize(a, std::string_view(line).substr(tab + 1), vocab));
    }
  }
  return corpus;
}

std::shared_ptr<MlmBackend> make_backend(const RunConfig& config, const Vocabulary& vocab) {
  std::shared_ptr<MlmBackend> inner;
  if (!config.backend.url.empty()) {
    RemoteOptions opts;
    opts.max_in_flight = config.jobs;
    opts.backoff_base = std::chrono::milliseconds(config.retry_backoff_ms);
    inner = std::make_shared<RemoteBackend>(config.backend.url, vocab, opts);
  } else if (!config.backend.mock_corpus.empty()) {
    std::vector<TokenSequence> corpus;
    try {
      corpus = load_corpus(config.backend.mock_corpus, vocab);
    } catch (const IngestionError& e) {
      throw ConfigError(e.what());
    }
    if (corpus.empty()) throw ConfigError("mock corpus " + config.backend.mock_corpus.string() + " is empty");
    inner = mock_backend_from_corpus(corpus, vocab);
  }

  fs::path cache_path = config.backend.cache;
  if (cache_path.empty()) {
    if (const char* dir = std::getenv("PRECOG_CACHE_DIR"); dir && *dir) cache_path = fs::path(dir) / "predictions.jsonl";
  }
  if (cache_path.empty()) {
    if (!inner) throw ConfigError("no backend configured: give --backend-url, --mock-corpus or --cache");
    return inner;
  }
  if (!inner && !fs::exists(cache_path)) throw ConfigError("cache-only mode but " + cache_path.string() + " does not exist");
  return std::make_shared<CachingBackend>(std::make_shared<PredictionCache>(cache_path), inner);
}

ScoreRun score_tasks(const RunConfig& config, const std::vector<LoadedTask>& tasks, const Vocabulary& vocab,
                     MlmBackend* backend) {
  if (config.wants(Measure::precog) && !backend) throw ConfigError("precog selected but no backend available");

  struct Slot {
    const LoadedTask* task;
    const Example* example;
    std::optional<TokenSequence> seq;
    std::size_t t_words = 0;
    std::vector<std::string> words;
    std::optional<DatasetLengthStats> stats;
    std::vector<ScoreRecord> records;
    std::string error;
  };

  std::vector<Slot> slots;
  for (const auto& task : tasks) {
    const std::size_t begin = slots.size();
    std::vector<std::size_t> lengths;
    for (const auto& ex : task.examples) {
      Slot s{&task, &ex, std::nullopt, 0, {}, std::nullopt, {}, {}};
      try {
        s.seq = tokenize(ex.segment_a, ex.segment_b ? std::optional<std::string_view>(*ex.segment_b) : std::nullopt,
                         vocab);
        lengths.push_back(s.seq->content_length());
      } catch (const std::exception& e) {
        s.error = e.what();
      }
      s.words = word_split(ex.segment_a);
      if (ex.segment_b) {
        for (auto& w : word_split(*ex.segment_b)) s.words.push_back(std::move(w));
      }
      s.t_words = s.words.size();
      slots.push_back(std::move(s));
    }
    if (!lengths.empty()) {
      const DatasetLengthStats stats = length_stats(lengths);
      for (std::size_t i = begin; i < slots.size(); ++i) slots[i].stats = stats;
    }
  }

  const std::string& mask = vocab.specials().mask;
  auto score_one = [&](Slot& s) {
    if (!s.error.empty()) return;
    const std::string& id = s.example->id;
    const std::string& task = s.task->config.schema.task;
    const std::size_t t_wp = s.seq->content_length();
    std::vector<ScoreRecord> records;
    try {
      for (Measure m : config.measures) {
        MeasureScore ms;
        switch (m) {
          case Measure::precog:
            ms = precog(*s.seq, *backend, config.k, cache_eid(task, id), mask);
            break;
          case Measure::lexcov:
            ms = lexcov(s.words, vocab, config.lexcov_set_semantics, id);
            break;
          case Measure::length:
            ms = length_measure(*s.seq, *s.stats, id);
            break;
        }
        ScoreRecord r{id, task, m, ms.value, std::move(ms.hits), std::move(ms.oov_words), std::nullopt, t_wp,
                      s.t_words};
        if (m == Measure::precog) r.k = config.k;
        records.push_back(std::move(r));
      }
      s.records = std::move(records);
    } catch (const std::exception& e) {
      s.error = e.what();
    }
  };

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < slots.size(); i = next++) score_one(slots[i]);
  };
  const auto n_workers = std::min<std::size_t>(static_cast<std::size_t>(config.jobs), std::max<std::size_t>(slots.size(), 1));
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 1; w < n_workers; ++w) pool.emplace_back(worker);
    worker();
  }

  ScoreRun run;
  std::map<std::string, std::pair<std::size_t, std::size_t>> counts;
  for (auto& s : slots) {
    const std::string& task = s.task->config.schema.task;
    auto& c = counts[task];
    ++c.first;
    if (!s.error.empty()) {
      run.failed.push_back({task, s.example->id, s.error});
      continue;
    }
    ++c.second;
    for (auto& r : s.records) run.records.push_back(std::move(r));
  }
  for (const auto& task : tasks) {
    const auto& c = counts[task.config.schema.task];
    run.per_task.emplace_back(task.config.schema.task, c.first, c.second);
  }
  return run;
}

AnalysisReport analyze(const RunConfig& config, const std::vector<LoadedTask>& tasks,
                       const std::vector<ScoreRecord>& scores) {
  AnalysisReport report;
  report.context.bin_width = config.bin_width;
  report.context.abscissa = config.corr_abscissa;
  report.context.lexcov_set_semantics = config.lexcov_set_semantics;

  // (task, id) -> measure -> value
  std::map<std::string, std::size_t> task_index;
  std::vector<std::unordered_map<std::string, const Example*>> by_id(tasks.size());
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    task_index[tasks[t].config.schema.task] = t;
    for (const auto& e : tasks[t].examples) by_id[t].emplace(e.id, &e);
  }
  std::vector<std::unordered_map<std::string, std::map<Measure, double>>> values(tasks.size());
  std::set<Measure> present;
  std::vector<std::string> unjoined;
  for (const auto& r : scores) {
    auto ti = task_index.find(r.task);
    if (ti == task_index.end() || !by_id[ti->second].contains(r.example_id)) {
      unjoined.push_back(r.task + "/" + r.example_id);
      continue;
    }
    values[ti->second][r.example_id][r.measure] = r.value;
    present.insert(r.measure);
    if (r.k) report.context.k = r.k;
  }
  if (!unjoined.empty()) {
    std::sort(unjoined.begin(), unjoined.end());
    unjoined.erase(std::unique(unjoined.begin(), unjoined.end()), unjoined.end());
    std::string ids;
    for (std::size_t i = 0; i < unjoined.size() && i < 20; ++i) ids += (i ? ", " : "") + unjoined[i];
    throw AnalysisError(std::to_string(unjoined.size()) + " scored example(s) not found in any dataset: " + ids);
  }

  std::vector<Measure> measures;
  for (Measure m : kAllMeasures) {
    if (config.wants(m) && present.contains(m)) measures.push_back(m);
  }
  if (measures.empty()) throw AnalysisError("scores file holds none of the selected measures");

  // prediction sets, union in first-seen order
  for (const auto& t : tasks) {
    for (const auto& [name, _] : t.config.predictions) {
      if (std::find(report.prediction_sets.begin(), report.prediction_sets.end(), name) == report.prediction_sets.end())
        report.prediction_sets.push_back(name);
    }
  }
  if (report.prediction_sets.empty()) throw AnalysisError("no prediction files configured");

  // task -> set name -> id -> correct
  std::vector<std::map<std::string, std::unordered_map<std::string, bool>>> correct(tasks.size());
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    for (const auto& [name, path] : tasks[t].config.predictions) {
      PredictionSet ps = load_predictions(path, tasks[t].examples, tasks[t].config.schema);
      auto& m = correct[t][name];
      for (const auto& rec : ps.records) m.emplace(rec.example_id, rec.correct);
      report.excluded.emplace_back(tasks[t].config.schema.task, name, ps.missing_ids.size());
    }
  }

  // Joined examples: scored for m and predicted by every set the task has.
  auto joined = [&](std::size_t t, Measure m) {
    std::vector<std::pair<const Example*, double>> out;
    if (correct[t].empty()) return out;
    for (const auto& e : tasks[t].examples) {
      auto vit = values[t].find(e.id);
      if (vit == values[t].end()) continue;
      auto mit = vit->second.find(m);
      if (mit == vit->second.end()) continue;
      bool all = true;
      for (const auto& [name, ids] : correct[t]) all = all && ids.contains(e.id);
      if (all) out.emplace_back(&e, mit->second);
    }
    return out;
  };

  std::size_t total_joined = 0;
  for (Measure m : measures) {
    std::vector<ScoredOutcome> all_outcomes;
    std::map<std::string, std::map<std::string, std::vector<Bin>>> per_set_task_bins;
    for (std::size_t t = 0; t < tasks.size(); ++t) {
      const std::string& task = tasks[t].config.schema.task;
      const auto rows = joined(t, m);
      for (const auto& [e, v] : rows) all_outcomes.push_back({e->id, task, m, v, false});
      for (const auto& set : report.prediction_sets) {
        auto cit = correct[t].find(set);
        if (cit == correct[t].end()) continue;
        std::vector<ScoredOutcome> outcomes;
        for (const auto& [e, v] : rows) outcomes.push_back({e->id, task, m, v, cit->second.at(e->id)});
        per_set_task_bins[set][task] = bin_examples(outcomes, config.bin_width);
        if (outcomes.empty()) continue;
        const IntervalSplit split = interval_split(outcomes);
        report.intervals.push_back({task, m, "(80,100]", set, split.high.count, split.high.accuracy()});
        report.intervals.push_back({task, m, "[0,80]", set, split.low.count, split.low.accuracy()});
      }
    }
    total_joined = std::max(total_joined, all_outcomes.size());

    CoverageRow cov{m, bin_examples(all_outcomes, config.bin_width), {}, {}};
    cov.curve = coverage_curve(cov.bins, all_outcomes.size());
    for (const auto& set : report.prediction_sets) {
      std::vector<Bin> pooled = per_set_task_bins.contains(set) ? weighted_task_aggregate(per_set_task_bins[set])
                                                                : empty_bins(config.bin_width);
      std::vector<std::optional<double>> acc;
      for (const Bin& b : pooled) acc.push_back(b.accuracy());
      cov.accuracy.push_back(std::move(acc));

      CorrelationRow row{m, set, std::nullopt, {}};
      try {
        row.report = correlate_measure(pooled, config.corr_abscissa, std::string(to_string(m)));
      } catch (const std::exception& e) {
        row.error = e.what();
      }
      report.correlations.push_back(std::move(row));
      report.bins.push_back({m, set, std::move(pooled)});
    }
    report.coverage.push_back(std::move(cov));
  }
  if (total_joined == 0) throw AnalysisError("no example has both a score and a prediction");

  // Table-1 ordering: task, measure, interval.
  std::stable_sort(report.intervals.begin(), report.intervals.end(), [&](const IntervalRow& a, const IntervalRow& b) {
    return task_index[a.task] < task_index[b.task];
  });
  return report;
}

namespace {

ordered_json manifest_base(const RunConfig& config, std::string_view command, const std::string& started) {
  ordered_json m;
  m["tool"] = "precog";
  m["version"] = kToolVersion;
  m["command"] = command;
  m["config"] = config_snapshot(config);
  m["masking"] = "wordpiece";
  m["specials"] = "excluded";
  m["started_at"] = started;
  return m;
}

Vocabulary load_config_vocabulary(const RunConfig& config) {
  if (config.vocab.empty()) throw ConfigError("no vocabulary given (--vocab)");
  try {
    return load_vocabulary(config.vocab, {}, config.cased);
  } catch (const VocabularyError& e) {
    throw ConfigError(e.what());
  }
}

CommandResult run_score(const RunConfig& config, const Vocabulary& vocab, std::shared_ptr<MlmBackend> backend) {
  const std::string started = utc_timestamp();
  std::vector<LoadedTask> tasks;
  try {
    tasks = load_tasks(config);
  } catch (const IngestionError& e) {
    throw ConfigError(e.what());
  }
  if (tasks.empty()) throw ConfigError("no tasks configured");

  ordered_json backend_info = nullptr;
  if (config.wants(Measure::precog)) {
    if (!backend) throw ConfigError("precog selected but no backend configured");
    try {
      backend_info = {{"kind", backend->kind()}, {"model", backend->model_id()},
                      {"fingerprint", backend->fingerprint(config.k)}};
    } catch (const std::exception& e) {
      return {1, std::string("backend unavailable: ") + e.what()};
    }
  }

  ScoreRun run = score_tasks(config, tasks, vocab, backend.get());
  const fs::path scores_path = config.scores_path();
  const std::string scores_text = format_scores(run.records);
  write_file_atomic(scores_path, scores_text);

  ordered_json manifest = manifest_base(config, "score", started);
  manifest["backend"] = backend_info;
  manifest["k"] = config.k;
  manifest["lexcov"] = config.lexcov_set_semantics ? "set" : "occurrence";
  ordered_json per_task = ordered_json::object();
  for (const auto& [task, n, scored] : run.per_task) per_task[task] = {{"examples", n}, {"scored", scored}};
  manifest["per_task"] = per_task;
  ordered_json failed = ordered_json::array();
  for (const auto& f : run.failed) failed.push_back({{"task", f.task}, {"id", f.example_id}, {"error", f.error}});
  manifest["failed"] = failed;
  manifest["scores_file"] = scores_path.string();
  manifest["scores_hash"] = hash_hex(scores_text);
  manifest["finished_at"] = utc_timestamp();
  write_file_atomic(scores_path.parent_path() / "score_manifest.json", manifest.dump(2) + "\n");

  std::ostringstream summary;
  summary << "scored " << run.records.size() << " record(s)";
  for (const auto& [task, n, scored] : run.per_task) summary << "; " << task << " " << scored << "/" << n;
  if (!run.failed.empty()) summary << "; " << run.failed.size() << " example(s) failed";
  summary << " -> " << scores_path.string();
  return {run.failed.empty() ? 0 : 1, summary.str()};
}

}  // namespace

CommandResult cmd_score(const RunConfig& config) {
  config.validate();
  const Vocabulary vocab = load_config_vocabulary(config);
  std::shared_ptr<MlmBackend> backend;
  if (config.wants(Measure::precog)) backend = make_backend(config, vocab);
  return run_score(config, vocab, std::move(backend));
}

CommandResult cmd_score(const RunConfig& config, std::shared_ptr<MlmBackend> backend) {
  config.validate();
  const Vocabulary vocab = load_config_vocabulary(config);
  return run_score(config, vocab, std::move(backend));
}

CommandResult cmd_analyze(const RunConfig& config) {
  config.validate();
  const std::string started = utc_timestamp();
  std::vector<LoadedTask> tasks;
  try {
    tasks = load_tasks(config);
  } catch (const IngestionError& e) {
    throw ConfigError(e.what());
  }
  const fs::path scores_path = config.scores_path();
  std::string scores_text;
  try {
    scores_text = read_file(scores_path);
  } catch (const IngestionError& e) {
    throw ConfigError(e.what());
  }
  std::vector<ScoreRecord> scores;
  try {
    scores = parse_scores(scores_text);
  } catch (const std::exception& e) {
    throw ConfigError(scores_path.string() + ": " + e.what());
  }

  AnalysisReport report;
  try {
    report = analyze(config, tasks, scores);
  } catch (const AnalysisError& e) {
    return {1, std::string("analysis failed: ") + e.what()};
  } catch (const IngestionError& e) {
    return {1, std::string("analysis failed: ") + e.what()};
  }

  write_file_atomic(config.out / "bins.csv", render_bins_csv(report));
  write_file_atomic(config.out / "intervals.csv", render_intervals_csv(report));
  write_file_atomic(config.out / "correlation.json", render_correlation_json(report));
  write_file_atomic(config.out / "coverage.csv", render_coverage_csv(report));

  ordered_json manifest = manifest_base(config, "analyze", started);
  manifest["scores_file"] = scores_path.string();
  manifest["scores_hash"] = hash_hex(scores_text);
  manifest["k"] = report.context.k ? ordered_json(*report.context.k) : ordered_json(nullptr);
  ordered_json excluded = ordered_json::array();
  for (const auto& [task, set, n] : report.excluded) {
    excluded.push_back({{"task", task}, {"prediction_set", set}, {"missing_predictions", n}});
  }
  manifest["excluded"] = excluded;
  manifest["reports"] = {"bins.csv", "intervals.csv", "correlation.json", "coverage.csv"};
  manifest["finished_at"] = utc_timestamp();
  write_file_atomic(config.out / report.context.manifest, manifest.dump(2) + "\n");

  int code = 0;
  std::ostringstream summary;
  for (const auto& c : report.correlations) {
    summary << to_string(c.measure) << "/" << c.prediction_set << ": ";
    if (c.report) {
      summary << "r=" << format_fixed(c.report->r) << " p=" << format_fixed(c.report->p_value) << "\n";
    } else {
      summary << "undefined (" << c.error << ")\n";
      code = 1;
    }
  }
  summary << "reports written to " << config.out.string();
  return {code, summary.str()};
}

}  // namespace precog
