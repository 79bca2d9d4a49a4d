// precog: pre-training coverage measures and accuracy correlation reports.
//
//   precog score    --config run.json [overrides]
//   precog analyze  --config run.json [overrides]
//   precog selftest [--vocab file]
//   precog cache stats|verify [--cache file] [--vocab file]
//
// Exit codes: 0 success, 1 partial failure, 2 configuration error.

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <iostream>
#include <optional>
#include <unordered_set>

#include "precog/ingestion.hpp"
#include "precog/pipeline.hpp"
#include "precog/prediction_cache.hpp"
#include "precog/selftest.hpp"

namespace {

using namespace precog;
namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitPartial = 1;
constexpr int kExitConfig = 2;

struct Overrides {
  std::string config;
  std::string vocab;
  std::string backend_url;
  std::string cache;
  std::string mock_corpus;
  std::optional<int> k;
  std::optional<int> bin_width;
  std::string measures;
  std::string out;
  std::string scores;
  std::optional<int> jobs;
  bool lexcov_set_semantics = false;
  std::string corr_abscissa;
  bool verbose = false;
};

void add_run_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "JSON run configuration");
  cmd->add_option("--vocab", o.vocab, "vocabulary file, one token per line");
  cmd->add_option("--backend-url", o.backend_url, "remote /topk service, e.g. http://localhost:8080");
  cmd->add_option("--cache", o.cache, "prediction cache (JSON lines)");
  cmd->add_option("--mock-corpus", o.mock_corpus, "text corpus for the unigram mock backend");
  cmd->add_option("--k", o.k, "top-k size (default 100)");
  cmd->add_option("--bin-width", o.bin_width, "histogram bin width in points (default 20)");
  cmd->add_option("--measures", o.measures, "comma-separated subset of precog,lexcov,length");
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--scores", o.scores, "scores file (default <out>/scores.jsonl)");
  cmd->add_option("--jobs", o.jobs, "concurrent examples / in-flight requests (default 8)");
  cmd->add_flag("--lexcov-set-semantics", o.lexcov_set_semantics, "count repeated OOV words once");
  cmd->add_option("--corr-abscissa", o.corr_abscissa, "midpoint or mean")->check(CLI::IsMember({"midpoint", "mean"}));
  cmd->add_flag("-v,--verbose", o.verbose, "debug logging");
}

RunConfig build_config(const Overrides& o) {
  RunConfig c = o.config.empty() ? RunConfig{} : load_config(o.config);
  if (!o.vocab.empty()) c.vocab = o.vocab;
  if (!o.backend_url.empty()) {
    c.backend.url = o.backend_url;
    c.backend.mock_corpus.clear();
  }
  if (!o.mock_corpus.empty()) {
    c.backend.mock_corpus = o.mock_corpus;
    c.backend.url.clear();
  }
  if (!o.cache.empty()) c.backend.cache = o.cache;
  if (o.k) c.k = *o.k;
  if (o.bin_width) c.bin_width = *o.bin_width;
  if (!o.measures.empty()) {
    c.measures.clear();
    std::size_t pos = 0;
    while (pos <= o.measures.size()) {
      std::size_t comma = o.measures.find(',', pos);
      std::string name = trim(o.measures.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos));
      if (!name.empty()) {
        auto m = parse_measure(name);
        if (!m) throw ConfigError("unknown measure '" + name + "'");
        c.measures.push_back(*m);
      }
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
  }
  if (!o.out.empty()) c.out = o.out;
  if (!o.scores.empty()) c.scores = o.scores;
  if (o.jobs) c.jobs = *o.jobs;
  if (o.lexcov_set_semantics) c.lexcov_set_semantics = true;
  if (!o.corr_abscissa.empty()) c.corr_abscissa = *parse_abscissa(o.corr_abscissa);
  c.validate();
  return c;
}

fs::path default_cache(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* dir = std::getenv("PRECOG_CACHE_DIR"); dir && *dir) return fs::path(dir) / "predictions.jsonl";
  throw ConfigError("no cache given (--cache or PRECOG_CACHE_DIR)");
}

int cache_stats(const std::string& cache_flag) {
  const fs::path path = default_cache(cache_flag);
  if (!fs::exists(path)) throw ConfigError("cache " + path.string() + " does not exist");
  const CacheStats s = PredictionCache::stats(path);
  std::cout << "cache: " << path.string() << "\n"
            << "entries: " << s.entries << "\n"
            << "malformed_lines: " << s.malformed_lines << "\n"
            << "duplicate_keys: " << s.duplicate_keys << "\n"
            << "k_values:";
  for (int k : s.k_values) std::cout << ' ' << k;
  std::cout << "\nfingerprints:\n";
  for (const auto& [fp, n] : s.per_fingerprint) std::cout << "  " << fp << ' ' << n << "\n";
  return kExitOk;
}

int cache_verify(const std::string& cache_flag, const std::string& vocab_path) {
  const fs::path path = default_cache(cache_flag);
  if (!fs::exists(path)) throw ConfigError("cache " + path.string() + " does not exist");
  std::optional<Vocabulary> vocab;
  if (!vocab_path.empty()) {
    try {
      vocab.emplace(load_vocabulary(vocab_path));
    } catch (const VocabularyError& e) {
      throw ConfigError(e.what());
    }
  }
  std::size_t malformed = 0;
  const auto entries = PredictionCache::read_entries(path, &malformed);
  std::size_t problems = malformed;
  for (const auto& e : entries) {
    std::string why;
    std::unordered_set<std::string> seen;
    if (e.key.k < 1) why = "k < 1";
    if (e.prediction.tokens.size() > static_cast<std::size_t>(std::max(e.key.k, 0))) why = "more than k tokens";
    for (const auto& t : e.prediction.tokens) {
      if (!seen.insert(t).second) why = "duplicate token '" + t + "'";
      if (vocab && !vocab->contains(t)) why = "token '" + t + "' not in vocabulary";
    }
    if (!why.empty()) {
      ++problems;
      std::cout << "bad entry " << e.key.example_id << ":" << e.key.masked_index << " k=" << e.key.k << ": " << why
                << "\n";
    }
  }
  const CacheStats s = PredictionCache::stats(path);
  problems += s.conflicting_keys;
  std::cout << entries.size() << " entries, " << malformed << " malformed line(s), " << s.conflicting_keys
            << " conflicting key(s): " << (problems ? "FAILED" : "OK") << "\n";
  return problems ? kExitPartial : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"precog - pre-training coverage measures and accuracy correlation reports"};
  app.require_subcommand(1);

  Overrides score_o, analyze_o;
  auto* score = app.add_subcommand("score", "compute precog/lexcov/length scores for every example");
  add_run_flags(score, score_o);
  auto* analyze_cmd = app.add_subcommand("analyze", "bin scores against predictions and write reports");
  add_run_flags(analyze_cmd, analyze_o);

  std::string selftest_vocab;
  auto* selftest = app.add_subcommand("selftest", "run the bundled end-to-end checks");
  selftest->add_option("--vocab", selftest_vocab, "replace the bundled vocabulary");

  std::string cache_path, cache_vocab;
  auto* cache = app.add_subcommand("cache", "inspect a prediction cache");
  cache->require_subcommand(1);
  auto* stats = cache->add_subcommand("stats", "entry counts per backend fingerprint");
  stats->add_option("--cache", cache_path, "cache file (default $PRECOG_CACHE_DIR/predictions.jsonl)");
  auto* verify = cache->add_subcommand("verify", "check every entry against the cache invariants");
  verify->add_option("--cache", cache_path, "cache file (default $PRECOG_CACHE_DIR/predictions.jsonl)");
  verify->add_option("--vocab", cache_vocab, "also check tokens against this vocabulary");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (score->parsed() || analyze_cmd->parsed()) {
      const Overrides& o = score->parsed() ? score_o : analyze_o;
      spdlog::set_level(o.verbose ? spdlog::level::debug : spdlog::level::warn);
      const RunConfig config = build_config(o);
      const CommandResult r = score->parsed() ? cmd_score(config) : cmd_analyze(config);
      (r.exit_code == 0 ? std::cout : std::cerr) << r.summary << "\n";
      return r.exit_code;
    }
    if (selftest->parsed()) {
      spdlog::set_level(spdlog::level::err);
      std::optional<std::string> text;
      if (!selftest_vocab.empty()) text = read_file(selftest_vocab);
      const auto results = run_selftest(text);
      std::cout << format_selftest_summary(results);
      for (const auto& r : results) {
        if (!r.passed) return kExitPartial;
      }
      return kExitOk;
    }
    if (stats->parsed()) return cache_stats(cache_path);
    if (verify->parsed()) return cache_verify(cache_path, cache_vocab);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const IngestionError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPartial;
  }
  return kExitConfig;
}
