#include <doctest.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <random>

#include "precog/pipeline.hpp"
#include "precog/prediction_cache.hpp"
#include "workspace.hpp"

using namespace precog;
using nlohmann::json;
using nlohmann::ordered_json;
using testing::Workspace;
namespace fs = std::filesystem;

namespace {

struct Quiet {
  Quiet() {
    spdlog::set_level(spdlog::level::off);
    ::unsetenv("PRECOG_CACHE_DIR");
  }
};
const Quiet quiet;

std::string jsonl_example(const std::string& id, const std::string& a, const std::string& b, const std::string& label) {
  ordered_json j;
  j["id"] = id;
  j["a"] = a;
  if (!b.empty()) j["b"] = b;
  j["label"] = label;
  return j.dump() + "\n";
}

/// Two tasks of random sentences, a corpus, and predictions that are right
/// for two examples in three.
void write_random_fixture(const Workspace& ws, int per_task = 12) {
  std::mt19937 rng(31);
  ws.write("vocab.txt", testing::small_vocab_text());
  std::string corpus;
  for (int i = 0; i < 40; ++i) corpus += testing::random_sentence(rng, 4, 12) + "\n";
  ws.write("corpus.txt", corpus);
  for (const std::string task : {"single", "pair"}) {
    std::string ds, preds;
    for (int i = 0; i < per_task; ++i) {
      const std::string id = task + std::to_string(i);
      const std::string b = task == "pair" ? testing::random_sentence(rng, 2, 6) : "";
      const std::string label = std::to_string(rng() % 2);
      ds += jsonl_example(id, testing::random_sentence(rng, 2, 10), b, label);
      preds += json{{"id", id}, {"label", i % 3 ? label : "wrong"}}.dump() + "\n";
    }
    ws.write(task + ".jsonl", ds);
    ws.write(task + ".pred.jsonl", preds);
  }
}

RunConfig random_config(const Workspace& ws) {
  const ordered_json j = {
      {"vocab", "vocab.txt"},
      {"backend", {{"mock_corpus", "corpus.txt"}, {"cache", "cache/predictions.jsonl"}}},
      {"k", 5},
      {"tasks",
       {{{"name", "single"}, {"dataset", "single.jsonl"}, {"predictions", {{"model", "single.pred.jsonl"}}}},
        {{"name", "pair"}, {"dataset", "pair.jsonl"}, {"predictions", {{"model", "pair.pred.jsonl"}}}}}},
      {"out", "out"}};
  return parse_config(j, ws.dir());
}

/// Always fails for one example id.
class FlakyBackend final : public MlmBackend {
 public:
  FlakyBackend(std::shared_ptr<MlmBackend> inner, std::string bad) : inner_(std::move(inner)), bad_(std::move(bad)) {}
  TopKPrediction predict_topk(const MaskedVariant& v, int k) override {
    if (v.example_id == bad_) throw BackendError("injected failure", v.example_id, v.masked_index);
    return inner_->predict_topk(v, k);
  }
  std::string kind() const override { return inner_->kind(); }
  std::string model_id() const override { return inner_->model_id(); }

 private:
  std::shared_ptr<MlmBackend> inner_;
  std::string bad_;
};

}  // namespace

TEST_CASE("config parsing") {
  Workspace ws("config");
  const ordered_json j = {{"vocab", "v.txt"},
                          {"backend", {{"url", "http://localhost:8080"}}},
                          {"measures", {"lexcov", "length"}},
                          {"tasks", {{{"name", "sst2"}, {"dataset", "/abs/d.tsv"}, {"format", "tsv"},
                                      {"id", nullptr}, {"a", "sentence"}}}}};
  const RunConfig c = parse_config(j, ws.dir());
  CHECK(c.vocab == ws.path("v.txt"));
  CHECK(c.backend.url == "http://localhost:8080");
  CHECK(c.k == 100);
  CHECK(c.bin_width == 20);
  CHECK(c.measures == std::vector<Measure>{Measure::lexcov, Measure::length});
  REQUIRE(c.tasks.size() == 1);
  CHECK(c.tasks[0].dataset == "/abs/d.tsv");
  CHECK(c.tasks[0].format == DatasetFormat::tsv);
  CHECK(c.tasks[0].schema.id_field.empty());
  CHECK(c.tasks[0].schema.b_field.empty());
  CHECK_NOTHROW(c.validate());

  CHECK_THROWS_AS(parse_config(ordered_json{{"measures", {"precog", "perplexity"}}}), ConfigError);
  CHECK_THROWS_AS(parse_config(ordered_json{{"k", "many"}}), ConfigError);
  CHECK_THROWS_AS(parse_config(ordered_json{{"tasks", {{{"dataset", "x"}}}}}), ConfigError);
  RunConfig bad = c;
  bad.bin_width = 30;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = c;
  bad.backend.mock_corpus = "corpus.txt";
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = c;
  bad.tasks.push_back(bad.tasks[0]);
  CHECK_THROWS_AS(bad.validate(), ConfigError);

  ws.write("run.json", "{\"vocab\": \"sub/v.txt\", \"out\": \"o\"}");
  const RunConfig loaded = load_config(ws.path("run.json"));
  CHECK(loaded.vocab == ws.path("sub/v.txt"));
  CHECK(loaded.scores_path() == ws.path("o") / "scores.jsonl");
  CHECK_THROWS_AS(load_config(ws.path("missing.json")), ConfigError);
  ws.write("broken.json", "{\"vocab\": ");
  CHECK_THROWS_AS(load_config(ws.path("broken.json")), ConfigError);
}

TEST_CASE("three examples times three measures give nine records in order") {
  Workspace ws("nine");
  ws.write("vocab.txt", testing::small_vocab_text());
  ws.write("corpus.txt", "the cat sat on the mat .\nthe dog ran .\n");
  ws.write("d.jsonl", jsonl_example("e1", "the cat sat .", "", "1") + jsonl_example("e2", "a zebra ran", "", "0") +
                          jsonl_example("e3", "the big red dog sat on the mat quickly .", "", "1"));
  RunConfig c = parse_config(ordered_json{{"vocab", "vocab.txt"},
                                          {"backend", {{"mock_corpus", "corpus.txt"}}},
                                          {"k", 3},
                                          {"tasks", {{{"name", "t"}, {"dataset", "d.jsonl"}}}},
                                          {"out", "out"}},
                             ws.dir());
  const auto r = cmd_score(c);
  CHECK(r.exit_code == 0);
  const auto records = parse_scores(ws.read("out/scores.jsonl"));
  REQUIRE(records.size() == 9);
  const std::string ids[] = {"e1", "e2", "e3"};
  for (std::size_t i = 0; i < 9; ++i) {
    CHECK(records[i].example_id == ids[i / 3]);
    CHECK(records[i].measure == kAllMeasures[i % 3]);
    CHECK(records[i].value >= 0.0);
    CHECK(records[i].value <= 1.0);
  }
  // corpus counts: the 3, . 2 -> top-3 {the, ., cat}
  CHECK(records[0].hits == std::vector<bool>{true, true, false, true});
  CHECK(records[0].value == 0.75);
  CHECK(records[0].k == 3);
  CHECK(records[4].oov_words == std::vector<std::string>{"zebra"});
  CHECK(records[5].value == 0.0);  // shortest example
  CHECK(records[8].value == 1.0);  // longest example

  const json manifest = json::parse(ws.read("out/score_manifest.json"));
  CHECK(manifest["command"] == "score");
  CHECK(manifest["backend"]["kind"] == "mock");
  CHECK(manifest["failed"].empty());
  CHECK(manifest["per_task"]["t"]["scored"] == 3);
}

TEST_CASE("scores do not depend on the number of jobs") {
  Workspace ws("jobs");
  write_random_fixture(ws, 30);
  RunConfig c = random_config(ws);
  c.backend.cache.clear();
  c.jobs = 1;
  REQUIRE(cmd_score(c).exit_code == 0);
  const std::string serial = ws.read("out/scores.jsonl");
  c.jobs = 8;
  REQUIRE(cmd_score(c).exit_code == 0);
  CHECK(ws.read("out/scores.jsonl") == serial);
  CHECK(std::count(serial.begin(), serial.end(), '\n') == 180);
}

TEST_CASE("prediction cache: cold, warm, cache-only and resumed runs agree") {
  Workspace ws("cache");
  write_random_fixture(ws);
  RunConfig c = random_config(ws);
  const fs::path cache_path = c.backend.cache;

  REQUIRE(cmd_score(c).exit_code == 0);
  const std::string cold = ws.read("out/scores.jsonl");
  const std::size_t entries = PredictionCache::stats(cache_path).entries;
  CHECK(entries > 0);

  SUBCASE("warm run makes no backend calls") {
    const Vocabulary vocab = load_vocabulary(c.vocab);
    auto inner = std::shared_ptr<MlmBackend>(mock_backend_from_corpus(load_corpus(c.backend.mock_corpus, vocab), vocab));
    auto cached = std::make_shared<CachingBackend>(std::make_shared<PredictionCache>(cache_path), inner);
    REQUIRE(cmd_score(c, cached).exit_code == 0);
    CHECK(cached->misses() == 0);
    CHECK(cached->hits() == entries);
    CHECK(ws.read("out/scores.jsonl") == cold);
  }
  SUBCASE("cache-only run") {
    RunConfig only = c;
    only.backend.mock_corpus.clear();
    REQUIRE(cmd_score(only).exit_code == 0);
    CHECK(ws.read("out/scores.jsonl") == cold);
  }
  SUBCASE("cache-only run with a different k fails cleanly") {
    RunConfig only = c;
    only.backend.mock_corpus.clear();
    only.k = 7;
    CHECK(cmd_score(only).exit_code == 1);
  }
  SUBCASE("interrupted run resumes to the same output") {
    const std::string full = Workspace::slurp(cache_path);
    std::size_t cut = 0;
    for (std::size_t i = 0, lines = 0; i < full.size() && lines < entries / 2; ++i) {
      if (full[i] == '\n') {
        ++lines;
        cut = i + 1;
      }
    }
    // half the entries plus a torn final line
    std::ofstream(cache_path, std::ios::binary | std::ios::trunc) << full.substr(0, cut + 15);
    REQUIRE(cmd_score(c).exit_code == 0);
    CHECK(ws.read("out/scores.jsonl") == cold);
    const auto stats = PredictionCache::stats(cache_path);
    CHECK(stats.entries == entries);
    CHECK(stats.malformed_lines == 1);
  }
  SUBCASE("PRECOG_CACHE_DIR supplies the cache") {
    RunConfig env = c;
    env.backend.cache.clear();
    env.backend.mock_corpus.clear();
    ::setenv("PRECOG_CACHE_DIR", cache_path.parent_path().c_str(), 1);
    const auto r = cmd_score(env);
    ::unsetenv("PRECOG_CACHE_DIR");
    REQUIRE(r.exit_code == 0);
    CHECK(ws.read("out/scores.jsonl") == cold);
  }
}

TEST_CASE("a failing example loses all its measures and the run reports it") {
  Workspace ws("flaky");
  write_random_fixture(ws);
  RunConfig c = random_config(ws);
  c.backend.cache.clear();
  const Vocabulary vocab = load_vocabulary(c.vocab);
  auto inner = std::shared_ptr<MlmBackend>(mock_backend_from_corpus(load_corpus(c.backend.mock_corpus, vocab), vocab));
  const auto r = cmd_score(c, std::make_shared<FlakyBackend>(inner, "pair/pair3"));
  CHECK(r.exit_code == 1);
  const auto records = parse_scores(ws.read("out/scores.jsonl"));
  CHECK(records.size() == 23 * 3);
  for (const auto& rec : records) CHECK(rec.example_id != "pair3");
  const json manifest = json::parse(ws.read("out/score_manifest.json"));
  REQUIRE(manifest["failed"].size() == 1);
  CHECK(manifest["failed"][0]["id"] == "pair3");
  CHECK(manifest["per_task"]["pair"]["scored"] == 11);
}

TEST_CASE("lexcov and length run without a backend") {
  Workspace ws("nobackend");
  write_random_fixture(ws);
  RunConfig c = random_config(ws);
  c.backend = {};
  c.measures = {Measure::lexcov, Measure::length};
  REQUIRE(cmd_score(c).exit_code == 0);
  CHECK(parse_scores(ws.read("out/scores.jsonl")).size() == 48);
  c.measures = {Measure::precog};
  CHECK_THROWS_AS(cmd_score(c), ConfigError);
}

TEST_CASE("analyze: perfectly linear fixture") {
  Workspace ws("linear");
  ws.write("vocab.txt", testing::small_vocab_text());
  // points p in bin b: 0,2,..,18 for b = 0 and 20b+2..20b+20 otherwise; T = p + 1
  std::string ds, preds;
  for (int b = 0; b < 5; ++b) {
    for (int i = 0; i < 10; ++i) {
      const int p = b == 0 ? 2 * i : 20 * b + 2 * (i + 1);
      std::string text;
      for (int w = 0; w <= p; ++w) text += "a ";
      const std::string id = "x" + std::to_string(b) + "_" + std::to_string(i);
      ds += jsonl_example(id, text, "", "yes");
      preds += json{{"id", id}, {"label", i < 2 * b + 1 ? "yes" : "no"}}.dump() + "\n";
    }
  }
  ws.write("lin.jsonl", ds);
  ws.write("lin.pred.jsonl", preds);
  RunConfig c = parse_config(ordered_json{{"vocab", "vocab.txt"},
                                          {"measures", {"length"}},
                                          {"tasks", {{{"name", "lin"}, {"dataset", "lin.jsonl"},
                                                      {"predictions", {{"clf", "lin.pred.jsonl"}}}}}},
                                          {"out", "out"}},
                             ws.dir());
  REQUIRE(cmd_score(c).exit_code == 0);
  const auto r = cmd_analyze(c);
  INFO(r.summary);
  REQUIRE(r.exit_code == 0);

  const json corr = json::parse(ws.read("out/correlation.json"));
  REQUIRE(corr["correlations"].size() == 1);
  CHECK(corr["correlations"][0]["measure"] == "length");
  CHECK(corr["correlations"][0]["r"].get<double>() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(corr["correlations"][0]["n_bins"] == 5);
  CHECK(corr["bin_width"] == 20);

  const std::string bins = ws.read("out/bins.csv");
  CHECK(bins.find("length,clf,0,20,10,0.1000\n") != std::string::npos);
  CHECK(bins.find("length,clf,80,100,10,0.9000\n") != std::string::npos);
  const std::string intervals = ws.read("out/intervals.csv");
  INFO(intervals);
  CHECK(intervals.find("lin,length,\"(80,100]\",clf,10,0.9000\n") != std::string::npos);
  CHECK(intervals.find("lin,length,\"[0,80]\",clf,40,0.4000\n") != std::string::npos);

  SUBCASE("reports are byte-identical across runs") {
    const std::string first = ws.read("out/intervals.csv") + ws.read("out/correlation.json") +
                              ws.read("out/bins.csv") + ws.read("out/coverage.csv");
    REQUIRE(cmd_analyze(c).exit_code == 0);
    CHECK(ws.read("out/intervals.csv") + ws.read("out/correlation.json") + ws.read("out/bins.csv") +
              ws.read("out/coverage.csv") ==
          first);
  }
  SUBCASE("mean abscissa") {
    c.corr_abscissa = Abscissa::mean;
    REQUIRE(cmd_analyze(c).exit_code == 0);
    const json m = json::parse(ws.read("out/correlation.json"));
    CHECK(m["abscissa"] == "mean");
  }
}

TEST_CASE("analyze failure modes") {
  Workspace ws("analyze-fail");
  write_random_fixture(ws);
  RunConfig c = random_config(ws);
  c.backend.cache.clear();
  REQUIRE(cmd_score(c).exit_code == 0);

  SUBCASE("empty join") {
    ws.write("single.pred.jsonl", "");
    ws.write("pair.pred.jsonl", "");
    const auto r = cmd_analyze(c);
    CHECK(r.exit_code != 0);
  }
  SUBCASE("scores for unknown examples") {
    std::string scores = ws.read("out/scores.jsonl");
    const auto first_line = scores.substr(0, scores.find('\n') + 1);
    auto rec = json::parse(first_line);
    rec["eid"] = "ghost";
    ws.write("out/scores.jsonl", scores + rec.dump() + "\n");
    const auto r = cmd_analyze(c);
    CHECK(r.exit_code == 1);
    CHECK(r.summary.find("ghost") != std::string::npos);
  }
  SUBCASE("missing scores file") {
    fs::remove(ws.path("out/scores.jsonl"));
    CHECK_THROWS_AS(cmd_analyze(c), ConfigError);
  }
  SUBCASE("one prediction missing is excluded and recorded") {
    std::string preds = ws.read("single.pred.jsonl");
    ws.write("single.pred.jsonl", preds.substr(preds.find('\n') + 1));
    REQUIRE(cmd_analyze(c).exit_code == 0);
    const json m = json::parse(ws.read("out/analyze_manifest.json"));
    REQUIRE(m["excluded"].size() == 2);
    CHECK(m["excluded"][0]["task"] == "single");
    CHECK(m["excluded"][0]["missing_predictions"] == 1);
    CHECK(m["excluded"][1]["missing_predictions"] == 0);
  }
}
