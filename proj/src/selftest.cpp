#include "precog/selftest.hpp"

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "precog/analytics.hpp"
#include "precog/backend.hpp"
#include "precog/file_util.hpp"
#include "precog/measures.hpp"
#include "precog/pipeline.hpp"
#include "precog/prediction_cache.hpp"
#include "precog/report.hpp"
#include "precog/statistics.hpp"
#include "precog/tokenizer.hpp"

namespace precog {

namespace fs = std::filesystem;

namespace {

constexpr const char* kWords[] = {
    "the", "a", "cat", "dog", "sat", "on", "mat", "and", "was", "is", "it", "of", "to", "in", "that",
    "he", "she", "they", "saw", "ran", "big", "small", "red", "house", "tree", "river", "quick", "brown",
    "fox", "jump", "walk", "talk", "play", "happy", "sad", "day", "night", "good", "bad", "new", "old",
    "man", "woman", "child", "book", "read", "write", "city", "park", "very"};
constexpr const char* kSuffixes[] = {"##s", "##ed", "##ing", "##ly", "##er"};
constexpr const char* kOov[] = {"qzxv", "blorf", "zyzzyva"};

std::uint32_t draw(std::mt19937& rng, std::uint32_t n) { return static_cast<std::uint32_t>(rng() % n); }

std::string make_sentence(std::mt19937& rng) {
  const std::uint32_t len = 3 + draw(rng, 8);
  std::string s;
  for (std::uint32_t i = 0; i < len; ++i) {
    if (i) s += ' ';
    const std::uint32_t roll = draw(rng, 100);
    if (roll < 8) {
      s += kOov[draw(rng, std::size(kOov))];
    } else if (roll < 16) {
      s += kWords[draw(rng, std::size(kWords))];
      s += "s";
    } else {
      // skew towards the head of the list so some tokens dominate
      const std::uint32_t a = draw(rng, std::size(kWords));
      const std::uint32_t b = draw(rng, std::size(kWords));
      s += kWords[std::min(a, b)];
    }
  }
  s += draw(rng, 4) == 0 ? " !" : " .";
  return s;
}

struct Fixture {
  Vocabulary vocab;
  std::vector<Example> examples;
  std::vector<TokenSequence> sequences;
  std::shared_ptr<MockBackend> mock;
};

Fixture make_fixture(const Vocabulary& vocab) {
  Fixture f{vocab, bundled_examples(), {}, {}};
  for (const auto& e : f.examples) {
    f.sequences.push_back(
        tokenize(e.segment_a, e.segment_b ? std::optional<std::string_view>(*e.segment_b) : std::nullopt, f.vocab));
  }
  f.mock = mock_backend_from_corpus(f.sequences, f.vocab);
  return f;
}

void require(bool cond, const std::string& what) {
  if (!cond) throw std::runtime_error(what);
}

// Direct evaluation of the PreCog ratio without the variant machinery.
double direct_precog(const TokenSequence& seq, const MockBackend& mock, int k) {
  std::set<std::string> top;
  for (std::size_t i = 0; i < mock.ranking().size() && i < static_cast<std::size_t>(k); ++i)
    top.insert(mock.ranking()[i].first);
  std::size_t t = 0, hits = 0;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (seq.is_special[i]) continue;
    ++t;
    hits += top.contains(seq.tokens[i]);
  }
  return static_cast<double>(hits) / static_cast<double>(t);
}

struct TempDir {
  fs::path path;
  TempDir() : path(fs::temp_directory_path() / ("precog-selftest-" + std::to_string(::getpid()))) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

std::string slurp(const fs::path& p) { return read_file(p); }

}  // namespace

const std::string& bundled_vocabulary_text() {
  static const std::string text = [] {
    std::string s = "[PAD]\n[UNK]\n[CLS]\n[SEP]\n[MASK]\n.\n,\n!\n?\n-\n'\nun\n##aff\n##able\n";
    for (const char* w : kWords) s += std::string(w) + "\n";
    for (const char* w : kSuffixes) s += std::string(w) + "\n";
    return s;
  }();
  return text;
}

std::vector<Example> bundled_examples() {
  std::mt19937 rng(20230612u);
  std::vector<Example> out;
  for (int i = 0; i < 30; ++i) {
    out.push_back(Example{"s" + std::to_string(i), "single", make_sentence(rng), std::nullopt,
                          std::to_string(draw(rng, 2))});
  }
  for (int i = 0; i < 20; ++i) {
    std::string a = make_sentence(rng);
    std::string b = make_sentence(rng);
    out.push_back(Example{"p" + std::to_string(i), "pair", std::move(a), std::move(b), std::to_string(draw(rng, 3))});
  }
  return out;
}

std::vector<CheckResult> run_selftest(const std::optional<std::string>& vocabulary_text) {
  std::vector<CheckResult> results;
  auto run = [&](const std::string& name, const std::function<std::string()>& body) {
    CheckResult r{name, false, {}};
    try {
      r.detail = body();
      r.passed = true;
    } catch (const std::exception& e) {
      r.detail = e.what();
    }
    results.push_back(std::move(r));
  };

  std::optional<Vocabulary> vocab;
  run("vocabulary", [&] {
    Vocabulary v = parse_vocabulary(vocabulary_text ? *vocabulary_text : bundled_vocabulary_text());
    for (std::size_t i = 0; i < v.size(); ++i) {
      require(v.id(v.token(static_cast<TokenId>(i))) == static_cast<TokenId>(i), "ids not contiguous");
    }
    const std::size_t n = v.size();
    vocab.emplace(std::move(v));
    return std::to_string(n) + " entries";
  });
  if (!vocab) vocab.emplace(parse_vocabulary(bundled_vocabulary_text()));

  std::optional<Fixture> fixture;
  run("tokenizer", [&] {
    const Vocabulary tiny(std::vector<std::string>{"[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]", "un", "##aff",
                                                   "##able", "hello"});
    const auto seq = tokenize("unaffable", std::nullopt, tiny);
    require(seq.tokens == std::vector<std::string>{"[CLS]", "un", "##aff", "##able", "[SEP]"}, "wordpiece split");
    const auto pair = tokenize("hello", std::string_view("qzxv"), tiny);
    require(std::count(pair.tokens.begin(), pair.tokens.end(), "[SEP]") == 2, "pair separators");
    require(pair.tokens[3] == "[UNK]", "unknown word");
    require(tokenize("unaffable", std::nullopt, tiny) == seq, "determinism");
    fixture.emplace(make_fixture(*vocab));
    return std::to_string(fixture->sequences.size()) + " examples tokenized";
  });
  if (!fixture) fixture.emplace(make_fixture(*vocab));
  const Fixture& fx = *fixture;

  run("masked-variants", [&] {
    std::size_t total = 0;
    for (const auto& seq : fx.sequences) {
      const auto variants = make_masked_variants(seq, fx.vocab.specials().mask);
      require(variants.size() == seq.content_length(), "variant count differs from T");
      for (const auto& v : variants) {
        require(!seq.is_special[v.masked_index], "special token masked");
        require(v.rendered_tokens()[v.masked_index] == fx.vocab.specials().mask, "mask not rendered");
      }
      total += variants.size();
    }
    return std::to_string(total) + " variants";
  });

  run("precog-oracle", [&] {
    for (const int k : {1, 5, 20, 100}) {
      for (const auto& seq : fx.sequences) {
        const double piped = precog(seq, *fx.mock, k).value;
        require(piped == direct_precog(seq, *fx.mock, k), "pipeline and direct evaluation disagree");
      }
    }
    return std::string("exact agreement for k in {1,5,20,100}");
  });

  run("measure-range", [&] {
    const auto stats = length_stats(fx.sequences);
    for (std::size_t i = 0; i < fx.sequences.size(); ++i) {
      const auto& seq = fx.sequences[i];
      double prev = -1.0;
      for (const int k : {1, 10, 100}) {
        const double v = precog(seq, *fx.mock, k).value;
        require(v >= 0.0 && v <= 1.0, "precog out of range");
        require(v >= prev, "precog decreased with k");
        prev = v;
      }
      auto words = word_split(fx.examples[i].segment_a);
      const double lc = lexcov(words, fx.vocab).value;
      const double ln = length_measure(seq, stats).value;
      require(lc >= 0.0 && lc <= 1.0 && ln >= 0.0 && ln <= 1.0, "lexcov/length out of range");
    }
    return std::string("all values in [0,1]; precog nondecreasing in k");
  });

  run("cache-transparency", [&] {
    TempDir tmp;
    const fs::path cache_path = tmp.path / "cache.jsonl";
    auto mock = std::shared_ptr<MlmBackend>(fx.mock, fx.mock.get());
    std::vector<double> bare, cold, warm;
    for (const auto& seq : fx.sequences) bare.push_back(precog(seq, *fx.mock, 10).value);
    {
      CachingBackend cached(std::make_shared<PredictionCache>(cache_path), mock);
      for (std::size_t i = 0; i < fx.sequences.size(); ++i)
        cold.push_back(precog(fx.sequences[i], cached, 10, fx.examples[i].id).value);
    }
    CachingBackend cache_only(std::make_shared<PredictionCache>(cache_path), nullptr);
    for (std::size_t i = 0; i < fx.sequences.size(); ++i)
      warm.push_back(precog(fx.sequences[i], cache_only, 10, fx.examples[i].id).value);
    require(bare == cold && cold == warm, "cached scores differ from bare backend");
    return std::string("bare == cold == warm (cache-only)");
  });

  std::vector<ScoredOutcome> outcomes;
  {
    std::mt19937 rng(7u);
    for (std::size_t i = 0; i < fx.sequences.size(); ++i) {
      const double v = precog(fx.sequences[i], *fx.mock, 10).value;
      const bool correct = draw(rng, 100) < static_cast<std::uint32_t>(30 + 60 * v);
      outcomes.push_back({fx.examples[i].id, fx.examples[i].task, Measure::precog, v, correct});
    }
  }

  run("binning-partition", [&] {
    const auto bins = bin_examples(outcomes, 20);
    std::size_t sum = 0;
    for (const auto& b : bins) sum += b.count;
    require(sum == outcomes.size(), "bin counts do not sum to total");
    const auto split = interval_split(outcomes);
    require(split.total() == outcomes.size(), "interval counts do not sum to total");
    return std::to_string(sum) + " examples in " + std::to_string(bins.size()) + " bins";
  });

  run("pooling-identity", [&] {
    std::map<std::string, std::vector<ScoredOutcome>> by_task;
    for (const auto& o : outcomes) by_task[o.task].push_back(o);
    std::map<std::string, std::vector<Bin>> per_task;
    for (const auto& [t, os] : by_task) per_task[t] = bin_examples(os, 20);
    const auto pooled = weighted_task_aggregate(per_task);
    const auto direct = bin_examples(outcomes, 20);
    for (std::size_t i = 0; i < pooled.size(); ++i) {
      require(pooled[i].count == direct[i].count && pooled[i].correct_count == direct[i].correct_count,
              "pooled bins differ from direct binning");
    }
    return std::string("pooled == direct");
  });

  run("pearson", [&] {
    const std::vector<double> xs{10, 30, 50, 70, 90}, ys{0.2, 0.4, 0.5, 0.6, 0.9};
    const auto a = pearson(xs, ys);
    const auto b = pearson(ys, xs);
    require(std::fabs(a.r - 0.9773555548504418) < 1e-9, "r mismatch");
    require(std::fabs(a.p_value - 0.004076577587785468) < 1e-9, "p mismatch");
    require(std::fabs(a.r - b.r) < 1e-12, "asymmetric");
    return "r=" + format_fixed(a.r) + " p=" + format_fixed(a.p_value);
  });

  run("coverage", [&] {
    const auto bins = bin_examples(outcomes, 20);
    const auto curve = coverage_curve(bins, outcomes.size());
    double sum = 0;
    for (double p : curve.percent) sum += p;
    require(std::fabs(sum - 100.0) < 1e-9, "percents do not sum to 100");
    require(std::is_sorted(curve.cumulative.begin(), curve.cumulative.end()) && curve.cumulative.back() == 100.0,
            "cumulative curve malformed");
    return std::string("percents sum to 100");
  });

  run("end-to-end", [&] {
    TempDir tmp;
    {
      std::ofstream vocab_out(tmp.path / "vocab.txt");
      for (const auto& entry : fx.vocab.entries()) vocab_out << entry << '\n';
      std::string corpus;
      for (const auto& e : fx.examples) corpus += e.segment_a + (e.segment_b ? "\t" + *e.segment_b : "") + "\n";
      std::ofstream(tmp.path / "corpus.txt") << corpus;
      std::map<std::string, std::vector<Example>> by_task;
      for (const auto& e : fx.examples) by_task[e.task].push_back(e);
      for (const auto& [task, exs] : by_task) {
        std::ofstream(tmp.path / (task + ".jsonl")) << format_dataset_jsonl(exs);
        std::string preds;
        std::mt19937 rng(11u);
        for (const auto& e : exs) {
          const bool flip = draw(rng, 4) == 0;
          preds += "{\"id\":\"" + e.id + "\",\"label\":\"" + (flip ? std::string("x") : e.gold_label) + "\"}\n";
        }
        std::ofstream(tmp.path / (task + ".pred.jsonl")) << preds;
      }
    }
    RunConfig cfg;
    cfg.vocab = tmp.path / "vocab.txt";
    cfg.backend.mock_corpus = tmp.path / "corpus.txt";
    cfg.backend.cache = tmp.path / "cache.jsonl";
    cfg.k = 10;
    cfg.jobs = 4;
    for (const char* task : {"pair", "single"}) {
      TaskConfig tc;
      tc.schema.task = task;
      tc.dataset = tmp.path / (std::string(task) + ".jsonl");
      tc.predictions.emplace_back("model", tmp.path / (std::string(task) + ".pred.jsonl"));
      cfg.tasks.push_back(std::move(tc));
    }
    std::vector<std::string> snapshots;
    for (int pass = 0; pass < 2; ++pass) {
      cfg.out = tmp.path / ("out" + std::to_string(pass));
      const auto s = cmd_score(cfg);
      require(s.exit_code == 0, "score failed: " + s.summary);
      const auto a = cmd_analyze(cfg);
      require(a.exit_code <= 1, "analyze failed: " + a.summary);
      std::string all;
      for (const char* f : {"scores.jsonl", "bins.csv", "intervals.csv", "correlation.json", "coverage.csv"})
        all += slurp(cfg.out / f);
      snapshots.push_back(std::move(all));
    }
    require(snapshots[0] == snapshots[1], "reports differ between runs");
    const auto records = parse_scores(slurp(tmp.path / "out0" / "scores.jsonl"));
    require(records.size() == fx.examples.size() * 3, "expected one record per example and measure");
    return std::to_string(records.size()) + " score records; reports byte-identical across runs";
  });

  return results;
}

std::string format_selftest_summary(const std::vector<CheckResult>& results) {
  std::ostringstream os;
  std::size_t passed = 0;
  for (const auto& r : results) {
    os << (r.passed ? "[PASS] " : "[FAIL] ") << r.name;
    if (!r.detail.empty()) os << ": " << r.detail;
    os << '\n';
    passed += r.passed;
  }
  os << passed << "/" << results.size() << " checks passed\n";
  return os.str();
}

}  // namespace precog
