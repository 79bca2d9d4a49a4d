#include <doctest.h>

#include <algorithm>
#include <map>
#include <random>

#include "oracles.hpp"
#include "precog/measures.hpp"
#include "precog/tokenizer.hpp"

using namespace precog;

namespace {

std::vector<std::string> base_entries() { return {"[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"}; }

TokenSequence seq_of(const std::vector<std::string>& content) {
  TokenSequence s;
  s.tokens.push_back("[CLS]");
  s.tokens.insert(s.tokens.end(), content.begin(), content.end());
  s.tokens.push_back("[SEP]");
  s.is_special.assign(s.tokens.size(), false);
  s.is_special.front() = s.is_special.back() = true;
  s.segment_ids.assign(s.tokens.size(), 0);
  return s;
}

/// Fixed ranking regardless of context.
class ListBackend final : public MlmBackend {
 public:
  explicit ListBackend(std::vector<std::string> ranking) : ranking_(std::move(ranking)) {}
  TopKPrediction predict_topk(const MaskedVariant&, int k) override {
    const auto n = std::min<std::size_t>(static_cast<std::size_t>(k), ranking_.size());
    ++calls;
    return {{ranking_.begin(), ranking_.begin() + static_cast<std::ptrdiff_t>(n)}, k};
  }
  std::string kind() const override { return "list"; }
  std::string model_id() const override { return "fixed"; }
  std::size_t calls = 0;

 private:
  std::vector<std::string> ranking_;
};

}  // namespace

TEST_CASE("measure names") {
  for (Measure m : kAllMeasures) CHECK(parse_measure(to_string(m)) == m);
  CHECK(to_string(Measure::lexcov) == "lexcov");
  CHECK_FALSE(parse_measure("PreCog"));
}

TEST_CASE("precog examples") {
  ListBackend b({"the", "on"});
  SUBCASE("two hits of five") {
    const auto s = precog::precog(seq_of({"the", "cat", "sat", "on", "mat"}), b, 2, "ex");
    CHECK(s.value == 0.4);
    CHECK(s.hits == std::vector<bool>{true, false, false, true, false});
    CHECK(b.calls == 5);
    CHECK(s.example_id == "ex");
  }
  SUBCASE("k limits the candidates") {
    CHECK(precog::precog(seq_of({"the", "cat", "sat", "on", "mat"}), b, 1).value == 0.2);
  }
  SUBCASE("all hits and no hits") {
    CHECK(precog::precog(seq_of({"the", "the", "on"}), b, 2).value == 1.0);
    CHECK(precog::precog(seq_of({"cat"}), b, 2).value == 0.0);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(precog::precog(seq_of({}), b, 2), MeasureError);
    CHECK_THROWS_AS(precog::precog(seq_of({"the"}), b, 0), std::invalid_argument);
  }
}

TEST_CASE("precog on tokenized text with the unigram backend") {
  auto entries = base_entries();
  for (const char* w : {"the", "cat", "sat", "on", "mat", ".", "dog"}) entries.emplace_back(w);
  const Vocabulary v(entries);
  const auto corpus = std::vector<TokenSequence>{tokenize("the cat sat on the mat . the dog sat .", std::nullopt, v)};
  auto mock = mock_backend_from_corpus(corpus, v);
  // counts: the 3, sat 2, . 2, cat 1, on 1, mat 1, dog 1
  const auto s = tokenize("The dog sat.", std::nullopt, v);
  CHECK(precog::precog(s, *mock, 1).value == 0.25);  // the
  CHECK(precog::precog(s, *mock, 2).value == 0.5);   // the, sat
  CHECK(precog::precog(s, *mock, 3).value == 0.75);  // + .
  CHECK(precog::precog(s, *mock, 100).value == 1.0);
}

TEST_CASE("lexcov examples") {
  auto entries = base_entries();
  for (const char* w : {"the", "cat", "sat", "on", "mat", ".", "##s"}) entries.emplace_back(w);
  const Vocabulary v(entries);
  SUBCASE("eight words, two out of vocabulary") {
    const auto words = word_split("The cat sat on the zebra mat quokka");
    REQUIRE(words.size() == 8);
    const auto s = lexcov(words, v);
    CHECK(s.value == 0.75);
    CHECK(s.oov_words == std::vector<std::string>{"zebra", "quokka"});
  }
  SUBCASE("continuation pieces do not count as words") {
    CHECK(lexcov({"s"}, v).value == 0.0);
    CHECK(lexcov({"cats"}, v).value == 0.0);
  }
  SUBCASE("occurrence versus set semantics") {
    const std::vector<std::string> words{"zz", "ZZ", "the", "cat"};
    CHECK(lexcov(words, v).value == 0.5);
    const auto set = lexcov(words, v, true);
    CHECK(set.value == 0.75);
    CHECK(set.oov_words == std::vector<std::string>{"zz"});
  }
  SUBCASE("cased vocabulary") {
    const Vocabulary cased(entries, {}, true);
    CHECK(lexcov({"The", "the"}, cased).value == 0.5);
  }
  SUBCASE("empty input") { CHECK_THROWS_AS(lexcov({}, v), MeasureError); }
}

TEST_CASE("length statistics and measure") {
  CHECK(length_stats(std::vector<std::size_t>{3, 7, 7, 12}).min_len == 3);
  CHECK(length_stats(std::vector<std::size_t>{3, 7, 7, 12}).max_len == 12);
  CHECK_THROWS_AS(length_stats(std::vector<std::size_t>{}), MeasureError);

  const DatasetLengthStats st{5, 25};
  CHECK(length_measure(10, st).value == 0.25);
  CHECK(length_measure(5, st).value == 0.0);
  CHECK(length_measure(25, st).value == 1.0);
  CHECK(length_measure(7, DatasetLengthStats{7, 7}).value == 0.0);
  CHECK_THROWS_AS(length_measure(4, st), MeasureError);
  CHECK_THROWS_AS(length_measure(26, st), MeasureError);

  SUBCASE("10,000 random lengths") {
    std::mt19937 rng(8);
    std::vector<std::size_t> lengths;
    std::size_t lo = 1000, hi = 0;
    for (int i = 0; i < 10000; ++i) {
      const std::size_t t = 1 + rng() % 510;
      lengths.push_back(t);
      lo = std::min(lo, t);
      hi = std::max(hi, t);
    }
    const auto s = length_stats(lengths);
    CHECK(s.min_len == lo);
    CHECK(s.max_len == hi);
    double prev = -1.0;
    std::sort(lengths.begin(), lengths.end());
    for (std::size_t t : lengths) {
      const double value = length_measure(t, s).value;
      CHECK(value >= prev);  // ranking follows length
      CHECK(value >= 0.0);
      CHECK(value <= 1.0);
      prev = value;
    }
  }
}

TEST_CASE("property: precog agrees with the brute-force definition, stays in range, grows with k") {
  std::vector<std::string> words;
  auto entries = base_entries();
  for (int i = 0; i < 30; ++i) {
    words.push_back("w" + std::to_string(i));
    entries.push_back(words.back());
  }
  const Vocabulary v(entries);
  std::mt19937 rng(77);
  auto draw = [&](std::size_t n) {
    std::vector<std::string> c;
    for (std::size_t i = 0; i < n; ++i) c.push_back(words[std::min(rng() % 30, rng() % 30)]);
    return c;
  };
  std::vector<TokenSequence> corpus;
  for (int i = 0; i < 50; ++i) corpus.push_back(seq_of(draw(10)));
  auto mock = mock_backend_from_corpus(corpus, v);

  for (int trial = 0; trial < 300; ++trial) {
    const auto content = draw(1 + rng() % 12);
    const auto seq = seq_of(content);
    double prev = -1.0;
    for (int k : {1, 3, 10, 30}) {
      const MeasureScore s = precog::precog(seq, *mock, k);
      const auto topk = mock->predict_topk(make_masked_variants(seq, "[MASK]")[0], k).tokens;
      CHECK(s.value == oracle::precog_bruteforce(content, topk));
      CHECK(s.value >= 0.0);
      CHECK(s.value <= 1.0);
      CHECK(s.value >= prev);
      prev = s.value;
    }
    auto shuffled = content;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    CHECK(precog::precog(seq_of(shuffled), *mock, 3).value == precog::precog(seq, *mock, 3).value);
  }
}

TEST_CASE("property: lexcov stays in range and set semantics never lowers it") {
  auto entries = base_entries();
  for (const char* w : {"a", "b", "c"}) entries.emplace_back(w);
  const Vocabulary v(entries);
  const char* pool[] = {"a", "b", "c", "x", "y", "X"};
  std::mt19937 rng(4);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<std::string> words;
    for (std::size_t i = 0; i < 1 + rng() % 10; ++i) words.emplace_back(pool[rng() % 6]);
    const double occ = lexcov(words, v).value;
    const double set = lexcov(words, v, true).value;
    CHECK(occ >= 0.0);
    CHECK(occ <= 1.0);
    CHECK(set >= occ);
    CHECK(set <= 1.0);
  }
}
