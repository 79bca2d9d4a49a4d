#include "precog/measures.hpp"

#include <algorithm>
#include <unordered_set>

namespace precog {

std::string_view to_string(Measure m) {
  switch (m) {
    case Measure::precog:
      return "precog";
    case Measure::lexcov:
      return "lexcov";
    case Measure::length:
      return "length";
  }
  return "?";
}

std::optional<Measure> parse_measure(std::string_view name) {
  for (Measure m : kAllMeasures) {
    if (to_string(m) == name) return m;
  }
  return std::nullopt;
}

MeasureScore precog(const TokenSequence& seq, MlmBackend& backend, int k, const std::string& example_id,
                    const std::string& mask_token) {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  if (seq.content_length() == 0) throw MeasureError("precog undefined for a sequence with no content tokens");

  MeasureScore score{example_id, Measure::precog, 0.0, {}, {}};
  std::size_t hit_count = 0;
  for (const MaskedVariant& v : make_masked_variants(seq, mask_token, example_id)) {
    const bool hit = backend.predict_topk(v, k).contains(v.original_token);
    score.hits.push_back(hit);
    hit_count += hit;
  }
  score.value = static_cast<double>(hit_count) / static_cast<double>(score.hits.size());
  return score;
}

MeasureScore lexcov(const std::vector<std::string>& words, const Vocabulary& vocab, bool set_semantics,
                    const std::string& example_id) {
  if (words.empty()) throw MeasureError("lexcov undefined for an empty word list");
  MeasureScore score{example_id, Measure::lexcov, 0.0, {}, {}};
  std::unordered_set<std::string> seen;
  for (const std::string& w : words) {
    std::string norm = vocab.normalize(w);
    const bool in_vocab = !norm.starts_with("##") && vocab.contains(norm);
    if (in_vocab) continue;
    if (set_semantics && !seen.insert(norm).second) continue;
    score.oov_words.push_back(w);
  }
  const auto total = static_cast<double>(words.size());
  score.value = (total - static_cast<double>(score.oov_words.size())) / total;
  return score;
}

DatasetLengthStats length_stats(const std::vector<std::size_t>& content_lengths) {
  if (content_lengths.empty()) throw MeasureError("length statistics need a non-empty dataset");
  auto [lo, hi] = std::minmax_element(content_lengths.begin(), content_lengths.end());
  return {*lo, *hi};
}

DatasetLengthStats length_stats(const std::vector<TokenSequence>& dataset) {
  std::vector<std::size_t> lengths;
  lengths.reserve(dataset.size());
  for (const auto& s : dataset) lengths.push_back(s.content_length());
  return length_stats(lengths);
}

MeasureScore length_measure(std::size_t content_length, const DatasetLengthStats& stats,
                            const std::string& example_id) {
  if (content_length < stats.min_len || content_length > stats.max_len) {
    throw MeasureError("length " + std::to_string(content_length) + " outside dataset range [" +
                       std::to_string(stats.min_len) + ", " + std::to_string(stats.max_len) + "]");
  }
  MeasureScore score{example_id, Measure::length, 0.0, {}, {}};
  if (stats.max_len > stats.min_len) {
    score.value = static_cast<double>(content_length - stats.min_len) /
                  static_cast<double>(stats.max_len - stats.min_len);
  }
  return score;
}

MeasureScore length_measure(const TokenSequence& seq, const DatasetLengthStats& stats,
                            const std::string& example_id) {
  return length_measure(seq.content_length(), stats, example_id);
}

}  // namespace precog
