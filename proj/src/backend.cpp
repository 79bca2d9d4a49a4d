#include "precog/backend.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <unordered_set>

namespace precog {

std::vector<std::string> MaskedVariant::rendered_tokens() const {
  std::vector<std::string> out = base->tokens;
  out[masked_index] = mask_token;
  return out;
}

bool TopKPrediction::contains(const std::string& token) const {
  return std::find(tokens.begin(), tokens.end(), token) != tokens.end();
}

std::vector<MaskedVariant> make_masked_variants(const TokenSequence& seq, const std::string& mask_token,
                                                const std::string& example_id) {
  auto base = std::make_shared<const TokenSequence>(seq);
  std::vector<MaskedVariant> out;
  out.reserve(seq.content_length());
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (seq.is_special[i]) continue;
    out.push_back(MaskedVariant{base, i, seq.tokens[i], mask_token, example_id});
  }
  return out;
}

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string backend_fingerprint(std::string_view kind, std::string_view model_id, int k) {
  std::string key;
  key.append(kind).push_back('\0');
  key.append(model_id).push_back('\0');
  key.append(std::to_string(k));
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(key)));
  return buf;
}

MockBackend::MockBackend(const std::vector<TokenSequence>& corpus, const Vocabulary& vocab) {
  if (corpus.empty()) throw std::invalid_argument("mock backend needs a non-empty corpus");
  std::map<TokenId, std::size_t> counts;
  for (const TokenSequence& seq : corpus) {
    for (std::size_t i = 0; i < seq.size(); ++i) {
      if (seq.is_special[i]) continue;
      auto id = vocab.id(seq.tokens[i]);
      if (!id) throw std::invalid_argument("mock corpus token not in vocabulary: " + seq.tokens[i]);
      ++counts[*id];
    }
  }
  std::vector<std::pair<TokenId, std::size_t>> sorted(counts.begin(), counts.end());
  std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.second > b.second; });

  std::uint64_t h = fnv1a64("mock-unigram");
  ranking_.reserve(sorted.size());
  for (const auto& [id, count] : sorted) {
    ranking_.emplace_back(vocab.token(id), count);
    h = fnv1a64(vocab.token(id), h);
    h = fnv1a64(std::string_view("\t" + std::to_string(count) + "\n"), h);
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  model_id_ = std::string("unigram-") + buf;
}

TopKPrediction MockBackend::predict_topk(const MaskedVariant& variant, int k) {
  if (k < 1) throw BackendError("k must be >= 1", variant.example_id, variant.masked_index);
  TopKPrediction out;
  out.k = k;
  const std::size_t n = std::min(ranking_.size(), static_cast<std::size_t>(k));
  out.tokens.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.tokens.push_back(ranking_[i].first);
  return out;
}

std::unique_ptr<MockBackend> mock_backend_from_corpus(const std::vector<TokenSequence>& corpus,
                                                      const Vocabulary& vocab) {
  return std::make_unique<MockBackend>(corpus, vocab);
}

void validate_prediction(const TopKPrediction& prediction, const Vocabulary& vocab, const MaskedVariant& variant) {
  if (prediction.tokens.size() > static_cast<std::size_t>(prediction.k)) {
    throw BackendError("backend returned " + std::to_string(prediction.tokens.size()) + " tokens for k=" +
                           std::to_string(prediction.k),
                       variant.example_id, variant.masked_index);
  }
  std::unordered_set<std::string_view> seen;
  for (const std::string& t : prediction.tokens) {
    if (!seen.insert(t).second) {
      throw BackendError("duplicate predicted token '" + t + "'", variant.example_id, variant.masked_index);
    }
    if (!vocab.contains(t)) {
      throw BackendError("predicted token '" + t + "' not in vocabulary", variant.example_id, variant.masked_index);
    }
  }
}

}  // namespace precog
