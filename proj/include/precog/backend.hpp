#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "precog/tokenizer.hpp"
#include "precog/vocabulary.hpp"

namespace precog {

inline constexpr int kDefaultTopK = 100;

/// One content position of a sequence replaced by the mask token.
/// `base` is the unmasked sequence; rendered_tokens() yields the masked form.
struct MaskedVariant {
  std::shared_ptr<const TokenSequence> base;
  std::size_t masked_index = 0;
  std::string original_token;
  std::string mask_token;
  std::string example_id;

  std::vector<std::string> rendered_tokens() const;
};

/// Ranked tokens, best first.
struct TopKPrediction {
  std::vector<std::string> tokens;
  int k = kDefaultTopK;

  bool contains(const std::string& token) const;
  bool operator==(const TopKPrediction&) const = default;
};

/// Prediction failure tagged with the example and position it happened at.
class BackendError : public std::runtime_error {
 public:
  BackendError(const std::string& what, std::string example_id, std::size_t masked_index)
      : std::runtime_error(what + " [example " + example_id + ", position " + std::to_string(masked_index) + "]"),
        example_id_(std::move(example_id)),
        masked_index_(masked_index) {}
  const std::string& example_id() const noexcept { return example_id_; }
  std::size_t masked_index() const noexcept { return masked_index_; }

 private:
  std::string example_id_;
  std::size_t masked_index_;
};

/// One variant per non-special position, in position order.
std::vector<MaskedVariant> make_masked_variants(const TokenSequence& seq, const std::string& mask_token,
                                                const std::string& example_id = {});

/// FNV-1a 64 over the given bytes.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);

/// Stable id binding cached predictions to (backend kind, model id, k).
std::string backend_fingerprint(std::string_view kind, std::string_view model_id, int k);

/// Source of top-k predictions at a masked position. Implementations must be
/// safe to call concurrently.
class MlmBackend {
 public:
  virtual ~MlmBackend() = default;
  virtual TopKPrediction predict_topk(const MaskedVariant& variant, int k) = 0;
  virtual std::string kind() const = 0;
  virtual std::string model_id() const = 0;
  virtual std::string fingerprint(int k) const { return backend_fingerprint(kind(), model_id(), k); }
};

/// Context-free unigram predictor: the k most frequent non-special corpus
/// tokens, frequency descending, ties by vocabulary id ascending.
class MockBackend final : public MlmBackend {
 public:
  MockBackend(const std::vector<TokenSequence>& corpus, const Vocabulary& vocab);

  TopKPrediction predict_topk(const MaskedVariant& variant, int k) override;
  std::string kind() const override { return "mock"; }
  std::string model_id() const override { return model_id_; }

  const std::vector<std::pair<std::string, std::size_t>>& ranking() const noexcept { return ranking_; }

 private:
  std::vector<std::pair<std::string, std::size_t>> ranking_;
  std::string model_id_;
};

std::unique_ptr<MockBackend> mock_backend_from_corpus(const std::vector<TokenSequence>& corpus,
                                                      const Vocabulary& vocab);

/// Checks the TopKPrediction invariants against a vocabulary: size <= k,
/// no duplicates, every token known. Throws BackendError.
void validate_prediction(const TopKPrediction& prediction, const Vocabulary& vocab, const MaskedVariant& variant);

}  // namespace precog
