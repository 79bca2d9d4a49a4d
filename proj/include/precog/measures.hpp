#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "precog/backend.hpp"
#include "precog/tokenizer.hpp"
#include "precog/vocabulary.hpp"

namespace precog {

enum class Measure { precog, lexcov, length };

std::string_view to_string(Measure m);
std::optional<Measure> parse_measure(std::string_view name);
inline constexpr Measure kAllMeasures[] = {Measure::precog, Measure::lexcov, Measure::length};

class MeasureError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A measure value in [0, 1] for one example.
struct MeasureScore {
  std::string example_id;
  Measure measure = Measure::precog;
  double value = 0.0;
  /// precog: one entry per content position, true when the original token
  /// was among the top-k predictions.
  std::vector<bool> hits;
  /// lexcov: out-of-vocabulary words, in input order (per occurrence, or
  /// first occurrence only under set semantics).
  std::vector<std::string> oov_words;
};

struct DatasetLengthStats {
  std::size_t min_len = 0;
  std::size_t max_len = 0;
};

/// Fraction of content positions whose original token is in the backend's
/// top-k for that position when it alone is masked.
MeasureScore precog(const TokenSequence& seq, MlmBackend& backend, int k, const std::string& example_id = {},
                    const std::string& mask_token = "[MASK]");

/// Fraction of words whose case-normalized form is a full (non-"##")
/// vocabulary entry. With set_semantics, repeated OOV words count once.
MeasureScore lexcov(const std::vector<std::string>& words, const Vocabulary& vocab, bool set_semantics = false,
                    const std::string& example_id = {});

DatasetLengthStats length_stats(const std::vector<TokenSequence>& dataset);
DatasetLengthStats length_stats(const std::vector<std::size_t>& content_lengths);

/// (T - min) / (max - min); 0 when max == min.
MeasureScore length_measure(std::size_t content_length, const DatasetLengthStats& stats,
                            const std::string& example_id = {});
MeasureScore length_measure(const TokenSequence& seq, const DatasetLengthStats& stats,
                            const std::string& example_id = {});

}  // namespace precog
