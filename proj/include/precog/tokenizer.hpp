#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "precog/vocabulary.hpp"

namespace precog {

class TokenizeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Token list with parallel special-token and segment markers.
struct TokenSequence {
  std::vector<std::string> tokens;
  std::vector<bool> is_special;
  std::vector<int> segment_ids;

  std::size_t size() const noexcept { return tokens.size(); }
  /// Number of non-special positions (T).
  std::size_t content_length() const noexcept;
  /// Non-special tokens in order.
  std::vector<std::string> content_tokens() const;

  bool operator==(const TokenSequence&) const = default;
};

struct TokenizerOptions {
  std::size_t max_sequence_length = 512;
  std::size_t max_chars_per_word = 100;
};

/// Whitespace split with every ASCII punctuation character detached as its own word.
std::vector<std::string> word_split(std::string_view text);

/// Greedy longest-match-first WordPiece over one (already normalized) word.
/// Returns {unknown} when the word has no decomposition.
std::vector<std::string> wordpiece(std::string_view word, const Vocabulary& vocab,
                                   std::size_t max_chars_per_word = 100);

/// BERT-style pipeline: split, case-fold per vocabulary, WordPiece, then
/// [CLS] a [SEP] (b [SEP]). Inputs longer than the limit are truncated from
/// the end of the longer segment.
TokenSequence tokenize(std::string_view segment_a, std::optional<std::string_view> segment_b,
                       const Vocabulary& vocab, const TokenizerOptions& options = {});

}  // namespace precog
