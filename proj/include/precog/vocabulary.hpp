#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace precog {

using TokenId = int;

/// Raised for malformed vocabulary files. Carries the 1-based line when one applies.
class VocabularyError : public std::runtime_error {
 public:
  VocabularyError(const std::string& what, std::size_t line = 0)
      : std::runtime_error(line ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

struct SpecialTokens {
  std::string mask = "[MASK]";
  std::string unknown = "[UNK]";
  std::string classifier_start = "[CLS]";
  std::string separator = "[SEP]";
};

struct StringHash {
  using is_transparent = void;
  std::size_t operator()(std::string_view s) const noexcept { return std::hash<std::string_view>{}(s); }
};

/// Immutable token table. Ids are zero-based line indices of the vocabulary file.
class Vocabulary {
 public:
  /// Throws VocabularyError on duplicates, empty entries or missing special tokens.
  Vocabulary(std::vector<std::string> entries, SpecialTokens specials = {}, bool cased = false);

  std::size_t size() const noexcept { return entries_.size(); }
  const std::vector<std::string>& entries() const noexcept { return entries_; }
  const SpecialTokens& specials() const noexcept { return specials_; }
  bool cased() const noexcept { return cased_; }

  std::optional<TokenId> id(std::string_view token) const;
  bool contains(std::string_view token) const { return id(token).has_value(); }
  const std::string& token(TokenId id) const { return entries_.at(static_cast<std::size_t>(id)); }

  TokenId mask_id() const { return *id(specials_.mask); }
  TokenId unknown_id() const { return *id(specials_.unknown); }

  bool is_special(std::string_view token) const;

  /// Applies the vocabulary's case policy (ASCII folding when uncased).
  std::string normalize(std::string_view text) const;

 private:
  std::vector<std::string> entries_;
  std::unordered_map<std::string, TokenId, StringHash, std::equal_to<>> token_to_id_;
  SpecialTokens specials_;
  bool cased_;
};

/// Parses the one-token-per-line format (LF or CRLF).
Vocabulary parse_vocabulary(std::string_view text, SpecialTokens specials = {}, bool cased = false);
Vocabulary load_vocabulary(const std::filesystem::path& path, SpecialTokens specials = {}, bool cased = false);

std::string ascii_lower(std::string_view text);

}  // namespace precog
