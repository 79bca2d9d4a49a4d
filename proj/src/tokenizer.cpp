#include "precog/tokenizer.hpp"

#include <spdlog/spdlog.h>

namespace precog {

namespace {

bool is_space_or_control(unsigned char c) { return c <= 0x20 || c == 0x7f; }

bool is_ascii_punct(unsigned char c) {
  return c > 0x20 && c < 0x7f && !((c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'));
}

bool is_continuation_byte(unsigned char c) { return (c & 0xC0) == 0x80; }

std::size_t codepoint_count(std::string_view s) {
  std::size_t n = 0;
  for (unsigned char c : s) n += !is_continuation_byte(c);
  return n;
}

std::vector<std::string> segment_pieces(std::string_view text, const Vocabulary& vocab,
                                        const TokenizerOptions& options) {
  std::vector<std::string> pieces;
  for (const std::string& word : word_split(text)) {
    for (std::string& p : wordpiece(vocab.normalize(word), vocab, options.max_chars_per_word)) {
      pieces.push_back(std::move(p));
    }
  }
  return pieces;
}

void append_segment(TokenSequence& seq, const std::vector<std::string>& pieces, int segment,
                    const std::string& separator) {
  for (const std::string& p : pieces) {
    seq.tokens.push_back(p);
    seq.is_special.push_back(false);
    seq.segment_ids.push_back(segment);
  }
  seq.tokens.push_back(separator);
  seq.is_special.push_back(true);
  seq.segment_ids.push_back(segment);
}

}  // namespace

std::size_t TokenSequence::content_length() const noexcept {
  std::size_t n = 0;
  for (bool s : is_special) n += !s;
  return n;
}

std::vector<std::string> TokenSequence::content_tokens() const {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (!is_special[i]) out.push_back(tokens[i]);
  }
  return out;
}

std::vector<std::string> word_split(std::string_view text) {
  std::vector<std::string> words;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) words.push_back(std::move(current));
    current.clear();
  };
  for (char ch : text) {
    auto c = static_cast<unsigned char>(ch);
    if (is_space_or_control(c)) {
      flush();
    } else if (is_ascii_punct(c)) {
      flush();
      words.emplace_back(1, ch);
    } else {
      current.push_back(ch);
    }
  }
  flush();
  return words;
}

std::vector<std::string> wordpiece(std::string_view word, const Vocabulary& vocab, std::size_t max_chars_per_word) {
  const std::string& unk = vocab.specials().unknown;
  if (word.empty()) return {};
  if (codepoint_count(word) > max_chars_per_word) return {unk};

  std::vector<std::string> pieces;
  std::size_t start = 0;
  std::string candidate;
  while (start < word.size()) {
    std::size_t end = word.size();
    bool found = false;
    while (end > start) {
      candidate.assign(start > 0 ? "##" : "");
      candidate.append(word.substr(start, end - start));
      if (vocab.contains(candidate)) {
        found = true;
        break;
      }
      // step back one code point
      do {
        --end;
      } while (end > start && is_continuation_byte(static_cast<unsigned char>(word[end])));
    }
    if (!found) return {unk};
    pieces.push_back(candidate);
    start = end;
  }
  return pieces;
}

TokenSequence tokenize(std::string_view segment_a, std::optional<std::string_view> segment_b,
                       const Vocabulary& vocab, const TokenizerOptions& options) {
  std::vector<std::string> a = segment_pieces(segment_a, vocab, options);
  if (a.empty()) throw TokenizeError("segment_a is empty after whitespace normalization");
  std::vector<std::string> b;
  if (segment_b) b = segment_pieces(*segment_b, vocab, options);

  const std::size_t specials = segment_b ? 3 : 2;
  if (options.max_sequence_length <= specials) throw TokenizeError("max_sequence_length too small");
  const std::size_t budget = options.max_sequence_length - specials;
  if (a.size() + b.size() > budget) {
    spdlog::warn("truncating sequence of {} content tokens to {}", a.size() + b.size(), budget);
    while (a.size() + b.size() > budget) {
      if (a.size() > b.size())
        a.pop_back();
      else
        b.pop_back();
    }
  }

  TokenSequence seq;
  const auto& sp = vocab.specials();
  seq.tokens.push_back(sp.classifier_start);
  seq.is_special.push_back(true);
  seq.segment_ids.push_back(0);
  append_segment(seq, a, 0, sp.separator);
  if (segment_b) append_segment(seq, b, 1, sp.separator);
  return seq;
}

}  // namespace precog
