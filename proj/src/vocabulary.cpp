#include "precog/vocabulary.hpp"

#include <fstream>
#include <sstream>

namespace precog {

namespace {

void index_entries(const std::vector<std::string>& entries,
                   std::unordered_map<std::string, TokenId, StringHash, std::equal_to<>>& out) {
  out.reserve(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].empty()) throw VocabularyError("empty token", i + 1);
    auto [it, inserted] = out.emplace(entries[i], static_cast<TokenId>(i));
    if (!inserted) {
      throw VocabularyError("duplicate token '" + entries[i] + "' (first seen on line " +
                                std::to_string(it->second + 1) + ")",
                            i + 1);
    }
  }
}

}  // namespace

std::string ascii_lower(std::string_view text) {
  std::string out(text);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

Vocabulary::Vocabulary(std::vector<std::string> entries, SpecialTokens specials, bool cased)
    : entries_(std::move(entries)), specials_(std::move(specials)), cased_(cased) {
  index_entries(entries_, token_to_id_);
  for (const std::string* s : {&specials_.mask, &specials_.unknown, &specials_.classifier_start,
                               &specials_.separator}) {
    if (!token_to_id_.contains(*s)) throw VocabularyError("missing special token " + *s);
  }
}

std::optional<TokenId> Vocabulary::id(std::string_view token) const {
  auto it = token_to_id_.find(token);
  if (it == token_to_id_.end()) return std::nullopt;
  return it->second;
}

bool Vocabulary::is_special(std::string_view token) const {
  return token == specials_.mask || token == specials_.classifier_start || token == specials_.separator;
}

std::string Vocabulary::normalize(std::string_view text) const {
  return cased_ ? std::string(text) : ascii_lower(text);
}

Vocabulary parse_vocabulary(std::string_view text, SpecialTokens specials, bool cased) {
  std::vector<std::string> entries;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    entries.emplace_back(line);
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  return Vocabulary(std::move(entries), std::move(specials), cased);
}

Vocabulary load_vocabulary(const std::filesystem::path& path, SpecialTokens specials, bool cased) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw VocabularyError("cannot open vocabulary file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_vocabulary(buf.str(), std::move(specials), cased);
}

}  // namespace precog
