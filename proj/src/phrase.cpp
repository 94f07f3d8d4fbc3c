#include "kpeval/phrase.hpp"

#include <cctype>
#include <unordered_set>

#include "kpeval/error.hpp"
#include "kpeval/porter_stemmer.hpp"

namespace kpeval {
namespace {

// Byte length of the whitespace code point starting at `pos`, or 0.
size_t whitespace_len(std::string_view s, size_t pos) {
  const auto c0 = static_cast<unsigned char>(s[pos]);
  if (c0 == ' ' || (c0 >= '\t' && c0 <= '\r')) return 1;
  const size_t rest = s.size() - pos;
  if (c0 == 0xC2 && rest >= 2) {
    const auto c1 = static_cast<unsigned char>(s[pos + 1]);
    if (c1 == 0x85 || c1 == 0xA0) return 2;
  }
  if (rest >= 3) {
    const auto c1 = static_cast<unsigned char>(s[pos + 1]);
    const auto c2 = static_cast<unsigned char>(s[pos + 2]);
    if (c0 == 0xE1 && c1 == 0x9A && c2 == 0x80) return 3;
    if (c0 == 0xE2 && c1 == 0x80 &&
        ((c2 >= 0x80 && c2 <= 0x8A) || c2 == 0xA8 || c2 == 0xA9 ||
         c2 == 0xAF)) {
      return 3;
    }
    if (c0 == 0xE2 && c1 == 0x81 && c2 == 0x9F) return 3;
    if (c0 == 0xE3 && c1 == 0x80 && c2 == 0x80) return 3;
  }
  return 0;
}

bool is_punct(char c) {
  return std::ispunct(static_cast<unsigned char>(c)) != 0;
}

// Whitespace-delimited pieces as views into `text`.
std::vector<std::string_view> split_whitespace(std::string_view text) {
  std::vector<std::string_view> pieces;
  size_t pos = 0;
  size_t start = std::string_view::npos;
  while (pos < text.size()) {
    const size_t ws = whitespace_len(text, pos);
    if (ws > 0) {
      if (start != std::string_view::npos) {
        pieces.push_back(text.substr(start, pos - start));
        start = std::string_view::npos;
      }
      pos += ws;
    } else {
      if (start == std::string_view::npos) start = pos;
      ++pos;
    }
  }
  if (start != std::string_view::npos) pieces.push_back(text.substr(start));
  return pieces;
}

std::string_view trim_ascii(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  for (std::string_view piece : split_whitespace(text)) {
    while (!piece.empty() && is_punct(piece.front())) piece.remove_prefix(1);
    while (!piece.empty() && is_punct(piece.back())) piece.remove_suffix(1);
    if (piece.empty()) continue;
    std::string token(piece);
    for (char& c : token) {
      c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    tokens.push_back(std::move(token));
  }
  return tokens;
}

Phrase Phrase::from_text(std::string_view raw) {
  Phrase p;
  p.raw_ = std::string(raw);
  p.tokens_ = tokenize(raw);
  if (p.tokens_.empty()) {
    throw Error(ErrorCode::kEmptyPhrase,
                "no tokens in phrase '" + std::string(raw) + "'");
  }
  p.stems_.reserve(p.tokens_.size());
  for (const auto& t : p.tokens_) {
    p.stems_.push_back(porter_stem(t));
    if (!p.stem_key_.empty()) p.stem_key_ += ' ';
    p.stem_key_ += p.stems_.back();
  }
  return p;
}

std::vector<Phrase> parse_phrase_list(std::string_view text) {
  std::vector<Phrase> out;
  size_t start = 0;
  while (start <= text.size()) {
    size_t end = text.find(';', start);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view segment = trim_ascii(text.substr(start, end - start));
    if (!segment.empty()) out.push_back(Phrase::from_text(segment));
    start = end + 1;
  }
  return out;
}

std::string join_raw(std::span<const Phrase> phrases, std::string_view sep) {
  std::string out;
  for (size_t i = 0; i < phrases.size(); ++i) {
    if (i > 0) out += sep;
    out += phrases[i].raw();
  }
  return out;
}

std::vector<std::string> raw_texts(std::span<const Phrase> phrases) {
  std::vector<std::string> out;
  out.reserve(phrases.size());
  for (const auto& p : phrases) out.push_back(p.raw());
  return out;
}

std::vector<Phrase> dedupe_predictions(std::span<const Phrase> phrases) {
  std::vector<Phrase> out;
  std::unordered_set<std::string> seen;
  for (const auto& p : phrases) {
    if (seen.insert(p.stem_key()).second) out.push_back(p);
  }
  return out;
}

std::string truncate_tokens(std::string_view text, size_t budget) {
  const auto pieces = split_whitespace(text);
  if (pieces.size() <= budget) return std::string(text);
  if (budget == 0) return {};
  const std::string_view last = pieces[budget - 1];
  const size_t end = static_cast<size_t>(last.data() - text.data()) + last.size();
  return std::string(text.substr(0, end));
}

}  // namespace kpeval
