#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace kpeval {

// Splits on whitespace (ASCII and the common Unicode space characters),
// strips leading/trailing ASCII punctuation from each piece and lowercases
// ASCII letters. Interior punctuation survives ("state-of-the-art").
std::vector<std::string> tokenize(std::string_view text);

// A normalized keyphrase. Immutable once built; tokens is never empty.
class Phrase {
 public:
  // Throws Error(kEmptyPhrase) when no token survives normalization.
  static Phrase from_text(std::string_view raw);

  const std::string& raw() const noexcept { return raw_; }
  const std::vector<std::string>& tokens() const noexcept { return tokens_; }
  const std::vector<std::string>& stems() const noexcept { return stems_; }
  // Stems joined by a single space.
  const std::string& stem_key() const noexcept { return stem_key_; }

  friend bool operator==(const Phrase&, const Phrase&) = default;

 private:
  Phrase() = default;

  std::string raw_;
  std::vector<std::string> tokens_;
  std::vector<std::string> stems_;
  std::string stem_key_;
};

inline Phrase normalize_phrase(std::string_view raw) {
  return Phrase::from_text(raw);
}

// Splits a ";"-separated keyphrase list. Blank segments are dropped.
std::vector<Phrase> parse_phrase_list(std::string_view text);

// Raw texts joined with `sep`, in the given order.
std::string join_raw(std::span<const Phrase> phrases, std::string_view sep);

std::vector<std::string> raw_texts(std::span<const Phrase> phrases);

// Removes later phrases whose stem_key was already seen.
std::vector<Phrase> dedupe_predictions(std::span<const Phrase> phrases);

// Keeps at most `budget` whitespace tokens, cutting the original string right
// after the last kept token. Text within budget is returned unchanged.
std::string truncate_tokens(std::string_view text, size_t budget);

}  // namespace kpeval
