#ifndef HARDEM_TEXT_H_
#define HARDEM_TEXT_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hardem {

// A whitespace/punctuation delimited token. `char_start` is a byte offset into
// the text the token was cut from.
struct Token {
  std::string text;
  int char_start = 0;

  int char_end() const { return char_start + static_cast<int>(text.size()); }
  bool operator==(const Token&) const = default;
};

// Original text plus its tokens. Token indices are 0-based everywhere.
struct TokenSequence {
  std::string text;
  std::vector<Token> tokens;

  int size() const { return static_cast<int>(tokens.size()); }
  bool empty() const { return tokens.empty(); }
  const Token& operator[](int i) const { return tokens[static_cast<std::size_t>(i)]; }

  // Substring of the original text covering tokens [first, last].
  std::string slice(int first, int last) const;

  // Builds a sequence from pre-split tokens joined by single spaces.
  static TokenSequence from_tokens(const std::vector<std::string>& words);

  bool operator==(const TokenSequence&) const = default;
};

// Splits on ASCII whitespace and punctuation. Punctuation is dropped, except
// '.' and ',' between two digits, so "2,582,322" and "3.5" stay whole.
TokenSequence tokenize(std::string_view text);

// Lowercase, drop ASCII punctuation, drop the articles a/an/the, collapse
// whitespace. Idempotent.
std::string normalize_text(std::string_view s);

// Parses integers, decimals, comma-grouped integers ("1,000") with an optional
// sign, and the words zero..ten. Anything else yields nullopt.
std::optional<double> parse_number(std::string_view s);

// Integral values print without a decimal point; everything else uses the
// shortest round-trip representation.
std::string format_number(double value);

}  // namespace hardem

#endif  // HARDEM_TEXT_H_
