#include "hardem/text.h"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>

namespace hardem {
namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

bool is_punct(char c) {
  const auto u = static_cast<unsigned char>(c);
  return (u >= 33 && u <= 47) || (u >= 58 && u <= 64) ||
         (u >= 91 && u <= 96) || (u >= 123 && u <= 126);
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }

char to_lower(char c) {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

constexpr std::array<std::string_view, 11> kNumberWords = {
    "zero", "one", "two",   "three", "four", "five",
    "six",  "seven", "eight", "nine",  "ten"};

}  // namespace

std::string TokenSequence::slice(int first, int last) const {
  const Token& a = (*this)[first];
  const Token& b = (*this)[last];
  return text.substr(static_cast<std::size_t>(a.char_start),
                     static_cast<std::size_t>(b.char_end() - a.char_start));
}

TokenSequence TokenSequence::from_tokens(const std::vector<std::string>& words) {
  TokenSequence seq;
  for (const auto& w : words) {
    if (!seq.text.empty()) seq.text.push_back(' ');
    seq.tokens.push_back({w, static_cast<int>(seq.text.size())});
    seq.text += w;
  }
  return seq;
}

TokenSequence tokenize(std::string_view text) {
  TokenSequence seq;
  seq.text = std::string(text);
  const std::size_t n = text.size();
  std::size_t i = 0;
  while (i < n) {
    if (is_space(text[i]) || is_punct(text[i])) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    while (i < n) {
      const char c = text[i];
      if (is_space(c)) break;
      if (is_punct(c)) {
        const bool numeric_sep = (c == '.' || c == ',') && i > start &&
                                 is_digit(text[i - 1]) && i + 1 < n &&
                                 is_digit(text[i + 1]);
        if (!numeric_sep) break;
      }
      ++i;
    }
    seq.tokens.push_back({std::string(text.substr(start, i - start)),
                          static_cast<int>(start)});
  }
  return seq;
}

std::string normalize_text(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::string word;
  auto flush = [&] {
    if (word.empty()) return;
    if (word != "a" && word != "an" && word != "the") {
      if (!out.empty()) out.push_back(' ');
      out += word;
    }
    word.clear();
  };
  for (char c : s) {
    if (is_space(c)) {
      flush();
    } else if (!is_punct(c)) {
      word.push_back(to_lower(c));
    }
  }
  flush();
  return out;
}

std::optional<double> parse_number(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  if (s.empty()) return std::nullopt;

  std::string lowered;
  for (char c : s) lowered.push_back(to_lower(c));
  for (std::size_t k = 0; k < kNumberWords.size(); ++k) {
    if (lowered == kNumberWords[k]) return static_cast<double>(k);
  }

  std::string digits;
  std::size_t i = 0;
  if (s[0] == '-' || s[0] == '+') {
    if (s[0] == '-') digits.push_back('-');
    i = 1;
  }
  // Integer part: plain digits, or 1-3 digits followed by ",ddd" groups.
  const std::size_t int_start = i;
  while (i < s.size() && is_digit(s[i])) digits.push_back(s[i++]);
  std::size_t lead = i - int_start;
  if (lead == 0) return std::nullopt;
  if (i < s.size() && s[i] == ',') {
    if (lead > 3) return std::nullopt;
    while (i < s.size() && s[i] == ',') {
      ++i;
      std::size_t group = 0;
      while (i < s.size() && is_digit(s[i])) {
        digits.push_back(s[i++]);
        ++group;
      }
      if (group != 3) return std::nullopt;
    }
  }
  if (i < s.size() && s[i] == '.') {
    digits.push_back('.');
    ++i;
    std::size_t frac = 0;
    while (i < s.size() && is_digit(s[i])) {
      digits.push_back(s[i++]);
      ++frac;
    }
    if (frac == 0) return std::nullopt;
  }
  if (i != s.size()) return std::nullopt;

  double value = 0.0;
  const char* first = digits.data();
  const char* last = digits.data() + digits.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) return std::nullopt;
  return value;
}

std::string format_number(double value) {
  if (value == 0.0) return "0";
  if (std::isfinite(value) && std::trunc(value) == value &&
      std::fabs(value) < 1e15) {
    return std::to_string(static_cast<std::int64_t>(value));
  }
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  (void)ec;
  return std::string(buf.data(), ptr);
}

}  // namespace hardem
