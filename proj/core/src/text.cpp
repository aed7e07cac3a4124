#include "finchart/text.hpp"

#include <cctype>

namespace finchart {

namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

char to_lower(char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); }

/// Decodes one UTF-8 code point at `pos`; advances `pos` past it. Invalid
/// bytes decode as themselves (latin-1 style) so noisy input never traps.
char32_t decode_utf8(std::string_view s, std::size_t& pos) {
  const auto byte = [&](std::size_t i) { return static_cast<unsigned char>(s[i]); };
  const unsigned char b0 = byte(pos);
  if (b0 < 0x80) {
    ++pos;
    return b0;
  }
  auto cont = [&](std::size_t i) {
    return i < s.size() && (byte(i) & 0xc0) == 0x80;
  };
  if ((b0 & 0xe0) == 0xc0 && cont(pos + 1)) {
    char32_t cp = (char32_t(b0 & 0x1f) << 6) | (byte(pos + 1) & 0x3f);
    pos += 2;
    return cp;
  }
  if ((b0 & 0xf0) == 0xe0 && cont(pos + 1) && cont(pos + 2)) {
    char32_t cp = (char32_t(b0 & 0x0f) << 12) | (char32_t(byte(pos + 1) & 0x3f) << 6) |
                  (byte(pos + 2) & 0x3f);
    pos += 3;
    return cp;
  }
  if ((b0 & 0xf8) == 0xf0 && cont(pos + 1) && cont(pos + 2) && cont(pos + 3)) {
    char32_t cp = (char32_t(b0 & 0x07) << 18) | (char32_t(byte(pos + 1) & 0x3f) << 12) |
                  (char32_t(byte(pos + 2) & 0x3f) << 6) | (byte(pos + 3) & 0x3f);
    pos += 4;
    return cp;
  }
  ++pos;
  return b0;
}

bool is_cjk(char32_t cp) {
  return (cp >= 0x3400 && cp <= 0x4dbf) ||   // ext A
         (cp >= 0x4e00 && cp <= 0x9fff) ||   // unified
         (cp >= 0xf900 && cp <= 0xfaff) ||   // compatibility
         (cp >= 0x20000 && cp <= 0x2ebef);   // ext B..F
}

bool is_space_cp(char32_t cp) {
  return cp == ' ' || cp == '\t' || cp == '\n' || cp == '\r' || cp == '\f' || cp == '\v' ||
         cp == 0x3000;  // ideographic space
}

}  // namespace

std::size_t count_words(std::string_view text) {
  std::size_t words = 0;
  bool in_chunk = false;  // inside a non-CJK, non-space run
  std::size_t pos = 0;
  while (pos < text.size()) {
    const char32_t cp = decode_utf8(text, pos);
    if (is_space_cp(cp)) {
      in_chunk = false;
    } else if (is_cjk(cp)) {
      ++words;  // each ideograph is its own word
      in_chunk = false;
    } else {
      if (!in_chunk) ++words;
      in_chunk = true;
    }
  }
  return words;
}

std::string normalize_separators(std::string_view text) {
  // U+FF20 fullwidth commercial at = EF BC A0.
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    if (i + 2 < text.size() && static_cast<unsigned char>(text[i]) == 0xef &&
        static_cast<unsigned char>(text[i + 1]) == 0xbc &&
        static_cast<unsigned char>(text[i + 2]) == 0xa0) {
      out.push_back('@');
      i += 3;
    } else {
      out.push_back(text[i]);
      ++i;
    }
  }
  return out;
}

std::optional<TextMatch> find_ticker_code(std::string_view text) {
  std::size_t i = 0;
  while (i < text.size()) {
    if (!std::isdigit(static_cast<unsigned char>(text[i]))) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
    const std::size_t run = j - i;
    if (run == 6) {
      const bool dot_before = i > 0 && text[i - 1] == '.';
      const bool dot_after = j < text.size() && text[j] == '.';
      if (!dot_before && !dot_after) {
        return TextMatch{i, std::string(text.substr(i, run))};
      }
    }
    i = j;
  }
  return std::nullopt;
}

std::optional<TextMatch> find_word(std::string_view text, std::string_view word) {
  if (word.empty() || text.size() < word.size()) return std::nullopt;
  for (std::size_t i = 0; i + word.size() <= text.size(); ++i) {
    bool match = true;
    for (std::size_t k = 0; k < word.size(); ++k) {
      if (to_lower(text[i + k]) != to_lower(word[k])) {
        match = false;
        break;
      }
    }
    if (!match) continue;
    const bool left_ok = i == 0 || !is_word_char(text[i - 1]);
    const std::size_t end = i + word.size();
    const bool right_ok = end == text.size() || !is_word_char(text[end]);
    if (left_ok && right_ok) {
      return TextMatch{i, std::string(text.substr(i, word.size()))};
    }
  }
  return std::nullopt;
}

std::optional<TextMatch> find_phrase(std::string_view text, std::string_view phrase) {
  if (phrase.empty() || text.size() < phrase.size()) return std::nullopt;
  for (std::size_t i = 0; i + phrase.size() <= text.size(); ++i) {
    bool match = true;
    for (std::size_t k = 0; k < phrase.size(); ++k) {
      if (to_lower(text[i + k]) != to_lower(phrase[k])) {
        match = false;
        break;
      }
    }
    if (match) return TextMatch{i, std::string(text.substr(i, phrase.size()))};
  }
  return std::nullopt;
}

std::string trim(std::string_view text) {
  std::size_t begin = 0;
  std::size_t end = text.size();
  while (begin < end && is_space(text[begin])) ++begin;
  while (end > begin && is_space(text[end - 1])) --end;
  return std::string(text.substr(begin, end - begin));
}

}  // namespace finchart
