#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace finchart {

/// Word count used by the corpus statistics: whitespace-separated chunks
/// count once each, and every CJK ideograph counts as one word of its own
/// (CJK runs carry no spaces). Degrades gracefully across English and
/// Chinese text.
std::size_t count_words(std::string_view text);

/// Replaces the full-width commercial at (U+FF20) with ASCII '@'.
std::string normalize_separators(std::string_view text);

struct TextMatch {
  std::size_t offset = 0;
  std::string matched;
};

/// Finds a standalone run of exactly six decimal digits, the shape of an
/// A-share ticker code. Runs glued to a decimal point on either side are
/// number fragments (prices, formatted quantities), not codes, and are
/// skipped.
std::optional<TextMatch> find_ticker_code(std::string_view text);

/// Case-insensitive whole-word search (ASCII word boundaries).
std::optional<TextMatch> find_word(std::string_view text, std::string_view word);

/// Case-insensitive substring search.
std::optional<TextMatch> find_phrase(std::string_view text, std::string_view phrase);

std::string trim(std::string_view text);

}  // namespace finchart
