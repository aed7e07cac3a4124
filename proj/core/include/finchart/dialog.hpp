#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "finchart/prompts.hpp"

namespace finchart {

/// One question/answer pair out of an instruction-stage response.
struct DialogTurn {
  std::string question;
  std::string answer;

  bool operator==(const DialogTurn&) const = default;
};

/// Configurable content rules, per template language.
struct ContentRules {
  /// Bare segment-name tokens that must not appear in generated text.
  std::vector<std::string> segment_blocklist = {"date", "open", "high",
                                                "low",  "close", "volume"};
  /// Future-knowledge giveaways, rejected in instruction answers.
  std::vector<std::string> leakage_phrases = {"future data", "predict data"};
  /// Accepted dialog length band around the nominal five turns.
  std::size_t min_turns = 3;
  std::size_t max_turns = 7;
};

/// Checks `text` against the rules: ticker-code shapes (both stages),
/// leakage phrases (instruction stage only), and blocklisted segment names.
/// Throws ContentViolation with the matched span; returns normally when
/// clean.
void validate_content(std::string_view text, Stage stage, const ContentRules& rules = {});

/// Trims and validates a pre-training answer. Throws EmptyAnswer or
/// ContentViolation.
std::string parse_pretrain_answer(std::string_view raw, const ContentRules& rules = {});

/// Splits a "Question@Answer@..." response into turns. The full-width at
/// sign is normalized first; one trailing empty field (from the final
/// separator) is dropped; fields are paired in order. Throws
/// UnpairedSegments, TurnCountOutOfRange, or ContentViolation. Never crashes
/// on arbitrary byte noise; malformed input always surfaces as one of those
/// structured errors.
std::vector<DialogTurn> parse_instruct_dialog(std::string_view raw,
                                              const ContentRules& rules = {});

/// Joins turns back to the separator format ("Q@A@Q@A@...@"). Inverse of
/// parse_instruct_dialog for turn texts free of '@'.
std::string serialize_dialog(const std::vector<DialogTurn>& turns);

}  // namespace finchart
