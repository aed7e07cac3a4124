#include "finchart/dialog.hpp"

#include "finchart/errors.hpp"
#include "finchart/text.hpp"

namespace finchart {

void validate_content(std::string_view text, Stage stage, const ContentRules& rules) {
  if (const auto hit = find_ticker_code(text)) {
    throw ContentViolation("ticker-code", hit->matched, hit->offset);
  }
  for (const std::string& word : rules.segment_blocklist) {
    if (const auto hit = find_word(text, word)) {
      throw ContentViolation("segment-name", hit->matched, hit->offset);
    }
  }
  if (stage == Stage::instruct) {
    for (const std::string& phrase : rules.leakage_phrases) {
      if (const auto hit = find_phrase(text, phrase)) {
        throw ContentViolation("leakage-phrase", hit->matched, hit->offset);
      }
    }
  }
}

std::string parse_pretrain_answer(std::string_view raw, const ContentRules& rules) {
  std::string trimmed = trim(raw);
  if (trimmed.empty()) throw EmptyAnswer("pre-train answer is empty");
  validate_content(trimmed, Stage::pretrain, rules);
  return trimmed;
}

std::vector<DialogTurn> parse_instruct_dialog(std::string_view raw, const ContentRules& rules) {
  const std::string normalized = normalize_separators(raw);

  std::vector<std::string> fields;
  std::size_t pos = 0;
  while (pos <= normalized.size()) {
    const std::size_t next = normalized.find('@', pos);
    if (next == std::string::npos) {
      fields.emplace_back(trim(std::string_view(normalized).substr(pos)));
      break;
    }
    fields.emplace_back(trim(std::string_view(normalized).substr(pos, next - pos)));
    pos = next + 1;
  }

  // The canonical form ends "...Answer@", leaving one empty trailing field.
  if (!fields.empty() && fields.back().empty()) fields.pop_back();

  if (fields.empty() || fields.size() % 2 != 0) {
    throw UnpairedSegments("dialog splits into " + std::to_string(fields.size()) +
                           " fields, expected a positive even count");
  }
  for (const std::string& field : fields) {
    if (field.empty()) throw UnpairedSegments("dialog contains an empty question or answer field");
  }

  const std::size_t turn_count = fields.size() / 2;
  if (turn_count < rules.min_turns || turn_count > rules.max_turns) {
    throw TurnCountOutOfRange(turn_count, "dialog has " + std::to_string(turn_count) +
                                              " turns, outside [" +
                                              std::to_string(rules.min_turns) + ", " +
                                              std::to_string(rules.max_turns) + "]");
  }

  std::vector<DialogTurn> turns;
  turns.reserve(turn_count);
  for (std::size_t i = 0; i < fields.size(); i += 2) {
    validate_content(fields[i], Stage::instruct, rules);
    validate_content(fields[i + 1], Stage::instruct, rules);
    turns.push_back({std::move(fields[i]), std::move(fields[i + 1])});
  }
  return turns;
}

std::string serialize_dialog(const std::vector<DialogTurn>& turns) {
  std::string out;
  for (const DialogTurn& turn : turns) {
    out += turn.question;
    out += '@';
    out += turn.answer;
    out += '@';
  }
  return out;
}

}  // namespace finchart
