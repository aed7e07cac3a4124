#include "finchart/prompts.hpp"

#include <fstream>
#include <sstream>

#include "finchart/errors.hpp"
#include "finchart/hash.hpp"
#include "finchart/kline.hpp"
#include "finchart/text.hpp"

namespace finchart {

// Defined in the generated prompt_fixtures.cpp.
namespace fixtures {
extern const char* const kPretrainTemplate;
extern const char* const kInstructTemplate;
extern const char* const kPretrainInstructions;
}  // namespace fixtures

namespace {

std::string read_file_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileUnreadable(path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return std::move(buf).str();
}

std::vector<std::string> split_instruction_pool(const std::string& text) {
  std::vector<std::string> pool;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::string trimmed = trim(line);
    if (!trimmed.empty()) pool.push_back(std::move(trimmed));
  }
  if (pool.empty()) throw Error("pre-train instruction pool is empty");
  return pool;
}

std::string instructions_digest(const std::vector<std::string>& pool) {
  std::string joined;
  for (const std::string& s : pool) {
    joined += s;
    joined += '\n';
  }
  return sha256_hex(joined);
}

PromptTemplates finish(std::string pretrain, std::string instruct, const std::string& pool_text) {
  PromptTemplates t;
  t.pretrain = std::move(pretrain);
  t.instruct = std::move(instruct);
  t.pretrain_instructions = split_instruction_pool(pool_text);
  if (trim(t.pretrain).empty() || trim(t.instruct).empty())
    throw Error("prompt template is empty");
  if (t.instruct.find(kPromptDataSlot) == std::string::npos ||
      t.instruct.find(kPredictDataSlot) == std::string::npos)
    throw Error("instruction template is missing a data placeholder");
  t.pretrain_sha256 = sha256_hex(t.pretrain);
  t.instruct_sha256 = sha256_hex(t.instruct);
  t.instructions_sha256 = instructions_digest(t.pretrain_instructions);
  return t;
}

void replace_once(std::string& text, std::string_view slot, const std::string& value) {
  const std::size_t pos = text.find(slot);
  if (pos == std::string::npos) throw Error("template placeholder not found");
  text.replace(pos, slot.size(), value);
}

}  // namespace

const char* to_string(Stage stage) {
  return stage == Stage::pretrain ? "pretrain" : "instruct";
}

PromptTemplates PromptTemplates::builtin() {
  return finish(fixtures::kPretrainTemplate, fixtures::kInstructTemplate,
                fixtures::kPretrainInstructions);
}

PromptTemplates PromptTemplates::load_dir(const std::filesystem::path& dir,
                                          const std::string& language) {
  return finish(read_file_text(dir / ("pretrain_" + language + ".txt")),
                read_file_text(dir / ("instruct_" + language + ".txt")),
                read_file_text(dir / ("pretrain_instructions_" + language + ".txt")));
}

AnnotationRequest build_pretrain_request(const PromptTemplates& templates, const Window& window,
                                         std::span<const OhlcvBar> prompt_bars,
                                         std::string record_id) {
  if (prompt_bars.empty()) throw EmptyPromptSegment("prompt segment is empty");
  if (prompt_bars.size() != static_cast<std::size_t>(window.prompt_len))
    throw InvariantViolation("prompt segment length does not match the window");
  AnnotationRequest req;
  req.stage = Stage::pretrain;
  req.system_prompt = templates.pretrain;
  req.user_content = serialize_kline(prompt_bars);
  req.record_id = std::move(record_id);
  req.window = window;
  return req;
}

AnnotationRequest build_instruct_request(const PromptTemplates& templates, const Window& window,
                                         std::span<const OhlcvBar> prompt_bars,
                                         std::span<const OhlcvBar> predict_bars,
                                         std::string record_id) {
  if (prompt_bars.empty() || predict_bars.empty()) throw EmptyPromptSegment("prompt or predict segment is empty");
  if (prompt_bars.size() != static_cast<std::size_t>(window.prompt_len) ||
      predict_bars.size() != static_cast<std::size_t>(window.predict_len()))
    throw InvariantViolation("segment lengths do not match the window");
  AnnotationRequest req;
  req.stage = Stage::instruct;
  std::string filled = templates.instruct;
  replace_once(filled, kPromptDataSlot, serialize_kline(prompt_bars));
  replace_once(filled, kPredictDataSlot, serialize_kline(predict_bars));
  req.user_content = std::move(filled);
  req.record_id = std::move(record_id);
  req.window = window;
  return req;
}

}  // namespace finchart
