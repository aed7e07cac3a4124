#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "finchart/ohlcv.hpp"
#include "finchart/sampler.hpp"

namespace finchart {

enum class Stage { pretrain, instruct };
const char* to_string(Stage stage);

/// Placeholder tokens interpolated into the instruction-stage template.
inline constexpr std::string_view kPromptDataSlot = "${prompt_data}";
inline constexpr std::string_view kPredictDataSlot = "${predict_data}";

/// The prompt texts driving annotation, plus the image-side instruction pool
/// for pre-training records. Templates are versioned fixtures: the files
/// under prompts/ are the source of truth and the builtin copies are embedded
/// from them at build time. Each text's sha256 is recorded so a manifest can
/// pin exactly which template produced a corpus.
struct PromptTemplates {
  std::string pretrain;  // system prompt for the description stage
  std::string instruct;  // full template with ${prompt_data} / ${predict_data}
  std::vector<std::string> pretrain_instructions;

  std::string pretrain_sha256;
  std::string instruct_sha256;
  std::string instructions_sha256;

  static PromptTemplates builtin();

  /// Loads pretrain_<lang>.txt, instruct_<lang>.txt and
  /// pretrain_instructions_<lang>.txt from a directory.
  static PromptTemplates load_dir(const std::filesystem::path& dir,
                                  const std::string& language = "en");
};

/// One unit of work for the annotation backend.
struct AnnotationRequest {
  Stage stage = Stage::pretrain;
  std::string system_prompt;
  std::string user_content;
  std::string record_id;
  Window window;
};

/// Pre-training request: the Table-style expert prompt as system text, the
/// serialized prompt segment as user content.
AnnotationRequest build_pretrain_request(const PromptTemplates& templates, const Window& window,
                                         std::span<const OhlcvBar> prompt_bars,
                                         std::string record_id);

/// Instruction request: the dialog template with both placeholders replaced
/// by the serialized prompt/predict blocks. The filled template travels as
/// user content; no placeholder token survives interpolation.
AnnotationRequest build_instruct_request(const PromptTemplates& templates, const Window& window,
                                         std::span<const OhlcvBar> prompt_bars,
                                         std::span<const OhlcvBar> predict_bars,
                                         std::string record_id);

}  // namespace finchart
