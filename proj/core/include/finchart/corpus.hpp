#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "finchart/dialog.hpp"
#include "finchart/render.hpp"
#include "finchart/sampler.hpp"
#include "finchart/trend.hpp"

namespace finchart {

inline constexpr std::string_view kImagePlaceholder = "<image>";
inline constexpr std::string_view kRoleHuman = "human";
inline constexpr std::string_view kRoleModel = "model";

struct Message {
  std::string role;  // kRoleHuman | kRoleModel
  std::string text;

  bool operator==(const Message&) const = default;
};

/// Window provenance carried by each record.
struct RecordMeta {
  std::string symbol_id;
  Date date_start;
  Date date_end;
  std::size_t total_len = 0;
  std::size_t prompt_len = 0;
  ChartSpec spec;
  std::string image_sha256;
  std::optional<TrendLabel> trend;  // instruct records only

  bool operator==(const RecordMeta&) const = default;
};

/// One corpus entry binding an image to a conversation. Conversations
/// alternate human/model starting with human, and the first human message
/// carries the image placeholder exactly once.
struct DatasetRecord {
  std::string id;
  std::string image;  // path relative to the corpus root
  std::vector<Message> conversations;
  Stage stage = Stage::pretrain;
  RecordMeta meta;

  bool operator==(const DatasetRecord&) const = default;
};

/// Structural violations for one record; empty means the record is sound.
std::vector<std::string> check_record(const DatasetRecord& record);

/// Builds a pre-training record: one human message (placeholder plus the
/// instruction) and one model message (the parsed answer). The response id
/// must match the plan's. Throws IdMismatch / InvariantViolation.
DatasetRecord assemble_pretrain_record(const PlanEntry& plan, const RenderedChart& rendered,
                                       const std::string& instruction, const std::string& answer,
                                       const std::string& response_record_id, RecordMeta meta);

/// Builds an instruction record: the placeholder plus the first question,
/// then alternating answers and questions.
DatasetRecord assemble_instruct_record(const PlanEntry& plan, const RenderedChart& rendered,
                                       const std::vector<DialogTurn>& turns,
                                       const std::string& response_record_id, RecordMeta meta);

/// Everything the manifest records about a run beyond the records
/// themselves. Holds no timestamps and no absolute paths, so reruns of the
/// same configuration produce byte-identical manifests.
struct Manifest {
  std::string config_sha256;
  std::uint64_t seed = 0;
  std::string backend_id;
  std::string model;
  double temperature = 0.7;
  std::string template_pretrain_sha256;
  std::string template_instruct_sha256;
  std::string instruction_pool_sha256;
  std::string word_count_rule = "whitespace-words-plus-cjk-chars";

  std::size_t planned_pretrain = 0;
  std::size_t planned_instruct = 0;
  std::size_t skipped = 0;  // already present before this run (resume)

  std::vector<std::string> accepted_pretrain;  // record ids, plan order
  std::vector<std::string> accepted_instruct;
  std::map<std::string, std::string> rejected;  // record id -> quarantine reason

  /// Free-form provenance notes (data caveats, indicator conventions).
  std::vector<std::string> notes;
};

Manifest manifest_from_json(const std::string& json_text);
std::string manifest_to_json(const Manifest& manifest);

/// Writes pretrain.json / instruct.json (single arrays, plan order) and
/// manifest.json under out_dir. Every record's image path must resolve under
/// out_dir; a missing file raises DanglingImagePath naming the record.
void write_corpus(std::span<const DatasetRecord> records, const std::filesystem::path& out_dir,
                  const Manifest& manifest);

/// Reloads both corpus files (either may be absent) into records.
std::vector<DatasetRecord> load_corpus(const std::filesystem::path& out_dir);

std::string record_to_json(const DatasetRecord& record);
DatasetRecord record_from_json(const std::string& json_text);

/// Summary of one measured quantity: mean plus nearest-rank percentiles.
struct MeasureStats {
  double mean = 0.0;
  std::int64_t q5 = 0;
  std::int64_t q95 = 0;
  std::size_t n = 0;
};

struct StageStats {
  std::size_t records = 0;
  std::optional<MeasureStats> turns;  // instruct only
  MeasureStats question;
  MeasureStats answer;
  MeasureStats dialog;
};

/// Word/turn statistics per stage. Question and answer counts pool every
/// individual question/answer (for instruct, one sample per turn); the
/// dialog count is the whole record's words.
struct DatasetStats {
  std::optional<StageStats> pretrain;
  std::optional<StageStats> instruct;
};

/// Computes the statistics over `records`. Quantiles are nearest-rank
/// (ceil(p*n)-th order statistic). Throws EmptyCorpus when no records at all.
DatasetStats compute_stats(std::span<const DatasetRecord> records);

/// Question/answer texts of a record with the image placeholder stripped,
/// ready for word counting. Exposed so independent checks count exactly what
/// compute_stats counts.
std::vector<std::string> record_questions(const DatasetRecord& record);
std::vector<std::string> record_answers(const DatasetRecord& record);

/// Fixed-width report with the published row and column labels.
std::string render_stats_table(const DatasetStats& stats);

/// The same report as comma-delimited text.
std::string stats_to_csv(const DatasetStats& stats);

std::string stats_to_json(const DatasetStats& stats);
DatasetStats stats_from_json(const std::string& json_text);

}  // namespace finchart
