#include "finchart/corpus.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "finchart/errors.hpp"
#include "finchart/text.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace finchart {

namespace {

std::size_t count_occurrences(std::string_view text, std::string_view needle) {
  std::size_t count = 0;
  for (std::size_t pos = text.find(needle); pos != std::string_view::npos;
       pos = text.find(needle, pos + needle.size())) {
    ++count;
  }
  return count;
}

std::string strip_placeholder(std::string_view text) {
  std::string out(text);
  const std::size_t pos = out.find(kImagePlaceholder);
  if (pos != std::string::npos) out.erase(pos, kImagePlaceholder.size());
  return std::string(trim(out));
}

json spec_to_json(const ChartSpec& spec) {
  return json{{"chart_type", to_string(spec.chart_type)},
              {"style", to_string(spec.style_id)},
              {"ma_periods", spec.ma_periods},
              {"show_volume", spec.show_volume},
              {"width_px", spec.width_px},
              {"height_px", spec.height_px},
              {"seed", spec.seed}};
}

ChartSpec spec_from_json(const json& j) {
  ChartSpec spec;
  const std::string type = j.at("chart_type").get<std::string>();
  if (type == "candlestick") {
    spec.chart_type = ChartType::candlestick;
  } else if (type == "line") {
    spec.chart_type = ChartType::line;
  } else {
    throw Error("unknown chart type: " + type);
  }
  const std::string style = j.at("style").get<std::string>();
  bool found = false;
  for (ChartStyleId id : kAllStyles) {
    if (style == to_string(id)) {
      spec.style_id = id;
      found = true;
      break;
    }
  }
  if (!found) throw Error("unknown chart style: " + style);
  spec.ma_periods = j.at("ma_periods").get<std::vector<int>>();
  spec.show_volume = j.at("show_volume").get<bool>();
  spec.width_px = j.at("width_px").get<int>();
  spec.height_px = j.at("height_px").get<int>();
  spec.seed = j.at("seed").get<std::uint64_t>();
  return spec;
}

Date date_from_string(const std::string& text) {
  const auto date = Date::parse(text);
  if (!date) throw Error("bad date in corpus JSON: " + text);
  return *date;
}

json record_to_json_value(const DatasetRecord& record) {
  json conversations = json::array();
  for (const Message& m : record.conversations) {
    conversations.push_back({{"from", m.role}, {"value", m.text}});
  }
  json meta{{"symbol_id", record.meta.symbol_id},
            {"date_start", record.meta.date_start.to_string()},
            {"date_end", record.meta.date_end.to_string()},
            {"total_len", record.meta.total_len},
            {"prompt_len", record.meta.prompt_len},
            {"spec", spec_to_json(record.meta.spec)},
            {"image_sha256", record.meta.image_sha256}};
  if (record.meta.trend) {
    meta["trend"] = {{"direction", to_string(record.meta.trend->direction)},
                     {"magnitude", record.meta.trend->magnitude}};
  }
  return json{{"id", record.id},
              {"image", record.image},
              {"stage", to_string(record.stage)},
              {"conversations", conversations},
              {"meta", meta}};
}

DatasetRecord record_from_json_value(const json& j) {
  DatasetRecord record;
  record.id = j.at("id").get<std::string>();
  record.image = j.at("image").get<std::string>();
  const std::string stage = j.at("stage").get<std::string>();
  if (stage == "pretrain") {
    record.stage = Stage::pretrain;
  } else if (stage == "instruct") {
    record.stage = Stage::instruct;
  } else {
    throw Error("unknown stage: " + stage);
  }
  for (const json& m : j.at("conversations")) {
    record.conversations.push_back(
        {m.at("from").get<std::string>(), m.at("value").get<std::string>()});
  }
  const json& meta = j.at("meta");
  record.meta.symbol_id = meta.at("symbol_id").get<std::string>();
  record.meta.date_start = date_from_string(meta.at("date_start").get<std::string>());
  record.meta.date_end = date_from_string(meta.at("date_end").get<std::string>());
  record.meta.total_len = meta.at("total_len").get<std::size_t>();
  record.meta.prompt_len = meta.at("prompt_len").get<std::size_t>();
  record.meta.spec = spec_from_json(meta.at("spec"));
  record.meta.image_sha256 = meta.at("image_sha256").get<std::string>();
  if (meta.contains("trend")) {
    TrendLabel trend;
    const auto direction =
        direction_from_string(meta.at("trend").at("direction").get<std::string>());
    if (!direction) throw Error("bad trend direction in corpus JSON");
    trend.direction = *direction;
    trend.magnitude = meta.at("trend").at("magnitude").get<double>();
    record.meta.trend = trend;
  }
  return record;
}

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoFailure("cannot open for writing: " + path.string());
  out << text;
  if (!out) throw IoFailure("write failed: " + path.string());
}

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileUnreadable(path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return std::move(buf).str();
}

std::string records_to_array_json(std::span<const DatasetRecord> records, Stage stage) {
  json arr = json::array();
  for (const DatasetRecord& r : records) {
    if (r.stage == stage) arr.push_back(record_to_json_value(r));
  }
  return arr.dump(2) + "\n";
}

MeasureStats summarize_counts(std::vector<std::int64_t> samples) {
  MeasureStats stats;
  stats.n = samples.size();
  if (samples.empty()) return stats;
  std::sort(samples.begin(), samples.end());
  const std::int64_t sum = std::accumulate(samples.begin(), samples.end(), std::int64_t{0});
  stats.mean = static_cast<double>(sum) / static_cast<double>(samples.size());
  const std::size_t n = samples.size();
  const std::size_t rank5 = std::max<std::size_t>((5 * n + 99) / 100, 1);
  const std::size_t rank95 = std::max<std::size_t>((95 * n + 99) / 100, 1);
  stats.q5 = samples[rank5 - 1];
  stats.q95 = samples[rank95 - 1];
  return stats;
}

json measure_to_json(const MeasureStats& m) {
  return json{{"mean", m.mean}, {"q5", m.q5}, {"q95", m.q95}, {"n", m.n}};
}

MeasureStats measure_from_json(const json& j) {
  MeasureStats m;
  m.mean = j.at("mean").get<double>();
  m.q5 = j.at("q5").get<std::int64_t>();
  m.q95 = j.at("q95").get<std::int64_t>();
  m.n = j.at("n").get<std::size_t>();
  return m;
}

json stage_to_json(const StageStats& s) {
  json out{{"records", s.records},
           {"question", measure_to_json(s.question)},
           {"answer", measure_to_json(s.answer)},
           {"dialog", measure_to_json(s.dialog)}};
  if (s.turns) out["turns"] = measure_to_json(*s.turns);
  return out;
}

StageStats stage_from_json(const json& j) {
  StageStats s;
  s.records = j.at("records").get<std::size_t>();
  s.question = measure_from_json(j.at("question"));
  s.answer = measure_from_json(j.at("answer"));
  s.dialog = measure_from_json(j.at("dialog"));
  if (j.contains("turns")) s.turns = measure_from_json(j.at("turns"));
  return s;
}

struct StatsRow {
  const char* category;
  const char* measure;
  const MeasureStats* stats;
};

std::vector<StatsRow> stats_rows(const DatasetStats& stats) {
  std::vector<StatsRow> rows;
  if (stats.pretrain) {
    rows.push_back({"pre-train", "# Question", &stats.pretrain->question});
    rows.push_back({"pre-train", "# Answer", &stats.pretrain->answer});
    rows.push_back({"pre-train", "# Dialog", &stats.pretrain->dialog});
  }
  if (stats.instruct) {
    if (stats.instruct->turns) rows.push_back({"instruction", "# Turns", &*stats.instruct->turns});
    rows.push_back({"instruction", "# Question", &stats.instruct->question});
    rows.push_back({"instruction", "# Answer", &stats.instruct->answer});
    rows.push_back({"instruction", "# Dialog", &stats.instruct->dialog});
  }
  return rows;
}

}  // namespace

std::vector<std::string> check_record(const DatasetRecord& record) {
  std::vector<std::string> violations;
  if (record.id.empty()) violations.push_back("empty record id");
  if (record.image.empty()) violations.push_back("empty image path");

  const auto& conv = record.conversations;
  if (conv.empty() || conv.size() % 2 != 0) {
    violations.push_back("conversation must hold matched human/model pairs");
  }
  for (std::size_t i = 0; i < conv.size(); ++i) {
    const std::string_view expected = i % 2 == 0 ? kRoleHuman : kRoleModel;
    if (conv[i].role != expected) {
      violations.push_back("message " + std::to_string(i) + " has role '" + conv[i].role +
                           "', expected '" + std::string(expected) + "'");
    }
    if (trim(conv[i].text).empty() ||
        trim(strip_placeholder(conv[i].text)).empty()) {
      violations.push_back("message " + std::to_string(i) + " is empty");
    }
  }

  std::size_t placeholders = 0;
  for (const Message& m : conv) placeholders += count_occurrences(m.text, kImagePlaceholder);
  if (placeholders != 1) {
    violations.push_back("image placeholder appears " + std::to_string(placeholders) +
                         " times, expected exactly once");
  } else if (count_occurrences(conv.front().text, kImagePlaceholder) != 1) {
    violations.push_back("image placeholder is not in the first human message");
  }

  if (record.stage == Stage::pretrain && conv.size() != 2) {
    violations.push_back("pre-train record must hold exactly one exchange");
  }
  if (record.meta.prompt_len == 0 || record.meta.total_len <= record.meta.prompt_len) {
    violations.push_back("window lengths must satisfy 0 < prompt_len < total_len");
  }
  if (record.meta.date_end < record.meta.date_start) {
    violations.push_back("date range is reversed");
  }
  if (record.meta.image_sha256.empty()) violations.push_back("missing image digest");
  if (record.stage == Stage::instruct && !record.meta.trend) {
    violations.push_back("instruction record carries no trend label");
  }
  if (record.stage == Stage::pretrain && record.meta.trend) {
    violations.push_back("pre-train record carries an unexpected trend label");
  }
  return violations;
}

namespace {

DatasetRecord finish_record(DatasetRecord record) {
  const auto violations = check_record(record);
  if (!violations.empty()) {
    std::string joined;
    for (const std::string& v : violations) {
      if (!joined.empty()) joined += "; ";
      joined += v;
    }
    throw InvariantViolation("assembled record is malformed: " + joined);
  }
  return record;
}

void fill_meta_from_plan(RecordMeta& meta, const PlanEntry& plan, const RenderedChart& rendered) {
  meta.symbol_id = plan.window.symbol_id;
  meta.total_len = plan.window.total_len;
  meta.prompt_len = plan.window.prompt_len;
  meta.spec = plan.spec;
  meta.image_sha256 = rendered.content_hash;
}

}  // namespace

DatasetRecord assemble_pretrain_record(const PlanEntry& plan, const RenderedChart& rendered,
                                       const std::string& instruction, const std::string& answer,
                                       const std::string& response_record_id, RecordMeta meta) {
  if (response_record_id != plan.record_id) {
    throw IdMismatch("response for '" + response_record_id + "' paired with plan '" +
                     plan.record_id + "'");
  }
  if (rendered.bar_count != plan.window.prompt_len) {
    throw InvariantViolation("rendered bar count does not match the plan window");
  }
  if (trim(instruction).empty() || trim(answer).empty()) {
    throw InvariantViolation("pre-train instruction and answer must be non-empty");
  }
  DatasetRecord record;
  record.id = plan.record_id;
  record.image = "images/" + plan.record_id + ".png";
  record.stage = Stage::pretrain;
  record.conversations.push_back(
      {std::string(kRoleHuman), std::string(kImagePlaceholder) + "\n" + instruction});
  record.conversations.push_back({std::string(kRoleModel), answer});
  fill_meta_from_plan(meta, plan, rendered);
  meta.trend.reset();
  record.meta = std::move(meta);
  return finish_record(std::move(record));
}

DatasetRecord assemble_instruct_record(const PlanEntry& plan, const RenderedChart& rendered,
                                       const std::vector<DialogTurn>& turns,
                                       const std::string& response_record_id, RecordMeta meta) {
  if (response_record_id != plan.record_id) {
    throw IdMismatch("response for '" + response_record_id + "' paired with plan '" +
                     plan.record_id + "'");
  }
  if (rendered.bar_count != plan.window.prompt_len) {
    throw InvariantViolation("rendered bar count does not match the plan window");
  }
  if (turns.empty()) throw InvariantViolation("instruction record needs at least one turn");
  DatasetRecord record;
  record.id = plan.record_id;
  record.image = "images/" + plan.record_id + ".png";
  record.stage = Stage::instruct;
  for (std::size_t i = 0; i < turns.size(); ++i) {
    std::string question = turns[i].question;
    if (i == 0) question = std::string(kImagePlaceholder) + "\n" + question;
    record.conversations.push_back({std::string(kRoleHuman), std::move(question)});
    record.conversations.push_back({std::string(kRoleModel), turns[i].answer});
  }
  fill_meta_from_plan(meta, plan, rendered);
  record.meta = std::move(meta);
  return finish_record(std::move(record));
}

Manifest manifest_from_json(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(std::string("manifest is not valid JSON: ") + e.what());
  }
  Manifest m;
  m.config_sha256 = j.at("config_sha256").get<std::string>();
  m.seed = j.at("seed").get<std::uint64_t>();
  m.backend_id = j.at("backend_id").get<std::string>();
  m.model = j.at("model").get<std::string>();
  m.temperature = j.at("temperature").get<double>();
  m.template_pretrain_sha256 = j.at("template_pretrain_sha256").get<std::string>();
  m.template_instruct_sha256 = j.at("template_instruct_sha256").get<std::string>();
  m.instruction_pool_sha256 = j.at("instruction_pool_sha256").get<std::string>();
  m.word_count_rule = j.at("word_count_rule").get<std::string>();
  m.planned_pretrain = j.at("planned_pretrain").get<std::size_t>();
  m.planned_instruct = j.at("planned_instruct").get<std::size_t>();
  m.skipped = j.at("skipped").get<std::size_t>();
  m.accepted_pretrain = j.at("accepted_pretrain").get<std::vector<std::string>>();
  m.accepted_instruct = j.at("accepted_instruct").get<std::vector<std::string>>();
  m.rejected = j.at("rejected").get<std::map<std::string, std::string>>();
  m.notes = j.at("notes").get<std::vector<std::string>>();
  return m;
}

std::string manifest_to_json(const Manifest& m) {
  const json j{{"config_sha256", m.config_sha256},
               {"seed", m.seed},
               {"backend_id", m.backend_id},
               {"model", m.model},
               {"temperature", m.temperature},
               {"template_pretrain_sha256", m.template_pretrain_sha256},
               {"template_instruct_sha256", m.template_instruct_sha256},
               {"instruction_pool_sha256", m.instruction_pool_sha256},
               {"word_count_rule", m.word_count_rule},
               {"planned_pretrain", m.planned_pretrain},
               {"planned_instruct", m.planned_instruct},
               {"skipped", m.skipped},
               {"accepted_pretrain", m.accepted_pretrain},
               {"accepted_instruct", m.accepted_instruct},
               {"rejected", m.rejected},
               {"notes", m.notes}};
  return j.dump(2) + "\n";
}

void write_corpus(std::span<const DatasetRecord> records, const fs::path& out_dir,
                  const Manifest& manifest) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  for (const DatasetRecord& record : records) {
    const auto violations = check_record(record);
    if (!violations.empty()) {
      throw InvariantViolation("record " + record.id + " is malformed: " + violations.front());
    }
    if (!fs::exists(out_dir / record.image)) {
      throw DanglingImagePath("record " + record.id + " references missing image " + record.image);
    }
  }

  bool any_pretrain = manifest.planned_pretrain > 0;
  bool any_instruct = manifest.planned_instruct > 0;
  for (const DatasetRecord& r : records) {
    any_pretrain = any_pretrain || r.stage == Stage::pretrain;
    any_instruct = any_instruct || r.stage == Stage::instruct;
  }
  if (any_pretrain) {
    write_text_file(out_dir / "pretrain.json", records_to_array_json(records, Stage::pretrain));
  }
  if (any_instruct) {
    write_text_file(out_dir / "instruct.json", records_to_array_json(records, Stage::instruct));
  }
  write_text_file(out_dir / "manifest.json", manifest_to_json(manifest));
}

std::vector<DatasetRecord> load_corpus(const fs::path& out_dir) {
  std::vector<DatasetRecord> records;
  for (const char* name : {"pretrain.json", "instruct.json"}) {
    const fs::path path = out_dir / name;
    if (!fs::exists(path)) continue;
    json arr;
    try {
      arr = json::parse(read_text_file(path));
    } catch (const json::exception& e) {
      throw Error("corpus file " + path.string() + " is not valid JSON: " + e.what());
    }
    if (!arr.is_array()) throw Error("corpus file " + path.string() + " is not a JSON array");
    for (const json& item : arr) records.push_back(record_from_json_value(item));
  }
  return records;
}

std::string record_to_json(const DatasetRecord& record) {
  return record_to_json_value(record).dump(2);
}

DatasetRecord record_from_json(const std::string& json_text) {
  try {
    return record_from_json_value(json::parse(json_text));
  } catch (const json::exception& e) {
    throw Error(std::string("record is not valid JSON: ") + e.what());
  }
}

std::vector<std::string> record_questions(const DatasetRecord& record) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < record.conversations.size(); i += 2) {
    out.push_back(strip_placeholder(record.conversations[i].text));
  }
  return out;
}

std::vector<std::string> record_answers(const DatasetRecord& record) {
  std::vector<std::string> out;
  for (std::size_t i = 1; i < record.conversations.size(); i += 2) {
    out.push_back(record.conversations[i].text);
  }
  return out;
}

DatasetStats compute_stats(std::span<const DatasetRecord> records) {
  if (records.empty()) throw EmptyCorpus("no records to summarize");

  std::vector<std::int64_t> pre_q, pre_a, pre_d;
  std::vector<std::int64_t> ins_turns, ins_q, ins_a, ins_d;
  std::size_t pre_records = 0;
  std::size_t ins_records = 0;

  for (const DatasetRecord& record : records) {
    const auto questions = record_questions(record);
    const auto answers = record_answers(record);
    std::int64_t record_words = 0;
    std::vector<std::int64_t> q_counts, a_counts;
    for (const std::string& q : questions) {
      q_counts.push_back(static_cast<std::int64_t>(count_words(q)));
      record_words += q_counts.back();
    }
    for (const std::string& a : answers) {
      a_counts.push_back(static_cast<std::int64_t>(count_words(a)));
      record_words += a_counts.back();
    }

    if (record.stage == Stage::pretrain) {
      ++pre_records;
      // One exchange per record: a single question/answer sample each.
      pre_q.insert(pre_q.end(), q_counts.begin(), q_counts.end());
      pre_a.insert(pre_a.end(), a_counts.begin(), a_counts.end());
      pre_d.push_back(record_words);
    } else {
      ++ins_records;
      ins_turns.push_back(static_cast<std::int64_t>(questions.size()));
      ins_q.insert(ins_q.end(), q_counts.begin(), q_counts.end());
      ins_a.insert(ins_a.end(), a_counts.begin(), a_counts.end());
      ins_d.push_back(record_words);
    }
  }

  DatasetStats stats;
  if (pre_records > 0) {
    StageStats s;
    s.records = pre_records;
    s.question = summarize_counts(std::move(pre_q));
    s.answer = summarize_counts(std::move(pre_a));
    s.dialog = summarize_counts(std::move(pre_d));
    stats.pretrain = std::move(s);
  }
  if (ins_records > 0) {
    StageStats s;
    s.records = ins_records;
    s.turns = summarize_counts(std::move(ins_turns));
    s.question = summarize_counts(std::move(ins_q));
    s.answer = summarize_counts(std::move(ins_a));
    s.dialog = summarize_counts(std::move(ins_d));
    stats.instruct = std::move(s);
  }
  return stats;
}

std::string render_stats_table(const DatasetStats& stats) {
  char line[160];
  std::string out;
  std::snprintf(line, sizeof(line), "%-12s %-11s %10s %8s %8s\n", "category", "measure", "mean",
                "q-5%", "q-95%");
  out += line;
  out += std::string(52, '-') + "\n";
  for (const StatsRow& row : stats_rows(stats)) {
    std::snprintf(line, sizeof(line), "%-12s %-11s %10.2f %8lld %8lld\n", row.category,
                  row.measure, row.stats->mean, static_cast<long long>(row.stats->q5),
                  static_cast<long long>(row.stats->q95));
    out += line;
  }
  return out;
}

std::string stats_to_csv(const DatasetStats& stats) {
  std::string out = "category,measure,mean,q-5%,q-95%,n\n";
  char line[160];
  for (const StatsRow& row : stats_rows(stats)) {
    std::snprintf(line, sizeof(line), "%s,%s,%.6f,%lld,%lld,%zu\n", row.category, row.measure,
                  row.stats->mean, static_cast<long long>(row.stats->q5),
                  static_cast<long long>(row.stats->q95), row.stats->n);
    out += line;
  }
  return out;
}

std::string stats_to_json(const DatasetStats& stats) {
  json j = json::object();
  if (stats.pretrain) j["pretrain"] = stage_to_json(*stats.pretrain);
  if (stats.instruct) j["instruct"] = stage_to_json(*stats.instruct);
  return j.dump(2) + "\n";
}

DatasetStats stats_from_json(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(std::string("stats are not valid JSON: ") + e.what());
  }
  DatasetStats stats;
  if (j.contains("pretrain")) stats.pretrain = stage_from_json(j.at("pretrain"));
  if (j.contains("instruct")) stats.instruct = stage_from_json(j.at("instruct"));
  return stats;
}

}  // namespace finchart
