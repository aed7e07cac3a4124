#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "finchart/corpus.hpp"
#include "finchart/errors.hpp"
#include "finchart/pipeline.hpp"
#include "finchart/text.hpp"
#include "finchart/trend.hpp"

namespace {

using namespace finchart;
using nlohmann::json;

struct GenerateArgs {
  std::string config_path;
  std::optional<std::string> input_csv;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> stage;
  std::optional<std::size_t> target_pretrain;
  std::optional<std::size_t> target_instruct;
  std::optional<std::string> backend_kind;
};

int cmd_generate(const GenerateArgs& args) {
  PipelineConfig config = load_config(args.config_path);
  if (args.input_csv) config.input_csv = *args.input_csv;
  if (args.out_dir) config.out_dir = *args.out_dir;
  if (args.seed) {
    config.seed = *args.seed;
    config.seed_set = true;
  }
  if (args.stage) {
    if (*args.stage == "pretrain") {
      config.stage = RunStage::pretrain;
    } else if (*args.stage == "instruct") {
      config.stage = RunStage::instruct;
    } else if (*args.stage == "both") {
      config.stage = RunStage::both;
    } else {
      throw ConfigInvalid("stage", "must be pretrain, instruct or both");
    }
  }
  if (args.target_pretrain) config.target_pretrain = *args.target_pretrain;
  if (args.target_instruct) config.target_instruct = *args.target_instruct;
  if (args.backend_kind) config.backend_kind = *args.backend_kind;

  const RunSummary summary = run_pipeline(config, nullptr, &std::cerr);
  const json out{{"planned", summary.planned},
                 {"accepted", summary.accepted},
                 {"rejected", summary.rejected},
                 {"skipped", summary.skipped},
                 {"accounting_ok", summary.accounting_ok()},
                 {"manifest", summary.manifest_path.generic_string()}};
  std::cout << out.dump(2) << "\n";
  return summary.accounting_ok() ? 0 : 1;
}

int cmd_stats(const std::string& corpus_dir, const std::string& format) {
  const auto records = load_corpus(corpus_dir);
  const DatasetStats stats = compute_stats(records);
  if (format == "csv") {
    std::cout << stats_to_csv(stats);
  } else if (format == "json") {
    std::cout << stats_to_json(stats);
  } else {
    std::cout << render_stats_table(stats);
  }
  return 0;
}

int cmd_validate(const std::string& corpus_dir, bool as_json) {
  const ValidationReport report = validate_corpus(corpus_dir);
  if (as_json) {
    std::cout << validation_report_to_json(report);
  } else {
    std::cout << "records checked: " << report.records_checked << "\n"
              << "images checked:  " << report.images_checked << "\n";
    for (const Violation& v : report.violations) {
      std::cout << "violation [" << v.kind << "] "
                << (v.record_id.empty() ? std::string("<corpus>") : v.record_id) << ": "
                << v.detail << "\n";
    }
    std::cout << (report.ok() ? "OK" : "FAILED") << "\n";
  }
  return report.ok() ? 0 : 1;
}

int cmd_eval_trend(const std::string& corpus_dir, const std::string& predictions_path) {
  std::vector<TrendLabel> truth;
  std::vector<std::string> ids;
  for (const DatasetRecord& record : load_corpus(corpus_dir)) {
    if (record.stage != Stage::instruct) continue;
    if (!record.meta.trend) {
      throw Error("record " + record.id + " carries no trend label");
    }
    truth.push_back(*record.meta.trend);
    ids.push_back(record.id);
  }
  if (truth.empty()) throw EmptyCorpus("no instruction records with trend labels");

  std::unordered_map<std::string, Direction> by_id;
  std::ifstream in(predictions_path);
  if (!in) throw FileUnreadable(predictions_path);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (line_no == 1 && t == "record_id,direction") continue;
    const std::size_t comma = t.find(',');
    if (comma == std::string::npos) {
      throw Error("predictions line " + std::to_string(line_no) + " is not 'record_id,direction'");
    }
    const std::string id = trim(t.substr(0, comma));
    const auto direction = direction_from_string(trim(t.substr(comma + 1)));
    if (!direction) {
      throw Error("predictions line " + std::to_string(line_no) +
                  ": direction must be up, down or flat");
    }
    by_id[id] = *direction;
  }

  std::vector<std::optional<Direction>> predictions;
  predictions.reserve(ids.size());
  for (const std::string& id : ids) {
    const auto it = by_id.find(id);
    predictions.push_back(it == by_id.end() ? std::nullopt
                                            : std::optional<Direction>(it->second));
  }

  const TrendScore score = score_directions(predictions, truth);
  json confusion = json::object();
  const char* names[] = {"up", "down", "flat"};
  for (std::size_t t = 0; t < kDirections; ++t) {
    confusion[names[t]] = {{"up", score.confusion[t][0]},
                           {"down", score.confusion[t][1]},
                           {"flat", score.confusion[t][2]},
                           {"abstain", score.confusion[t][3]}};
  }
  const json out{{"total", score.total},
                 {"correct", score.correct},
                 {"abstentions", score.abstentions},
                 {"accuracy", score.accuracy},
                 {"confusion", confusion}};
  std::cout << out.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"finchart: chart-image instruction corpus pipeline"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Run the generation pipeline");
  generate->add_option("--config", gen.config_path, "Pipeline config JSON")->required();
  generate->add_option("--input", gen.input_csv, "Override input_csv");
  generate->add_option("--out", gen.out_dir, "Override out_dir");
  generate->add_option("--seed", gen.seed, "Override the run seed");
  generate->add_option("--stage", gen.stage, "pretrain | instruct | both");
  generate->add_option("--target-pretrain", gen.target_pretrain, "Pre-train record target");
  generate->add_option("--target-instruct", gen.target_instruct, "Instruction record target");
  generate->add_option("--backend", gen.backend_kind, "mock | http");

  std::string stats_dir;
  std::string stats_format = "table";
  auto* stats = app.add_subcommand("stats", "Corpus word/turn statistics");
  stats->add_option("--corpus", stats_dir, "Corpus directory")->required();
  stats->add_option("--format", stats_format, "table | csv | json")
      ->check(CLI::IsMember({"table", "csv", "json"}));

  std::string validate_dir;
  bool validate_json = false;
  auto* validate = app.add_subcommand("validate", "Check a generated corpus");
  validate->add_option("--corpus", validate_dir, "Corpus directory")->required();
  validate->add_flag("--json", validate_json, "Machine-readable report");

  std::string eval_dir;
  std::string eval_predictions;
  auto* eval = app.add_subcommand("eval-trend", "Score direction predictions");
  eval->add_option("--corpus", eval_dir, "Corpus directory")->required();
  eval->add_option("--predictions", eval_predictions, "CSV of record_id,direction")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (generate->parsed()) return cmd_generate(gen);
    if (stats->parsed()) return cmd_stats(stats_dir, stats_format);
    if (validate->parsed()) return cmd_validate(validate_dir, validate_json);
    if (eval->parsed()) return cmd_eval_trend(eval_dir, eval_predictions);
  } catch (const finchart::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
