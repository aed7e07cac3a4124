#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "finchart/backend.hpp"
#include "finchart/corpus.hpp"
#include "finchart/dialog.hpp"
#include "finchart/http_backend.hpp"
#include "finchart/mock_backend.hpp"
#include "finchart/ohlcv.hpp"
#include "finchart/sampler.hpp"

namespace finchart {

enum class RunStage { pretrain, instruct, both };

/// Full pipeline configuration. Every constant of the dataset design is
/// surfaced here with its published default; the seed is mandatory so no run
/// depends on ambient randomness.
struct PipelineConfig {
  std::filesystem::path input_csv;
  std::filesystem::path out_dir;
  /// Sidecar map of raw tickers to opaque ids. Defaults to
  /// out_dir/symbol_map.csv; keep it out of any published copy of the corpus.
  std::optional<std::filesystem::path> symbol_map_path;

  std::uint64_t seed = 0;
  bool seed_set = false;

  RunStage stage = RunStage::both;
  std::size_t target_pretrain = 0;
  std::size_t target_instruct = 0;

  SamplerParams sampler;

  std::string backend_kind = "mock";  // "mock" | "http"
  HttpBackendConfig http;
  MockBackendOptions mock;
  int max_in_flight = 4;
  RetryPolicy retry;

  std::int64_t trend_epsilon_ppm = 5000;  // 0.5%
  ContentRules content;

  std::optional<std::filesystem::path> template_dir;
  std::string template_language = "en";
  std::string anonymize_salt = "finchart-v1";
};

/// Parses and validates a JSON config document. Unknown keys and
/// out-of-range values raise ConfigInvalid naming the field.
PipelineConfig config_from_json(const std::string& json_text);
PipelineConfig load_config(const std::filesystem::path& path);

/// Canonical serialization of the generation-relevant parameters; its sha256
/// is the manifest's config hash. Output paths are excluded so the same
/// generation run into two directories hashes identically.
std::string config_canonical_json(const PipelineConfig& config);

struct RunSummary {
  std::size_t planned = 0;
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t skipped = 0;
  std::filesystem::path manifest_path;
  /// planned == accepted + rejected + skipped.
  bool accounting_ok() const { return planned == accepted + rejected + skipped; }
};

/// Runs ingest -> plan -> render -> annotate -> parse -> write. Reruns over
/// an existing out_dir skip records whose ids the manifest already carries.
/// Progress lines go to `progress` when given (the CLI passes stderr).
/// `backend_override` substitutes the configured backend; tests use it to
/// instrument or fault-inject.
RunSummary run_pipeline(const PipelineConfig& config,
                        std::shared_ptr<Backend> backend_override = nullptr,
                        std::ostream* progress = nullptr);

struct Violation {
  std::string record_id;  // empty for corpus-level findings
  std::string kind;
  std::string detail;
};

struct ValidationReport {
  std::size_t records_checked = 0;
  std::size_t images_checked = 0;
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

/// Re-checks every record invariant, image integrity (dimensions and
/// content hash), manifest consistency, and statistics reproducibility for a
/// generated corpus. Throws ManifestMissing when out_dir has no manifest.
ValidationReport validate_corpus(const std::filesystem::path& out_dir);

std::string validation_report_to_json(const ValidationReport& report);

/// Builds the backend named by the config ("mock" or "http").
std::shared_ptr<Backend> make_backend(const PipelineConfig& config);

}  // namespace finchart
