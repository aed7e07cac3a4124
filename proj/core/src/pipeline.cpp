#include "finchart/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "finchart/errors.hpp"
#include "finchart/hash.hpp"
#include "finchart/kline.hpp"
#include "finchart/png.hpp"
#include "finchart/prompts.hpp"
#include "finchart/rng.hpp"
#include "finchart/text.hpp"
#include "finchart/trend.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace finchart {

namespace {

constexpr std::size_t kChunkSize = 64;

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileUnreadable(path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return std::move(buf).str();
}

void write_text_file(const fs::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoFailure("cannot open for writing: " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoFailure("write failed: " + path.string());
}

void write_bytes(const fs::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoFailure("cannot open for writing: " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoFailure("write failed: " + path.string());
}

std::vector<std::uint8_t> read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileUnreadable(path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return bytes;
}

// --- config ---------------------------------------------------------------

void require_keys(const json& obj, const std::string& prefix,
                  std::initializer_list<const char*> known) {
  for (const auto& [key, value] : obj.items()) {
    if (std::find_if(known.begin(), known.end(),
                     [&](const char* k) { return key == k; }) == known.end()) {
      throw ConfigInvalid(prefix.empty() ? key : prefix + "." + key, "unknown field");
    }
  }
}

template <typename T>
T get_or(const json& obj, const char* key, T fallback) {
  if (!obj.contains(key)) return fallback;
  return obj.at(key).get<T>();
}

RunStage stage_from_string(const std::string& text) {
  if (text == "pretrain") return RunStage::pretrain;
  if (text == "instruct") return RunStage::instruct;
  if (text == "both") return RunStage::both;
  throw ConfigInvalid("stage", "must be pretrain, instruct or both");
}

const char* to_string(RunStage stage) {
  switch (stage) {
    case RunStage::pretrain: return "pretrain";
    case RunStage::instruct: return "instruct";
    case RunStage::both: return "both";
  }
  return "both";
}

void check_config(const PipelineConfig& c) {
  if (c.input_csv.empty()) throw ConfigInvalid("input_csv", "required");
  if (c.out_dir.empty()) throw ConfigInvalid("out_dir", "required");
  if (!c.seed_set) throw ConfigInvalid("seed", "required; runs must be reproducible");
  const SamplerParams& s = c.sampler;
  if (s.min_total < 2) throw ConfigInvalid("sampler.min_total", "must be at least 2");
  if (s.max_total < s.min_total)
    throw ConfigInvalid("sampler.max_total", "must be >= min_total");
  if (!(s.min_prompt_frac > 0.0 && s.min_prompt_frac < 1.0))
    throw ConfigInvalid("sampler.min_prompt_frac", "must lie in (0, 1)");
  if (!(s.max_prompt_frac > s.min_prompt_frac && s.max_prompt_frac < 1.0))
    throw ConfigInvalid("sampler.max_prompt_frac", "must lie in (min_prompt_frac, 1)");
  for (auto [name, p] : {std::pair{"sampler.candlestick_prob", s.candlestick_prob},
                         {"sampler.ma_prob", s.ma_prob},
                         {"sampler.volume_prob", s.volume_prob}}) {
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigInvalid(name, "must lie in [0, 1]");
  }
  if (s.width_px < 64 || s.width_px > 4096) throw ConfigInvalid("sampler.width_px", "out of range");
  if (s.height_px < 64 || s.height_px > 4096)
    throw ConfigInvalid("sampler.height_px", "out of range");
  if (c.backend_kind != "mock" && c.backend_kind != "http")
    throw ConfigInvalid("backend.kind", "must be mock or http");
  if (c.backend_kind == "http" && c.http.endpoint.empty())
    throw ConfigInvalid("backend.endpoint", "required for the http backend");
  if (!(c.http.temperature >= 0.0 && c.http.temperature <= 2.0))
    throw ConfigInvalid("backend.temperature", "must lie in [0, 2]");
  if (c.http.timeout_sec < 1) throw ConfigInvalid("backend.timeout_sec", "must be positive");
  if (c.max_in_flight < 1) throw ConfigInvalid("backend.max_in_flight", "must be positive");
  if (c.retry.max_attempts < 1) throw ConfigInvalid("backend.retry.max_attempts", "must be positive");
  if (c.retry.backoff_factor < 1.0)
    throw ConfigInvalid("backend.retry.backoff_factor", "must be >= 1");
  if (!(c.retry.jitter >= 0.0 && c.retry.jitter < 1.0))
    throw ConfigInvalid("backend.retry.jitter", "must lie in [0, 1)");
  if (c.trend_epsilon_ppm < 0) throw ConfigInvalid("trend_epsilon_ppm", "must be non-negative");
  if (c.mock.epsilon_ppm < 0) throw ConfigInvalid("backend.epsilon_ppm", "must be non-negative");
  if (c.content.min_turns < 1) throw ConfigInvalid("content.min_turns", "must be positive");
  if (c.content.max_turns < c.content.min_turns)
    throw ConfigInvalid("content.max_turns", "must be >= min_turns");
  if (c.anonymize_salt.empty()) throw ConfigInvalid("anonymize_salt", "must be non-empty");
}

}  // namespace

PipelineConfig config_from_json(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigInvalid("<document>", std::string("not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigInvalid("<document>", "top level must be a JSON object");
  require_keys(j, "",
               {"input_csv", "out_dir", "symbol_map_path", "seed", "stage", "target_pretrain",
                "target_instruct", "sampler", "backend", "trend_epsilon_ppm", "content",
                "template_dir", "template_language", "anonymize_salt"});

  PipelineConfig c;
  try {
    c.input_csv = get_or<std::string>(j, "input_csv", "");
    c.out_dir = get_or<std::string>(j, "out_dir", "");
    if (j.contains("symbol_map_path"))
      c.symbol_map_path = fs::path(j.at("symbol_map_path").get<std::string>());
    if (j.contains("seed")) {
      c.seed = j.at("seed").get<std::uint64_t>();
      c.seed_set = true;
    }
    c.stage = stage_from_string(get_or<std::string>(j, "stage", "both"));
    c.target_pretrain = get_or<std::size_t>(j, "target_pretrain", 0);
    c.target_instruct = get_or<std::size_t>(j, "target_instruct", 0);

    if (j.contains("sampler")) {
      const json& s = j.at("sampler");
      require_keys(s, "sampler",
                   {"min_total", "max_total", "min_prompt_frac", "max_prompt_frac",
                    "candlestick_prob", "ma_prob", "volume_prob", "width_px", "height_px"});
      c.sampler.min_total = get_or<int>(s, "min_total", c.sampler.min_total);
      c.sampler.max_total = get_or<int>(s, "max_total", c.sampler.max_total);
      c.sampler.min_prompt_frac = get_or<double>(s, "min_prompt_frac", c.sampler.min_prompt_frac);
      c.sampler.max_prompt_frac = get_or<double>(s, "max_prompt_frac", c.sampler.max_prompt_frac);
      c.sampler.candlestick_prob =
          get_or<double>(s, "candlestick_prob", c.sampler.candlestick_prob);
      c.sampler.ma_prob = get_or<double>(s, "ma_prob", c.sampler.ma_prob);
      c.sampler.volume_prob = get_or<double>(s, "volume_prob", c.sampler.volume_prob);
      c.sampler.width_px = get_or<int>(s, "width_px", c.sampler.width_px);
      c.sampler.height_px = get_or<int>(s, "height_px", c.sampler.height_px);
    }

    if (j.contains("backend")) {
      const json& b = j.at("backend");
      require_keys(b, "backend",
                   {"kind", "endpoint", "model", "temperature", "api_key_env", "timeout_sec",
                    "epsilon_ppm", "simulated_latency_ms", "max_in_flight", "retry"});
      c.backend_kind = get_or<std::string>(b, "kind", c.backend_kind);
      c.http.endpoint = get_or<std::string>(b, "endpoint", c.http.endpoint);
      c.http.model = get_or<std::string>(b, "model", c.http.model);
      c.http.temperature = get_or<double>(b, "temperature", c.http.temperature);
      c.http.api_key_env = get_or<std::string>(b, "api_key_env", c.http.api_key_env);
      c.http.timeout_sec = get_or<int>(b, "timeout_sec", c.http.timeout_sec);
      c.mock.epsilon_ppm = get_or<std::int64_t>(b, "epsilon_ppm", c.mock.epsilon_ppm);
      c.mock.simulated_latency_ms =
          get_or<int>(b, "simulated_latency_ms", c.mock.simulated_latency_ms);
      c.max_in_flight = get_or<int>(b, "max_in_flight", c.max_in_flight);
      if (b.contains("retry")) {
        const json& r = b.at("retry");
        require_keys(r, "backend.retry",
                     {"max_attempts", "initial_delay_ms", "backoff_factor", "max_delay_ms",
                      "jitter"});
        c.retry.max_attempts = get_or<int>(r, "max_attempts", c.retry.max_attempts);
        c.retry.initial_delay = std::chrono::milliseconds(
            get_or<std::int64_t>(r, "initial_delay_ms", c.retry.initial_delay.count()));
        c.retry.backoff_factor = get_or<double>(r, "backoff_factor", c.retry.backoff_factor);
        c.retry.max_delay = std::chrono::milliseconds(
            get_or<std::int64_t>(r, "max_delay_ms", c.retry.max_delay.count()));
        c.retry.jitter = get_or<double>(r, "jitter", c.retry.jitter);
      }
    }

    c.trend_epsilon_ppm = get_or<std::int64_t>(j, "trend_epsilon_ppm", c.trend_epsilon_ppm);

    if (j.contains("content")) {
      const json& t = j.at("content");
      require_keys(t, "content",
                   {"segment_blocklist", "leakage_phrases", "min_turns", "max_turns"});
      c.content.segment_blocklist = get_or<std::vector<std::string>>(
          t, "segment_blocklist", c.content.segment_blocklist);
      c.content.leakage_phrases =
          get_or<std::vector<std::string>>(t, "leakage_phrases", c.content.leakage_phrases);
      c.content.min_turns = get_or<std::size_t>(t, "min_turns", c.content.min_turns);
      c.content.max_turns = get_or<std::size_t>(t, "max_turns", c.content.max_turns);
    }

    if (j.contains("template_dir"))
      c.template_dir = fs::path(j.at("template_dir").get<std::string>());
    c.template_language = get_or<std::string>(j, "template_language", c.template_language);
    c.anonymize_salt = get_or<std::string>(j, "anonymize_salt", c.anonymize_salt);
  } catch (const json::exception& e) {
    throw ConfigInvalid("<document>", std::string("type error: ") + e.what());
  }

  check_config(c);
  return c;
}

PipelineConfig load_config(const fs::path& path) {
  return config_from_json(read_text_file(path));
}

std::string config_canonical_json(const PipelineConfig& c) {
  // Operational knobs (paths under the caller's control, retry pacing,
  // concurrency, timeouts, credential variable name) are left out: they do
  // not change the generated bytes.
  const json j{
      {"input_csv", c.input_csv.generic_string()},
      {"seed", c.seed},
      {"stage", to_string(c.stage)},
      {"target_pretrain", c.target_pretrain},
      {"target_instruct", c.target_instruct},
      {"sampler",
       {{"min_total", c.sampler.min_total},
        {"max_total", c.sampler.max_total},
        {"min_prompt_frac", c.sampler.min_prompt_frac},
        {"max_prompt_frac", c.sampler.max_prompt_frac},
        {"candlestick_prob", c.sampler.candlestick_prob},
        {"ma_prob", c.sampler.ma_prob},
        {"volume_prob", c.sampler.volume_prob},
        {"width_px", c.sampler.width_px},
        {"height_px", c.sampler.height_px}}},
      {"backend",
       {{"kind", c.backend_kind},
        {"endpoint", c.http.endpoint},
        {"model", c.http.model},
        {"temperature", c.http.temperature},
        {"epsilon_ppm", c.mock.epsilon_ppm}}},
      {"trend_epsilon_ppm", c.trend_epsilon_ppm},
      {"content",
       {{"segment_blocklist", c.content.segment_blocklist},
        {"leakage_phrases", c.content.leakage_phrases},
        {"min_turns", c.content.min_turns},
        {"max_turns", c.content.max_turns}}},
      {"template_language", c.template_language},
      {"anonymize_salt", c.anonymize_salt},
  };
  return j.dump();
}

std::shared_ptr<Backend> make_backend(const PipelineConfig& config) {
  if (config.backend_kind == "mock") return std::make_shared<MockBackend>(config.mock);
  if (config.backend_kind == "http") return std::make_shared<HttpBackend>(config.http);
  throw ConfigInvalid("backend.kind", "must be mock or http");
}

// --- run ------------------------------------------------------------------

namespace {

struct StagePlanEntry {
  Stage stage = Stage::pretrain;
  PlanEntry plan;
};

struct PreparedEntry {
  StagePlanEntry entry;
  std::span<const OhlcvBar> prompt_bars;
  std::span<const OhlcvBar> predict_bars;
  RenderedChart rendered;
  AnnotationRequest request;
};

std::span<const OhlcvBar> window_bars(const Series& series, const Window& w) {
  return std::span(series.bars).subspan(w.start, w.total_len);
}

std::size_t instruction_index(const std::string& record_id, std::size_t pool_size) {
  return static_cast<std::size_t>(digest_to_u64(sha256(record_id + "/instruction")) % pool_size);
}

std::string classify_reject(const std::exception& e) {
  if (dynamic_cast<const ContentViolation*>(&e)) return std::string("ContentViolation: ") + e.what();
  if (dynamic_cast<const TurnCountOutOfRange*>(&e))
    return std::string("TurnCountOutOfRange: ") + e.what();
  if (dynamic_cast<const UnpairedSegments*>(&e))
    return std::string("UnpairedSegments: ") + e.what();
  if (dynamic_cast<const EmptyAnswer*>(&e)) return std::string("EmptyAnswer: ") + e.what();
  return std::string("Error: ") + e.what();
}

void quarantine(const fs::path& out_dir, const std::string& record_id, const std::string& reason,
                const std::string& raw_text) {
  const fs::path dir = out_dir / "rejects";
  std::error_code ec;
  fs::create_directories(dir, ec);
  std::string body = reason + "\n";
  if (!raw_text.empty()) body += "\n" + raw_text + "\n";
  write_text_file(dir / (record_id + ".txt"), body);
}

std::vector<std::string> provenance_notes() {
  return {
      "prices are ingested as given; no split or dividend adjustment is applied",
      "moving averages use daily closing values over 3, 6 and 9 sessions",
      "record ids and symbol ids are content-derived letters, never raw tickers",
  };
}

}  // namespace

RunSummary run_pipeline(const PipelineConfig& config, std::shared_ptr<Backend> backend_override,
                        std::ostream* progress) {
  check_config(config);
  const std::size_t target_pretrain =
      config.stage == RunStage::instruct ? 0 : config.target_pretrain;
  const std::size_t target_instruct =
      config.stage == RunStage::pretrain ? 0 : config.target_instruct;
  if (target_pretrain + target_instruct == 0)
    throw ConfigInvalid("target_pretrain", "nothing to generate for the requested stage");

  auto report = [&](const std::string& line) {
    if (progress != nullptr) *progress << line << "\n" << std::flush;
  };

  const std::string config_canon = config_canonical_json(config);
  const std::string config_hash = sha256_hex(config_canon);

  std::shared_ptr<Backend> backend = backend_override ? backend_override : make_backend(config);
  if (config.backend_kind == "http" && !backend_override) {
    const char* key = std::getenv(config.http.api_key_env.c_str());
    if (key == nullptr || *key == '\0') {
      throw AuthFailure("environment variable " + config.http.api_key_env +
                        " is not set; refusing to start an http run");
    }
  }

  const PromptTemplates templates =
      config.template_dir
          ? PromptTemplates::load_dir(*config.template_dir, config.template_language)
          : PromptTemplates::builtin();

  // Ingest.
  LoadOptions load_options;
  load_options.salt = config.anonymize_salt;
  const LoadResult loaded = load_series(config.input_csv, load_options);
  report("[ingest] " + std::to_string(loaded.series.size()) + " series, " +
         std::to_string(loaded.accepted_rows) + "/" + std::to_string(loaded.total_rows) +
         " rows accepted");

  std::unordered_map<std::string, const Series*> by_id;
  for (const Series& s : loaded.series) by_id.emplace(s.symbol_id, &s);

  std::error_code ec;
  fs::create_directories(config.out_dir / "images", ec);
  const fs::path map_path =
      config.symbol_map_path ? *config.symbol_map_path : config.out_dir / "symbol_map.csv";
  if (!map_path.parent_path().empty()) fs::create_directories(map_path.parent_path(), ec);
  write_symbol_map(map_path, loaded.symbol_map);

  // Resume state.
  Manifest manifest;
  std::vector<DatasetRecord> records;
  const fs::path manifest_path = config.out_dir / "manifest.json";
  if (fs::exists(manifest_path)) {
    manifest = manifest_from_json(read_text_file(manifest_path));
    if (manifest.config_sha256 != config_hash) {
      throw ConfigInvalid("out_dir",
                          "holds a corpus generated with a different configuration; "
                          "choose a fresh directory or restore the original config");
    }
    records = load_corpus(config.out_dir);
    report("[resume] " + std::to_string(records.size()) + " records already present");
  }
  manifest.config_sha256 = config_hash;
  manifest.seed = config.seed;
  manifest.backend_id = backend->id();
  manifest.model = config.backend_kind == "http" ? config.http.model : backend->id();
  manifest.temperature = config.backend_kind == "http" ? config.http.temperature : 0.0;
  manifest.template_pretrain_sha256 = templates.pretrain_sha256;
  manifest.template_instruct_sha256 = templates.instruct_sha256;
  manifest.instruction_pool_sha256 = templates.instructions_sha256;
  manifest.planned_pretrain = target_pretrain;
  manifest.planned_instruct = target_instruct;
  manifest.notes = provenance_notes();

  std::unordered_set<std::string> known;
  for (const std::string& id : manifest.accepted_pretrain) known.insert(id);
  for (const std::string& id : manifest.accepted_instruct) known.insert(id);
  for (const auto& [id, reason] : manifest.rejected) known.insert(id);

  // Plan. Per-stage streams keyed off the run seed, so one stage's target
  // can grow without disturbing the other stage's draws.
  std::vector<StagePlanEntry> plan;
  plan.reserve(target_pretrain + target_instruct);
  if (target_pretrain > 0) {
    RngStream rng(RngStream::derive_seed(config.seed, "plan/pretrain"));
    for (PlanEntry& p : plan_corpus(loaded.series, target_pretrain, rng, config.sampler)) {
      plan.push_back({Stage::pretrain, std::move(p)});
    }
  }
  if (target_instruct > 0) {
    RngStream rng(RngStream::derive_seed(config.seed, "plan/instruct"));
    for (PlanEntry& p : plan_corpus(loaded.series, target_instruct, rng, config.sampler)) {
      plan.push_back({Stage::instruct, std::move(p)});
    }
  }
  report("[plan] " + std::to_string(plan.size()) + " entries");

  RunSummary summary;
  summary.planned = plan.size();
  summary.manifest_path = manifest_path;

  std::vector<StagePlanEntry> todo;
  for (StagePlanEntry& e : plan) {
    if (known.contains(e.plan.record_id)) {
      ++summary.skipped;
    } else {
      todo.push_back(std::move(e));
    }
  }
  manifest.skipped = summary.skipped;

  const unsigned hw = std::thread::hardware_concurrency();
  const std::size_t render_workers = std::clamp<std::size_t>(hw == 0 ? 4 : hw, 1, 8);

  std::size_t done = 0;
  for (std::size_t chunk_start = 0; chunk_start < todo.size(); chunk_start += kChunkSize) {
    const std::size_t chunk_len = std::min(kChunkSize, todo.size() - chunk_start);
    std::vector<PreparedEntry> chunk(chunk_len);
    for (std::size_t i = 0; i < chunk_len; ++i) chunk[i].entry = todo[chunk_start + i];

    // Render in parallel; every worker touches only its own slot.
    {
      std::atomic<std::size_t> next{0};
      std::vector<std::string> render_errors(chunk_len);
      auto worker = [&]() {
        while (true) {
          const std::size_t i = next.fetch_add(1);
          if (i >= chunk_len) break;
          PreparedEntry& pe = chunk[i];
          const Window& w = pe.entry.plan.window;
          const auto it = by_id.find(w.symbol_id);
          if (it == by_id.end()) {
            render_errors[i] = "window references unknown series " + w.symbol_id;
            continue;
          }
          const auto bars = window_bars(*it->second, w);
          pe.prompt_bars = bars.first(w.prompt_len);
          pe.predict_bars = bars.subspan(w.prompt_len);
          try {
            pe.rendered = render(w, pe.prompt_bars, pe.entry.plan.spec);
          } catch (const Error& e) {
            render_errors[i] = e.what();
          }
        }
      };
      std::vector<std::thread> workers;
      for (std::size_t t = 0; t < std::min(render_workers, chunk_len); ++t)
        workers.emplace_back(worker);
      for (std::thread& t : workers) t.join();
      for (std::size_t i = 0; i < chunk_len; ++i) {
        if (!render_errors[i].empty())
          throw RenderBackendFailure("render failed for " + chunk[i].entry.plan.record_id + ": " +
                                     render_errors[i]);
      }
    }
    for (PreparedEntry& pe : chunk) {
      write_bytes(config.out_dir / "images" / (pe.entry.plan.record_id + ".png"),
                  pe.rendered.png_bytes);
    }

    // Annotate.
    std::vector<AnnotationRequest> requests;
    requests.reserve(chunk_len);
    for (PreparedEntry& pe : chunk) {
      if (pe.entry.stage == Stage::pretrain) {
        pe.request = build_pretrain_request(templates, pe.entry.plan.window, pe.prompt_bars,
                                            pe.entry.plan.record_id);
      } else {
        pe.request = build_instruct_request(templates, pe.entry.plan.window, pe.prompt_bars,
                                            pe.predict_bars, pe.entry.plan.record_id);
      }
      requests.push_back(pe.request);
    }
    const auto batch =
        annotate_batch(requests, *backend, config.retry, config.max_in_flight, {});

    // Parse, filter, assemble.
    for (std::size_t i = 0; i < chunk_len; ++i) {
      const PreparedEntry& pe = chunk[i];
      const std::string& id = pe.entry.plan.record_id;
      auto reject = [&](const std::string& reason, const std::string& raw_text) {
        quarantine(config.out_dir, id, reason, raw_text);
        manifest.rejected[id] = reason;
        fs::remove(config.out_dir / "images" / (id + ".png"), ec);
        ++summary.rejected;
      };

      if (!batch[i].ok) {
        reject("BackendError: " + batch[i].error, "");
        continue;
      }
      const std::string& raw = batch[i].response.raw_text;
      try {
        RecordMeta meta;
        const auto bars = window_bars(*by_id.at(pe.entry.plan.window.symbol_id),
                                      pe.entry.plan.window);
        meta.date_start = bars.front().date;
        meta.date_end = bars.back().date;
        DatasetRecord record;
        if (pe.entry.stage == Stage::pretrain) {
          const std::string answer = parse_pretrain_answer(raw, config.content);
          const std::string& instruction =
              templates
                  .pretrain_instructions[instruction_index(id, templates.pretrain_instructions.size())];
          record = assemble_pretrain_record(pe.entry.plan, pe.rendered, instruction, answer,
                                            batch[i].response.record_id, meta);
          manifest.accepted_pretrain.push_back(id);
        } else {
          const auto turns = parse_instruct_dialog(raw, config.content);
          meta.trend = trend_label(pe.predict_bars, config.trend_epsilon_ppm);
          record = assemble_instruct_record(pe.entry.plan, pe.rendered, turns,
                                            batch[i].response.record_id, meta);
          manifest.accepted_instruct.push_back(id);
        }
        records.push_back(std::move(record));
        ++summary.accepted;
      } catch (const Error& e) {
        reject(classify_reject(e), raw);
      }
    }

    write_corpus(records, config.out_dir, manifest);
    done += chunk_len;
    report("[generate] " + std::to_string(done) + "/" + std::to_string(todo.size()) +
           " processed, " + std::to_string(summary.accepted) + " accepted, " +
           std::to_string(summary.rejected) + " rejected");
  }

  write_corpus(records, config.out_dir, manifest);
  if (!records.empty()) {
    write_text_file(config.out_dir / "stats.json", stats_to_json(compute_stats(records)));
  }
  report("[done] accepted " + std::to_string(summary.accepted) + ", rejected " +
         std::to_string(summary.rejected) + ", skipped " + std::to_string(summary.skipped));
  return summary;
}

// --- validation -----------------------------------------------------------

ValidationReport validate_corpus(const fs::path& out_dir) {
  const fs::path manifest_path = out_dir / "manifest.json";
  if (!fs::exists(manifest_path)) {
    throw ManifestMissing("no manifest.json under " + out_dir.string());
  }
  const Manifest manifest = manifest_from_json(read_text_file(manifest_path));
  const std::vector<DatasetRecord> records = load_corpus(out_dir);

  ValidationReport report;
  report.records_checked = records.size();
  auto flag = [&](const std::string& id, const std::string& kind, const std::string& detail) {
    report.violations.push_back({id, kind, detail});
  };

  std::unordered_set<std::string> seen_ids;
  std::vector<std::string> pretrain_ids, instruct_ids;
  for (const DatasetRecord& record : records) {
    for (const std::string& v : check_record(record)) flag(record.id, "structure", v);
    if (!seen_ids.insert(record.id).second) flag(record.id, "duplicate-id", "id appears twice");
    (record.stage == Stage::pretrain ? pretrain_ids : instruct_ids).push_back(record.id);

    // Image integrity: structurally valid PNG, declared dimensions, pinned digest.
    const fs::path image_path = out_dir / record.image;
    if (!fs::exists(image_path)) {
      flag(record.id, "image-missing", record.image);
    } else {
      const auto bytes = read_bytes(image_path);
      ++report.images_checked;
      const auto info = probe_png(bytes);
      if (!info) {
        flag(record.id, "image-integrity", "file is not a structurally sound PNG");
      } else if (info->width != record.meta.spec.width_px ||
                 info->height != record.meta.spec.height_px) {
        flag(record.id, "image-integrity",
             "dimensions " + std::to_string(info->width) + "x" + std::to_string(info->height) +
                 " do not match the spec");
      }
      if (sha256_hex(bytes) != record.meta.image_sha256) {
        flag(record.id, "image-digest", "image bytes do not match the recorded digest");
      }
    }

    // Content re-scan with the default rules.
    const ContentRules rules;
    try {
      for (const std::string& q : record_questions(record)) {
        validate_content(q, record.stage, rules);
      }
      for (const std::string& a : record_answers(record)) {
        validate_content(a, record.stage, rules);
      }
    } catch (const ContentViolation& e) {
      flag(record.id, "content", e.what());
    }
    if (record.stage == Stage::instruct) {
      const std::size_t turns = record.conversations.size() / 2;
      if (turns < rules.min_turns || turns > rules.max_turns) {
        flag(record.id, "turn-band",
             std::to_string(turns) + " turns, outside [" + std::to_string(rules.min_turns) + ", " +
                 std::to_string(rules.max_turns) + "]");
      }
      if (record.meta.trend) {
        if ((record.meta.trend->direction == Direction::up && record.meta.trend->magnitude <= 0) ||
            (record.meta.trend->direction == Direction::down && record.meta.trend->magnitude >= 0)) {
          flag(record.id, "trend-consistency",
               "direction contradicts the sign of the stored magnitude");
        }
      }
    }
  }

  // Manifest consistency.
  if (manifest.accepted_pretrain != pretrain_ids) {
    flag("", "manifest-mismatch", "accepted_pretrain does not match pretrain.json record order");
  }
  if (manifest.accepted_instruct != instruct_ids) {
    flag("", "manifest-mismatch", "accepted_instruct does not match instruct.json record order");
  }
  for (const auto& [id, reason] : manifest.rejected) {
    if (seen_ids.contains(id)) {
      flag(id, "manifest-mismatch", "record is both accepted and rejected");
    }
    if (!fs::exists(out_dir / "rejects" / (id + ".txt"))) {
      flag(id, "quarantine-missing", "rejected record has no quarantine file");
    }
  }
  // Cumulative identity: every planned entry ends up accepted or rejected,
  // however many resumed runs it took to get there.
  const std::size_t accounted = manifest.accepted_pretrain.size() +
                                manifest.accepted_instruct.size() + manifest.rejected.size();
  if (accounted != manifest.planned_pretrain + manifest.planned_instruct) {
    flag("", "accounting",
         "accepted + rejected = " + std::to_string(accounted) +
             ", planned = " + std::to_string(manifest.planned_pretrain + manifest.planned_instruct));
  }

  // Statistics reproducibility against the stats the run wrote.
  const fs::path stats_path = out_dir / "stats.json";
  if (fs::exists(stats_path) && !records.empty()) {
    const std::string recomputed = stats_to_json(compute_stats(records));
    if (recomputed != read_text_file(stats_path)) {
      flag("", "stats-drift", "recomputed statistics differ from stats.json");
    }
  }
  return report;
}

std::string validation_report_to_json(const ValidationReport& report) {
  json violations = json::array();
  for (const Violation& v : report.violations) {
    violations.push_back({{"record_id", v.record_id}, {"kind", v.kind}, {"detail", v.detail}});
  }
  const json j{{"records_checked", report.records_checked},
               {"images_checked", report.images_checked},
               {"ok", report.ok()},
               {"violations", violations}};
  return j.dump(2) + "\n";
}

}  // namespace finchart
