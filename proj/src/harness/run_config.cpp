#include "tracekit/harness/harness.hpp"

#include "tracekit/core/text.hpp"

namespace tracekit::harness {

using nlohmann::json;
namespace fs = std::filesystem;

std::string_view to_string(RunMode m) {
  switch (m) {
    case RunMode::OneStage: return "one_stage";
    case RunMode::TwoStage: return "two_stage";
    case RunMode::TextOnly: return "text_only";
  }
  return "one_stage";
}

std::optional<RunMode> parse_run_mode(std::string_view s) {
  const std::string v = text::to_lower(text::trim(s));
  if (v == "one_stage" || v == "one-stage") return RunMode::OneStage;
  if (v == "two_stage" || v == "two-stage") return RunMode::TwoStage;
  if (v == "text_only" || v == "text-only") return RunMode::TextOnly;
  return std::nullopt;
}

namespace {

[[noreturn]] void config_error(const std::string& detail) { throw HarnessError(HarnessErrorKind::Config, detail); }

fs::path resolve(const fs::path& base, const std::string& p) {
  if (p.empty()) return {};
  const fs::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

ParserSpec parser_from_json(const json& j) {
  ParserSpec p;
  if (j.is_string()) {
    if (j.get<std::string>() != kOracleParser) config_error("parser strings must be \"oracle\"");
    p.oracle = true;
    return p;
  }
  p.endpoint = endpoint_from_json(j);
  return p;
}

}  // namespace

void RunConfig::check() const {
  if (data.empty()) config_error("data path is required");
  if (output.empty()) config_error("output path is required");
  if (max_concurrency == 0) config_error("max_concurrency must be positive");
  if (frames == 0) config_error("frames must be positive");
  if (retry.max_attempts < 1) config_error("retry.max_attempts must be at least 1");
  if (retry.base_seconds < 0 || retry.factor < 1) config_error("retry needs base_seconds >= 0 and factor >= 1");
  if (descriptors.empty()) config_error("a descriptor endpoint is required");
  switch (mode) {
    case RunMode::OneStage:
    case RunMode::TwoStage:
      if (descriptors.size() != 1) config_error(std::string(to_string(mode)) + " takes exactly one endpoint");
      if (!parsers.empty()) config_error("parsers are only allowed in text_only mode");
      break;
    case RunMode::TextOnly:
      if (parsers.empty()) config_error("text_only needs at least one parser");
      for (const auto& d : descriptors) {
        if (!d.supports_media) config_error("descriptor " + d.name + " must support media");
      }
      break;
  }
  if (strategy.ablation != prompt::Ablation::Full && strategy.strategy != prompt::Strategy::Trace)
    config_error("ablations apply to the trace strategy only");
}

RunConfig run_config_from_json(const json& j, const fs::path& base_dir) {
  if (!j.is_object()) config_error("config must be a JSON object");
  RunConfig c;
  try {
    c.name = j.value("name", "");
    if (j.contains("benchmark")) {
      const auto b = parse_benchmark(j["benchmark"].get<std::string>());
      if (!b) config_error("unknown benchmark " + j["benchmark"].get<std::string>());
      c.benchmark = *b;
    }
    c.data = resolve(base_dir, j.at("data").get<std::string>());
    c.media_root = resolve(base_dir, j.value("media_root", ""));
    c.sources = resolve(base_dir, j.value("sources", ""));
    c.categories = resolve(base_dir, j.value("categories", ""));
    if (j.contains("strategy")) {
      const auto s = prompt::parse_strategy(j["strategy"].get<std::string>());
      if (!s) config_error("unknown strategy " + j["strategy"].get<std::string>());
      c.strategy.strategy = *s;
    }
    if (j.contains("ablation")) {
      const auto a = prompt::parse_ablation(j["ablation"].get<std::string>());
      if (!a) config_error("unknown ablation " + j["ablation"].get<std::string>());
      c.strategy.ablation = *a;
    }
    if (j.contains("mode")) {
      const auto m = parse_run_mode(j["mode"].get<std::string>());
      if (!m) config_error("unknown mode " + j["mode"].get<std::string>());
      c.mode = *m;
    }
    if (j.contains("endpoint")) c.descriptors.push_back(endpoint_from_json(j["endpoint"]));
    if (j.contains("descriptor")) c.descriptors.push_back(endpoint_from_json(j["descriptor"]));
    if (j.contains("descriptors")) {
      for (const auto& d : j["descriptors"]) c.descriptors.push_back(endpoint_from_json(d));
    }
    if (j.contains("parser")) c.parsers.push_back(parser_from_json(j["parser"]));
    if (j.contains("parsers")) {
      for (const auto& p : j["parsers"]) c.parsers.push_back(parser_from_json(p));
    }
    c.max_concurrency = j.value("max_concurrency", c.max_concurrency);
    if (j.contains("retry")) {
      const auto& r = j["retry"];
      c.retry.max_attempts = r.value("max_attempts", c.retry.max_attempts);
      c.retry.base_seconds = r.value("base_seconds", c.retry.base_seconds);
      c.retry.factor = r.value("factor", c.retry.factor);
    }
    c.cache_dir = resolve(base_dir, j.value("cache_dir", ""));
    c.output = resolve(base_dir, j.at("output").get<std::string>());
    c.seed = j.value("seed", c.seed);
    c.frames = j.value("frames", c.frames);
    c.ost_subset = j.value("ost_subset", false);
    if (j.contains("limit") && !j["limit"].is_null()) c.limit = j["limit"].get<std::size_t>();
  } catch (const json::exception& e) {
    config_error(e.what());
  }
  c.check();
  return c;
}

RunConfig load_run_config(const fs::path& path) {
  std::string body;
  try {
    body = text::read_file(path.string());
  } catch (const std::exception& e) {
    throw HarnessError(HarnessErrorKind::Io, e.what());
  }
  json j;
  try {
    j = json::parse(body);
  } catch (const json::parse_error& e) {
    config_error(path.string() + ": " + e.what());
  }
  return run_config_from_json(j, path.parent_path());
}

fs::path matrix_output_path(const fs::path& output, const std::string& descriptor, const std::string& parser) {
  const fs::path dir = output.parent_path();
  const std::string name = output.stem().string() + "__" + descriptor + "__" + parser + output.extension().string();
  return dir.empty() ? fs::path(name) : dir / name;
}

}  // namespace tracekit::harness
