#include "tracekit/bench/bench.hpp"

#include "tracekit/core/text.hpp"

#include <cmath>

namespace tracekit::bench {

std::string_view to_string(BenchErrorKind k) {
  switch (k) {
    case BenchErrorKind::SchemaError: return "SchemaError";
    case BenchErrorKind::MissingMedia: return "MissingMedia";
    case BenchErrorKind::TooFewScenes: return "TooFewScenes";
    case BenchErrorKind::Io: return "IoError";
  }
  return "BenchError";
}

namespace {

std::string describe(BenchErrorKind kind, std::optional<std::size_t> line, const std::string& detail) {
  std::string out(to_string(kind));
  if (line) out += " (line " + std::to_string(*line) + ")";
  return out + ": " + detail;
}

}  // namespace

BenchError::BenchError(BenchErrorKind kind, std::optional<std::size_t> line, const std::string& detail)
    : std::runtime_error(describe(kind, line, detail)), kind_(kind), line_(line) {}

std::optional<std::size_t> QARecord::gt_option() const {
  if (answer_type != AnswerType::MCA || ground_truth.size() != 1) return std::nullopt;
  const char c = ground_truth[0];
  if (c < 'A' || c > 'Z') return std::nullopt;
  const auto idx = static_cast<std::size_t>(c - 'A');
  if (idx >= options.size()) return std::nullopt;
  return idx;
}

std::optional<double> QARecord::gt_value() const {
  if (answer_type != AnswerType::NA) return std::nullopt;
  auto v = text::parse_double(ground_truth);
  if (!v || !std::isfinite(*v) || *v <= 0.0) return std::nullopt;
  return v;
}

void check_record(const QARecord& r) {
  auto fail = [&r](const std::string& msg) {
    throw BenchError(BenchErrorKind::SchemaError, std::nullopt, "record '" + r.id + "': " + msg);
  };
  if (r.id.empty()) fail("id is empty");
  if (r.scene_id.empty()) fail("scene_id is empty");
  if (text::trim(r.question).empty()) fail("question is empty");
  if (r.answer_type == AnswerType::MCA) {
    if (r.options.size() < 2) fail("multiple-choice record needs at least two options");
    if (r.options.size() > 26) fail("too many options");
    if (!r.gt_option()) fail("ground truth '" + r.ground_truth + "' is not one of the option letters");
  } else {
    if (!r.gt_value()) fail("ground truth '" + r.ground_truth + "' is not a positive number");
  }
  if (r.turn_index && *r.turn_index < 0) fail("turn_index is negative");
}

SourceRules SourceRules::parse(std::string_view text) {
  SourceRules rules;
  for (auto raw : text::split_lines(text)) {
    auto line = text::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) continue;
    const auto key = text::trim(line.substr(0, eq));
    const auto value = text::trim(line.substr(eq + 1));
    if (!key.empty() && !value.empty()) rules.add(std::string(key), std::string(value));
  }
  return rules;
}

SourceRules SourceRules::load(const std::string& path) { return parse(text::read_file(path)); }

SourceRules SourceRules::defaults() {
  SourceRules r;
  r.add("arkitscenes", "ARKitScenes");
  r.add("scannetpp", "ScanNetPP");
  r.add("scannet", "ScanNet");
  r.add("scene", "ScanNet");
  return r;
}

void SourceRules::add(std::string prefix, std::string source) {
  rules_.emplace_back(std::move(prefix), std::move(source));
}

std::string SourceRules::classify(std::string_view scene_id) const {
  const std::pair<std::string, std::string>* best = nullptr;
  for (const auto& rule : rules_) {
    if (!text::starts_with_icase(scene_id, rule.first)) continue;
    if (!best || rule.first.size() > best->first.size()) best = &rule;
  }
  return best ? best->second : std::string(kUnknownSource);
}

std::string stratify_source(const QARecord& r, const SourceRules& rules) {
  if (r.benchmark == Benchmark::OST) return std::string(kOstSource);
  return rules.classify(r.scene_id);
}

}  // namespace tracekit::bench
