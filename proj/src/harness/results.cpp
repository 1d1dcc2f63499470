#include "tracekit/harness/harness.hpp"

#include "tracekit/core/text.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <unordered_map>

namespace tracekit::harness {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::optional<scoring::AnswerKind> parse_answer_kind(std::string_view s) {
  for (auto k : {scoring::AnswerKind::OptionLetter, scoring::AnswerKind::FreeText, scoring::AnswerKind::Numeric}) {
    if (scoring::to_string(k) == s) return k;
  }
  return std::nullopt;
}

json answer_to_json(const scoring::ExtractedAnswer& a) {
  json j = {{"raw", a.raw}, {"kind", scoring::to_string(a.kind)}, {"path", scoring::to_string(a.path)}};
  j["numeric_value"] = a.numeric_value ? json(*a.numeric_value) : json(nullptr);
  j["matched_option"] = a.matched_option ? json(*a.matched_option) : json(nullptr);
  return j;
}

scoring::ExtractedAnswer answer_from_json(const json& j) {
  scoring::ExtractedAnswer a;
  a.raw = j.at("raw").get<std::string>();
  const auto kind = parse_answer_kind(j.at("kind").get<std::string>());
  const auto path = scoring::parse_extraction_path(j.at("path").get<std::string>());
  if (!kind || !path) throw std::invalid_argument("bad extracted_answer kind or path");
  a.kind = *kind;
  a.path = *path;
  if (j.contains("numeric_value") && !j["numeric_value"].is_null()) a.numeric_value = j["numeric_value"].get<double>();
  if (j.contains("matched_option") && !j["matched_option"].is_null())
    a.matched_option = j["matched_option"].get<std::string>();
  return a;
}

json stage_to_json(const StageRecord& s) {
  return {{"stage", s.stage},
          {"endpoint", s.endpoint},
          {"raw_text", s.raw_text},
          {"prompt_tokens", s.prompt_tokens},
          {"completion_tokens", s.completion_tokens},
          {"approximate_tokens", s.approximate_tokens},
          {"latency_seconds", s.latency_seconds},
          {"cache_hit", s.cache_hit},
          {"attempts", s.attempts}};
}

StageRecord stage_from_json(const json& j) {
  StageRecord s;
  s.stage = j.at("stage").get<std::string>();
  s.endpoint = j.value("endpoint", "");
  s.raw_text = j.value("raw_text", "");
  s.prompt_tokens = j.value("prompt_tokens", std::int64_t{0});
  s.completion_tokens = j.value("completion_tokens", std::int64_t{0});
  s.approximate_tokens = j.value("approximate_tokens", false);
  s.latency_seconds = j.value("latency_seconds", 0.0);
  s.cache_hit = j.value("cache_hit", false);
  s.attempts = j.value("attempts", 0);
  return s;
}

template <class T>
json opt(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

template <class T>
std::optional<T> opt_get(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<T>();
}

void write_all(int fd, std::string_view data) {
  while (!data.empty()) {
    const ssize_t n = ::write(fd, data.data(), data.size());
    if (n < 0) {
      if (errno == EINTR) continue;
      throw HarnessError(HarnessErrorKind::Io, std::string("write failed: ") + std::strerror(errno));
    }
    data.remove_prefix(static_cast<std::size_t>(n));
  }
}

}  // namespace

json to_json(const ResponseRecord& r) {
  json stages = json::array();
  for (const auto& s : r.stages) stages.push_back(stage_to_json(s));
  return {{"record_id", r.record_id},
          {"benchmark", r.benchmark},
          {"scene_id", r.scene_id},
          {"source", r.source},
          {"task", r.task},
          {"answer_type", r.answer_type},
          {"options", r.options},
          {"ground_truth", r.ground_truth},
          {"turn_index", opt(r.turn_index)},
          {"mode", r.mode},
          {"strategy", r.strategy},
          {"descriptor", r.descriptor},
          {"parser", r.parser},
          {"seed", r.seed},
          {"frames", r.frames},
          {"raw_text", r.raw_text},
          {"extracted_trace", opt(r.extracted_trace)},
          {"trace_errors", opt(r.trace_errors)},
          {"trace_problem", opt(r.trace_problem)},
          {"extracted_answer", r.extracted_answer ? answer_to_json(*r.extracted_answer) : json(nullptr)},
          {"prompt_tokens", r.prompt_tokens},
          {"completion_tokens", r.completion_tokens},
          {"approximate_tokens", r.approximate_tokens},
          {"latency_seconds", r.latency_seconds},
          {"cache_hit", r.cache_hit},
          {"stages", std::move(stages)},
          {"warnings", r.warnings},
          {"error", opt(r.error)}};
}

ResponseRecord response_from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("result line is not an object");
  ResponseRecord r;
  r.record_id = j.at("record_id").get<std::string>();
  r.benchmark = j.value("benchmark", "VSI");
  r.scene_id = j.value("scene_id", "");
  r.source = j.value("source", std::string(bench::kUnknownSource));
  r.task = j.at("task").get<std::string>();
  r.answer_type = j.at("answer_type").get<std::string>();
  r.options = j.value("options", std::vector<std::string>{});
  r.ground_truth = j.at("ground_truth").get<std::string>();
  r.turn_index = opt_get<int>(j, "turn_index");
  r.mode = j.value("mode", "");
  r.strategy = j.value("strategy", "");
  r.descriptor = j.value("descriptor", "");
  r.parser = j.value("parser", "");
  r.seed = j.value("seed", std::uint64_t{0});
  r.frames = j.value("frames", std::size_t{0});
  r.raw_text = j.value("raw_text", "");
  r.extracted_trace = opt_get<std::string>(j, "extracted_trace");
  r.trace_errors = opt_get<std::size_t>(j, "trace_errors");
  r.trace_problem = opt_get<std::string>(j, "trace_problem");
  if (j.contains("extracted_answer") && !j["extracted_answer"].is_null())
    r.extracted_answer = answer_from_json(j["extracted_answer"]);
  r.prompt_tokens = j.value("prompt_tokens", std::int64_t{0});
  r.completion_tokens = j.value("completion_tokens", std::int64_t{0});
  r.approximate_tokens = j.value("approximate_tokens", false);
  r.latency_seconds = j.value("latency_seconds", 0.0);
  r.cache_hit = j.value("cache_hit", false);
  if (j.contains("stages")) {
    for (const auto& s : j.at("stages")) r.stages.push_back(stage_from_json(s));
  }
  r.warnings = j.value("warnings", std::vector<std::string>{});
  r.error = opt_get<std::string>(j, "error");
  return r;
}

bench::QARecord snapshot_record(const ResponseRecord& r) {
  bench::QARecord q;
  q.id = r.record_id;
  q.benchmark = parse_benchmark(r.benchmark).value_or(Benchmark::VSI);
  q.scene_id = r.scene_id;
  q.source = r.source;
  q.task = Task::from_string(r.task);
  q.answer_type = parse_answer_type(r.answer_type).value_or(AnswerType::NA);
  q.options = r.options;
  q.ground_truth = r.ground_truth;
  q.turn_index = r.turn_index;
  return q;
}

double score_response(const ResponseRecord& r, const scoring::ScoreOptions& opts) {
  if (r.error || !r.extracted_answer) return scoring::score_missing();
  return scoring::score_record(snapshot_record(r), *r.extracted_answer, opts);
}

ResumeState load_results(const fs::path& path) {
  ResumeState st;
  std::error_code ec;
  if (!fs::exists(path, ec)) return st;
  std::ifstream in(path, std::ios::binary);
  if (!in) throw HarnessError(HarnessErrorKind::Io, "cannot read " + path.string());

  std::vector<std::string> keep_lines;
  std::vector<std::string> corrupt;
  std::unordered_map<std::string, std::size_t> slot;
  std::size_t raw_lines = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::trim(line).empty()) continue;
    ++raw_lines;
    try {
      ResponseRecord r = response_from_json(json::parse(line));
      const auto it = slot.find(r.record_id);
      if (it != slot.end()) {
        st.records[it->second] = std::move(r);
        keep_lines[it->second] = line;
      } else {
        slot.emplace(r.record_id, st.records.size());
        st.records.push_back(std::move(r));
        keep_lines.push_back(line);
      }
    } catch (const std::exception& e) {
      corrupt.push_back(line);
      st.warnings.push_back(std::string(to_string(HarnessErrorKind::CorruptResultsLine)) + ": " + path.string() +
                            ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  st.corrupt_lines = corrupt.size();

  if (!corrupt.empty()) {
    std::ofstream side(path.string() + ".corrupt", std::ios::binary | std::ios::app);
    for (const auto& c : corrupt) side << c << '\n';
  }
  if (!corrupt.empty() || keep_lines.size() != raw_lines) {
    std::string body;
    for (const auto& l : keep_lines) body += l + "\n";
    text::write_file_atomic(path.string(), body);
  }
  return st;
}

ResultsWriter::ResultsWriter(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fd_ = ::open(path.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (fd_ < 0) throw HarnessError(HarnessErrorKind::Io, "cannot open " + path.string() + ": " + std::strerror(errno));
}

ResultsWriter::~ResultsWriter() {
  if (fd_ >= 0) ::close(fd_);
}

void ResultsWriter::submit(std::size_t index, const ResponseRecord& r) {
  std::string line = to_json(r).dump() + "\n";
  std::lock_guard<std::mutex> g(mu_);
  pending_[index] = std::move(line);
  drain_locked();
}

void ResultsWriter::skip(std::size_t index) {
  std::lock_guard<std::mutex> g(mu_);
  pending_[index] = std::nullopt;
  drain_locked();
}

std::size_t ResultsWriter::lines_written() const {
  std::lock_guard<std::mutex> g(mu_);
  return written_;
}

void ResultsWriter::drain_locked() {
  for (auto it = pending_.find(next_); it != pending_.end(); it = pending_.find(next_)) {
    if (it->second) {
      write_all(fd_, *it->second);
      ++written_;
    }
    pending_.erase(it);
    ++next_;
  }
}

}  // namespace tracekit::harness
