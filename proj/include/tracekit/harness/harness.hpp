#pragma once

// Model access (chat-completions over HTTP), response cache, results persistence and the
// one-stage / two-stage / text-only runners.

#include "tracekit/bench/bench.hpp"
#include "tracekit/prompt/prompt_engine.hpp"
#include "tracekit/scoring/scoring.hpp"

#include "json.hpp"

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace tracekit::harness {

enum class HarnessErrorKind {
  AuthMissing,
  ExhaustedRetries,
  HttpError,
  BadResponse,
  EmptyOutput,
  Config,
  Io,
  CorruptResultsLine,
};

std::string_view to_string(HarnessErrorKind k);

class HarnessError : public std::runtime_error {
 public:
  HarnessError(HarnessErrorKind kind, const std::string& detail, std::string stage = {});
  HarnessErrorKind kind() const noexcept { return kind_; }
  const std::string& stage() const noexcept { return stage_; }

 private:
  HarnessErrorKind kind_;
  std::string stage_;
};

struct RetryPolicy {
  int max_attempts = 5;
  double base_seconds = 1.0;
  double factor = 2.0;
};

struct ModelEndpoint {
  std::string name;      // label used in result files and reports
  std::string base_url;  // e.g. http://127.0.0.1:8080/v1
  std::string model;
  std::string auth_env;  // environment variable holding the bearer token; empty for none
  double temperature = 0.0;
  std::optional<int> max_tokens;
  bool supports_media = true;
  double timeout_seconds = 120.0;

  // Part of every cache key: where the request goes and with which sampling parameters.
  std::string identity() const;
};

ModelEndpoint endpoint_from_json(const nlohmann::json& j);
nlohmann::json endpoint_to_json(const ModelEndpoint& e);

// Chat-completions request body; media files are inlined as base64 data URLs.
nlohmann::json request_body(const ModelEndpoint& e, const std::vector<prompt::Message>& messages);

// ---------------------------------------------------------------------------
// Cache

// Directory of <sha256>.json response bodies. Concurrent readers; writes are exclusive per key
// and published with an atomic rename.
class ResponseCache {
 public:
  explicit ResponseCache(std::filesystem::path dir);

  static std::string key_for(const ModelEndpoint& e, const std::string& body);

  std::optional<std::string> get(const std::string& key) const;
  void put(const std::string& key, const std::string& response_body);
  const std::filesystem::path& dir() const { return dir_; }

  // Per-key mutex. The client holds it across lookup and fetch.
  std::mutex& flight_lock(const std::string& key);

 private:

  std::filesystem::path dir_;
  std::mutex table_mu_;
  std::map<std::string, std::unique_ptr<std::mutex>> key_mu_;
};

// ---------------------------------------------------------------------------
// Client

struct Completion {
  std::string raw_text;
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;
  bool approximate_tokens = false;
  double latency_seconds = 0.0;
  bool cache_hit = false;
  int attempts = 0;
  std::vector<std::string> attempt_log;
};

// Extracts text and usage from a chat-completions response body.
Completion parse_response_body(const std::string& body, std::size_t request_chars);

class ChatClient {
 public:
  using Sleeper = std::function<void(double seconds)>;

  ChatClient(RetryPolicy retry, ResponseCache* cache, Sleeper sleeper = {});

  // Cache lookup, then POST {base_url}/chat/completions with retries on transport errors,
  // 429 and 5xx. Throws HarnessError.
  Completion complete(const ModelEndpoint& e, const std::vector<prompt::Message>& messages);

  std::size_t network_calls() const { return network_calls_.load(); }
  std::size_t cache_hits() const { return cache_hits_.load(); }

 private:
  RetryPolicy retry_;
  ResponseCache* cache_;
  Sleeper sleeper_;
  std::atomic<std::size_t> network_calls_{0};
  std::atomic<std::size_t> cache_hits_{0};
};

// ---------------------------------------------------------------------------
// Results

struct StageRecord {
  std::string stage;     // one_stage | two_stage_s1 | two_stage_s2 | text_only_descriptor | text_only_parser
  std::string endpoint;  // endpoint name, or "oracle"
  std::string raw_text;
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;
  bool approximate_tokens = false;
  double latency_seconds = 0.0;
  bool cache_hit = false;
  int attempts = 0;
};

struct ResponseRecord {
  // record snapshot
  std::string record_id;
  std::string benchmark;
  std::string scene_id;
  std::string source;
  std::string task;
  std::string answer_type;
  std::vector<std::string> options;
  std::string ground_truth;
  std::optional<int> turn_index;

  // run identity
  std::string mode;
  std::string strategy;
  std::string descriptor;
  std::string parser;
  std::uint64_t seed = 0;
  std::size_t frames = 0;

  // outputs
  std::string raw_text;  // final stage, verbatim
  std::optional<std::string> extracted_trace;
  std::optional<std::size_t> trace_errors;  // validator errors when the trace parsed
  std::optional<std::string> trace_problem; // parse failure message
  std::optional<scoring::ExtractedAnswer> extracted_answer;
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;
  bool approximate_tokens = false;
  double latency_seconds = 0.0;
  bool cache_hit = false;
  std::vector<StageRecord> stages;
  std::vector<std::string> warnings;
  std::optional<std::string> error;  // stage-labelled failure
};

nlohmann::json to_json(const ResponseRecord& r);
ResponseRecord response_from_json(const nlohmann::json& j);

// QARecord rebuilt from the snapshot fields, for scoring a results file on its own.
bench::QARecord snapshot_record(const ResponseRecord& r);
double score_response(const ResponseRecord& r, const scoring::ScoreOptions& opts = {});

struct ResumeState {
  std::vector<ResponseRecord> records;  // deduplicated, later lines win
  std::vector<std::string> warnings;
  std::size_t corrupt_lines = 0;
};

// Reads an existing results file. Corrupt lines are moved to `<path>.corrupt` and the file is
// rewritten without them (and without superseded duplicates).
ResumeState load_results(const std::filesystem::path& path);

// Single serialized writer. Lines are appended in submission-index order with one write
// call per line on an O_APPEND descriptor.
class ResultsWriter {
 public:
  explicit ResultsWriter(const std::filesystem::path& path);
  ~ResultsWriter();
  ResultsWriter(const ResultsWriter&) = delete;
  ResultsWriter& operator=(const ResultsWriter&) = delete;

  // `index` counts from 0 over the records of this run; out-of-order submissions are held
  // until every earlier index has been written. `skip` marks an index that produces no line.
  void submit(std::size_t index, const ResponseRecord& r);
  void skip(std::size_t index);
  std::size_t lines_written() const;

 private:
  void drain_locked();

  int fd_ = -1;
  mutable std::mutex mu_;
  std::size_t next_ = 0;
  std::size_t written_ = 0;
  std::map<std::size_t, std::optional<std::string>> pending_;
};

// ---------------------------------------------------------------------------
// Runs

enum class RunMode { OneStage, TwoStage, TextOnly };

std::string_view to_string(RunMode m);
std::optional<RunMode> parse_run_mode(std::string_view s);

inline constexpr std::string_view kOracleParser = "oracle";

struct ParserSpec {
  bool oracle = false;
  ModelEndpoint endpoint;  // unused when oracle
  std::string name() const { return oracle ? std::string(kOracleParser) : endpoint.name; }
};

struct RunConfig {
  std::string name;
  Benchmark benchmark = Benchmark::VSI;
  std::filesystem::path data;
  std::filesystem::path media_root;
  std::filesystem::path sources;     // optional prefix rules file
  std::filesystem::path categories;  // optional categories file (cognitive map)
  prompt::StrategySpec strategy{prompt::Strategy::Trace, prompt::Ablation::Full};
  RunMode mode = RunMode::OneStage;
  std::vector<ModelEndpoint> descriptors;  // one entry unless text_only
  std::vector<ParserSpec> parsers;         // text_only only
  std::size_t max_concurrency = 4;
  RetryPolicy retry;
  std::filesystem::path cache_dir;
  std::filesystem::path output;  // results file; text_only derives one file per matrix cell
  std::uint64_t seed = bench::kDefaultSeed;
  std::size_t frames = 16;
  bool ost_subset = false;              // sample the fixed-size OST scene subset
  std::optional<std::size_t> limit;     // stop after this many new records

  // Throws HarnessError(Config) on broken invariants.
  void check() const;
};

// Paths inside the config are resolved against the config file's directory.
RunConfig load_run_config(const std::filesystem::path& path);
RunConfig run_config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);

// `<stem>__<descriptor>__<parser><ext>` next to the configured output.
std::filesystem::path matrix_output_path(const std::filesystem::path& output, const std::string& descriptor,
                                         const std::string& parser);

struct RunSummary {
  std::vector<std::filesystem::path> outputs;
  std::size_t records = 0;   // records considered (per output file, summed)
  std::size_t skipped = 0;   // already complete on resume
  std::size_t executed = 0;  // newly written lines
  std::size_t network_calls = 0;
  std::size_t cache_hits = 0;
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;
  std::vector<std::string> warnings;
};

// Per-record pipelines. They never throw for model-side failures; those become `error`.
// `history` holds earlier dialogue turns (user/assistant pairs) replayed before the question.
using History = std::vector<prompt::Message>;

ResponseRecord run_one_stage(ChatClient& client, const bench::QARecord& record, const prompt::StrategySpec& strategy,
                             const ModelEndpoint& endpoint, const std::vector<std::string>& categories = {},
                             const History& history = {});
ResponseRecord run_two_stage(ChatClient& client, const bench::QARecord& record, const ModelEndpoint& endpoint,
                             const prompt::StrategySpec& strategy = {prompt::Strategy::Trace, prompt::Ablation::Full},
                             const History& history = {});
ResponseRecord run_text_only(ChatClient& client, const bench::QARecord& record, const ModelEndpoint& descriptor,
                             const ParserSpec& parser,
                             const prompt::StrategySpec& strategy = {prompt::Strategy::Trace, prompt::Ablation::Full},
                             const History& history = {});

// Oracle stand-in for the parser role: parses the trace and answers with spatial_oracle.
// Returns the reply text ("Answer: `X`") or throws.
std::string oracle_reply(const bench::QARecord& record, std::string_view descriptor_output);

// Executes a config end-to-end (with resume).
RunSummary run(const RunConfig& config);

// ---------------------------------------------------------------------------
// Mock server for tests and offline replay

struct MockReply {
  std::string content;
  std::optional<std::pair<std::int64_t, std::int64_t>> usage;  // prompt, completion
};

class MockChatServer {
 public:
  using Responder = std::function<std::optional<MockReply>(const nlohmann::json& request)>;

  MockChatServer();
  ~MockChatServer();
  MockChatServer(const MockChatServer&) = delete;
  MockChatServer& operator=(const MockChatServer&) = delete;

  // Serve <sha256(request body)>.json files from `dir`.
  void set_fixture_dir(std::filesystem::path dir);
  // Build replies programmatically (used when no fixture file matches).
  void set_responder(Responder r);
  // Write every responder-built reply into `dir` under its request hash.
  void set_record_dir(std::filesystem::path dir);
  // Statuses returned (with an error body) before normal handling resumes, one per request.
  void push_status(int status);
  void set_delay_ms(int ms);

  // Binds 127.0.0.1 on a free port and serves in a background thread. Returns the port.
  int start();
  void stop();
  std::string base_url() const;

  std::size_t request_count() const;
  std::size_t max_in_flight() const;
  void reset_counters();

  static std::string wrap_reply(const MockReply& reply, const std::string& model);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace tracekit::harness
