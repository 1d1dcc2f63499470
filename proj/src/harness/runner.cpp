#include "tracekit/harness/harness.hpp"

#include "tracekit/core/text.hpp"
#include "tracekit/oracle/spatial_oracle.hpp"
#include "tracekit/schema/trace.hpp"

#include <exception>
#include <limits>
#include <thread>
#include <unordered_map>
#include <unordered_set>

namespace tracekit::harness {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kStageOne = "one_stage";
constexpr std::string_view kStageS1 = "two_stage_s1";
constexpr std::string_view kStageS2 = "two_stage_s2";
constexpr std::string_view kStageDescriptor = "text_only_descriptor";
constexpr std::string_view kStageParser = "text_only_parser";

bool fatal(HarnessErrorKind k) { return k == HarnessErrorKind::AuthMissing || k == HarnessErrorKind::Config; }

std::string strategy_label(const prompt::StrategySpec& s) {
  std::string out(prompt::to_string(s.strategy));
  if (s.ablation != prompt::Ablation::Full) out += ":" + std::string(prompt::to_string(s.ablation));
  return out;
}

std::string stage_error(std::string_view stage, std::string_view kind, const std::string& detail) {
  return "[" + std::string(stage) + "] " + std::string(kind) + ": " + detail;
}

ResponseRecord base_record(const bench::QARecord& q, RunMode mode, const prompt::StrategySpec& s) {
  ResponseRecord r;
  r.record_id = q.id;
  r.benchmark = std::string(to_string(q.benchmark));
  r.scene_id = q.scene_id;
  r.source = q.source;
  r.task = q.task.name;
  r.answer_type = std::string(to_string(q.answer_type));
  r.options = q.options;
  r.ground_truth = q.ground_truth;
  r.turn_index = q.turn_index;
  r.mode = std::string(to_string(mode));
  r.strategy = strategy_label(s);
  return r;
}

prompt::PromptRequest request_for(const bench::QARecord& q, const prompt::StrategySpec& s,
                                  const std::vector<std::string>& categories) {
  prompt::PromptRequest req;
  req.strategy = s;
  req.answer_type = q.answer_type;
  req.question = q.question;
  req.options = q.options;
  req.categories = categories;
  return req;
}

std::vector<prompt::Message> with_history(std::vector<prompt::Message> msgs, const History& history) {
  if (history.empty() || msgs.empty()) return msgs;
  msgs.insert(msgs.begin() + 1, history.begin(), history.end());
  return msgs;
}

void add_stage(ResponseRecord& r, std::string_view stage, const std::string& endpoint, const Completion& c) {
  StageRecord s;
  s.stage = std::string(stage);
  s.endpoint = endpoint;
  s.raw_text = c.raw_text;
  s.prompt_tokens = c.prompt_tokens;
  s.completion_tokens = c.completion_tokens;
  s.approximate_tokens = c.approximate_tokens;
  s.latency_seconds = c.latency_seconds;
  s.cache_hit = c.cache_hit;
  s.attempts = c.attempts;
  r.prompt_tokens += c.prompt_tokens;
  r.completion_tokens += c.completion_tokens;
  r.approximate_tokens = r.approximate_tokens || c.approximate_tokens;
  r.latency_seconds += c.latency_seconds;
  r.stages.push_back(std::move(s));
  r.cache_hit = true;
  for (const auto& st : r.stages) r.cache_hit = r.cache_hit && st.cache_hit;
}

// Runs one call; model-side failures are written into `r.error` and reported as false.
bool call(ChatClient& client, ResponseRecord& r, std::string_view stage, const ModelEndpoint& e,
          const std::vector<prompt::Message>& msgs, Completion& out) {
  try {
    out = client.complete(e, msgs);
  } catch (const HarnessError& ex) {
    if (fatal(ex.kind())) {
      if (!ex.stage().empty()) throw;
      std::string detail = ex.what();
      const std::string prefix = std::string(to_string(ex.kind())) + ": ";
      if (detail.rfind(prefix, 0) == 0) detail.erase(0, prefix.size());
      throw HarnessError(ex.kind(), detail, std::string(stage));
    }
    r.error = "[" + std::string(stage) + "] " + ex.what();
    return false;
  }
  add_stage(r, stage, e.name, out);
  return true;
}

struct TraceCheck {
  std::optional<std::string> block;
  bool parsed = false;
};

// Locates and checks the representation inside a reply, filling the trace fields of `r`.
TraceCheck inspect_trace(ResponseRecord& r, std::string_view reply) {
  TraceCheck t;
  t.block = schema::extract_trace_block(reply);
  r.extracted_trace = t.block;
  if (!t.block) {
    r.trace_problem = "no representation block found";
    return t;
  }
  try {
    const auto parsed = schema::parse_trace(*t.block);
    r.trace_errors = schema::count_errors(schema::validate_trace(parsed.document));
    r.trace_problem.reset();
    t.parsed = true;
  } catch (const schema::ParseError& e) {
    r.trace_problem = e.what();
  }
  return t;
}

// Degraded-mode hand-off: the parsed block when it parses, else the raw reply.
std::string context_for(ResponseRecord& r, std::string_view stage, const std::string& reply) {
  const TraceCheck t = inspect_trace(r, reply);
  if (t.parsed) return *t.block;
  r.warnings.push_back("[" + std::string(stage) + "] representation did not parse (" +
                       r.trace_problem.value_or("") + "); passing raw text as context");
  return reply;
}

void finish_answer(ResponseRecord& r, std::string_view stage, const std::string& reply) {
  r.raw_text = reply;
  try {
    r.extracted_answer = scoring::extract_answer(reply);
  } catch (const scoring::ScoringError& e) {
    r.error = "[" + std::string(stage) + "] " + e.what();
  }
}

bool build(ResponseRecord& r, std::string_view stage, const prompt::PromptRequest& req, prompt::Mode mode,
           std::span<const MediaRef> media, std::optional<std::string_view> context, prompt::PromptBundle& out) {
  try {
    out = prompt::build_bundle(req, mode, media, context);
    return true;
  } catch (const prompt::PromptError& e) {
    r.error = "[" + std::string(stage) + "] " + e.what();
    return false;
  }
}

}  // namespace

ResponseRecord run_one_stage(ChatClient& client, const bench::QARecord& record, const prompt::StrategySpec& strategy,
                             const ModelEndpoint& endpoint, const std::vector<std::string>& categories,
                             const History& history) {
  ResponseRecord r = base_record(record, RunMode::OneStage, strategy);
  r.descriptor = endpoint.name;
  prompt::PromptBundle bundle;
  if (!build(r, kStageOne, request_for(record, strategy, categories), prompt::Mode::OneStage, record.media,
             std::nullopt, bundle))
    return r;
  Completion c;
  if (!call(client, r, kStageOne, endpoint, with_history(prompt::build_messages(bundle), history), c)) return r;
  if (strategy.strategy == prompt::Strategy::Trace) inspect_trace(r, c.raw_text);
  finish_answer(r, kStageOne, c.raw_text);
  return r;
}

ResponseRecord run_two_stage(ChatClient& client, const bench::QARecord& record, const ModelEndpoint& endpoint,
                             const prompt::StrategySpec& strategy, const History& history) {
  ResponseRecord r = base_record(record, RunMode::TwoStage, strategy);
  r.descriptor = endpoint.name;
  const auto req = request_for(record, strategy, {});
  prompt::PromptBundle s1;
  if (!build(r, kStageS1, req, prompt::Mode::TwoStageS1, record.media, std::nullopt, s1)) return r;
  Completion c1;
  if (!call(client, r, kStageS1, endpoint, prompt::build_messages(s1), c1)) return r;
  if (text::trim(c1.raw_text).empty()) {
    r.error = stage_error(kStageS1, "EmptyOutput", "stage-one output is empty");
    return r;
  }
  const std::string context = context_for(r, kStageS1, c1.raw_text);

  prompt::PromptBundle s2;
  if (!build(r, kStageS2, req, prompt::Mode::TwoStageS2, record.media, context, s2)) return r;
  Completion c2;
  if (!call(client, r, kStageS2, endpoint, with_history(prompt::build_messages(s2), history), c2)) return r;
  finish_answer(r, kStageS2, c2.raw_text);
  return r;
}

std::string oracle_reply(const bench::QARecord& record, std::string_view descriptor_output) {
  const auto block = schema::extract_trace_block(descriptor_output);
  const auto parsed = schema::parse_trace(block ? std::string_view(*block) : descriptor_output);
  const auto query = oracle::query_from_question(record.task.kind, record.question, record.options);
  if (!query) throw std::invalid_argument("question phrasing not recognised for task " + record.task.name);
  const auto ans = oracle::answer(parsed.document, *query);
  return ans.trace + "\nAnswer: `" + ans.answer_text() + "`";
}

ResponseRecord run_text_only(ChatClient& client, const bench::QARecord& record, const ModelEndpoint& descriptor,
                             const ParserSpec& parser, const prompt::StrategySpec& strategy, const History& history) {
  ResponseRecord r = base_record(record, RunMode::TextOnly, strategy);
  r.descriptor = descriptor.name;
  r.parser = parser.name();
  const auto req = request_for(record, strategy, {});
  prompt::PromptBundle s1;
  if (!build(r, kStageDescriptor, req, prompt::Mode::TwoStageS1, record.media, std::nullopt, s1)) return r;
  Completion c1;
  if (!call(client, r, kStageDescriptor, descriptor, prompt::build_messages(s1), c1)) return r;
  if (text::trim(c1.raw_text).empty()) {
    r.error = stage_error(kStageDescriptor, "EmptyOutput", "descriptor output is empty");
    return r;
  }

  if (parser.oracle) {
    inspect_trace(r, c1.raw_text);
    std::string reply;
    try {
      reply = oracle_reply(record, c1.raw_text);
    } catch (const schema::ParseError& e) {
      r.error = stage_error(kStageParser, "OracleParser", e.what());
    } catch (const oracle::OracleError& e) {
      r.error = stage_error(kStageParser, "OracleParser", e.what());
    } catch (const std::invalid_argument& e) {
      r.error = stage_error(kStageParser, "OracleParser", e.what());
    }
    if (r.error) return r;
    add_stage(r, kStageParser, std::string(kOracleParser), Completion{reply, 0, 0, false, 0.0, true, 0, {}});
    finish_answer(r, kStageParser, reply);
    return r;
  }

  const std::string context = context_for(r, kStageDescriptor, c1.raw_text);
  prompt::PromptBundle s2;
  if (!build(r, kStageParser, req, prompt::Mode::TextOnlyParser, {}, context, s2)) return r;
  Completion c2;
  if (!call(client, r, kStageParser, parser.endpoint, with_history(prompt::build_messages(s2), history), c2))
    return r;
  finish_answer(r, kStageParser, c2.raw_text);
  return r;
}

// ---------------------------------------------------------------------------
// Whole runs

namespace {

struct WorkUnit {
  std::vector<std::size_t> items;  // indices into the flat record list, in dialogue order
};

struct OutputCell {
  const ModelEndpoint* descriptor = nullptr;
  const ParserSpec* parser = nullptr;
  fs::path output;
};

// User/assistant pair replayed for later turns of the same dialogue.
void append_history(History& h, RunMode mode, const prompt::StrategySpec& s, const bench::QARecord& q,
                    const std::string& reply) {
  const prompt::Strategy shown = mode == RunMode::OneStage ? s.strategy : prompt::Strategy::Direct;
  std::string user;
  try {
    user = prompt::build_user_prompt(shown, q.question, q.options);
  } catch (const prompt::PromptError&) {
    user = q.question;
  }
  h.push_back(prompt::Message{"user", {prompt::ContentPart{prompt::ContentPart::Kind::Text, user}}});
  h.push_back(prompt::Message{"assistant", {prompt::ContentPart{prompt::ContentPart::Kind::Text, reply}}});
}

}  // namespace

RunSummary run(const RunConfig& config) {
  config.check();
  RunSummary summary;

  bench::LoadOptions lo;
  lo.media_root = config.media_root;
  lo.frames = config.frames;
  if (!config.sources.empty()) lo.sources = bench::SourceRules::load(config.sources.string());

  std::vector<bench::QARecord> records;
  std::vector<WorkUnit> units;
  if (config.benchmark == Benchmark::VSI) {
    auto loaded = bench::load_vsi(config.data.string(), lo);
    summary.warnings.insert(summary.warnings.end(), loaded.warnings.begin(), loaded.warnings.end());
    records = std::move(loaded.records);
    for (std::size_t i = 0; i < records.size(); ++i) units.push_back(WorkUnit{{i}});
  } else {
    auto loaded = bench::load_ost(config.data.string(), lo);
    summary.warnings.insert(summary.warnings.end(), loaded.warnings.begin(), loaded.warnings.end());
    auto scenes = config.ost_subset ? bench::sample_ost_subset(loaded.scenes, config.seed) : loaded.scenes;
    for (auto& scene : scenes) {
      WorkUnit u;
      for (auto& t : scene.turns) {
        u.items.push_back(records.size());
        records.push_back(std::move(t.record));
      }
      units.push_back(std::move(u));
    }
  }

  std::vector<std::string> categories;
  if (!config.categories.empty()) {
    categories = bench::load_categories(config.categories.string(),
                                        config.benchmark == Benchmark::VSI ? "vsi" : "ost");
  }

  std::vector<OutputCell> cells;
  if (config.mode == RunMode::TextOnly) {
    for (const auto& d : config.descriptors) {
      for (const auto& p : config.parsers) {
        cells.push_back(OutputCell{&d, &p, matrix_output_path(config.output, d.name, p.name())});
      }
    }
  } else {
    cells.push_back(OutputCell{&config.descriptors.front(), nullptr, config.output});
  }

  ResponseCache cache(config.cache_dir);
  ChatClient client(config.retry, &cache);
  std::size_t budget = config.limit.value_or(std::numeric_limits<std::size_t>::max());

  for (const auto& cell : cells) {
    auto resume = load_results(cell.output);
    summary.warnings.insert(summary.warnings.end(), resume.warnings.begin(), resume.warnings.end());
    std::unordered_map<std::string, const ResponseRecord*> done;
    for (const auto& r : resume.records) {
      if (!r.error) done[r.record_id] = &r;
    }

    // Writer indices follow input order over the records still to run.
    std::vector<std::optional<std::size_t>> slot(records.size());
    std::size_t pending = 0;
    for (std::size_t i = 0; i < records.size(); ++i) {
      if (!done.count(records[i].id)) slot[i] = pending++;
    }
    summary.records += records.size();
    summary.skipped += records.size() - pending;
    summary.outputs.push_back(cell.output);

    ResultsWriter writer(cell.output);
    std::atomic<std::size_t> next_unit{0};
    std::atomic<std::size_t> claimed{0};
    std::atomic<bool> stop{false};
    std::mutex mu;
    std::exception_ptr failure;
    std::int64_t prompt_tokens = 0;
    std::int64_t completion_tokens = 0;
    std::size_t executed = 0;

    auto execute = [&](const bench::QARecord& q, const History& history) {
      ResponseRecord r;
      switch (config.mode) {
        case RunMode::OneStage:
          r = run_one_stage(client, q, config.strategy, *cell.descriptor, categories, history);
          break;
        case RunMode::TwoStage:
          r = run_two_stage(client, q, *cell.descriptor, config.strategy, history);
          break;
        case RunMode::TextOnly:
          r = run_text_only(client, q, *cell.descriptor, *cell.parser, config.strategy, history);
          break;
      }
      r.seed = config.seed;
      r.frames = config.frames;
      return r;
    };

    auto worker = [&] {
      while (!stop.load()) {
        const std::size_t u = next_unit.fetch_add(1);
        if (u >= units.size()) return;
        History history;
        for (std::size_t i : units[u].items) {
          const auto& q = records[i];
          if (!slot[i]) {
            if (config.benchmark == Benchmark::OST) append_history(history, config.mode, config.strategy, q,
                                                                   done.at(q.id)->raw_text);
            continue;
          }
          if (stop.load() || claimed.fetch_add(1) >= budget) {
            writer.skip(*slot[i]);
            continue;
          }
          ResponseRecord r;
          try {
            r = execute(q, history);
          } catch (...) {
            std::lock_guard<std::mutex> g(mu);
            if (!failure) failure = std::current_exception();
            stop = true;
            writer.skip(*slot[i]);
            continue;
          }
          if (config.benchmark == Benchmark::OST) append_history(history, config.mode, config.strategy, q, r.raw_text);
          {
            std::lock_guard<std::mutex> g(mu);
            prompt_tokens += r.prompt_tokens;
            completion_tokens += r.completion_tokens;
            ++executed;
          }
          writer.submit(*slot[i], r);
        }
      }
    };

    const std::size_t n_threads = std::max<std::size_t>(1, std::min(config.max_concurrency, units.size()));
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    // Units never reached (after a stop) still owe their writer slots.
    for (std::size_t u = next_unit.load(); u < units.size(); ++u) {
      for (std::size_t i : units[u].items) {
        if (slot[i]) writer.skip(*slot[i]);
      }
    }
    if (failure) std::rethrow_exception(failure);

    const std::size_t used = std::min(claimed.load(), budget);
    budget = budget == std::numeric_limits<std::size_t>::max() ? budget : budget - used;
    summary.executed += executed;
    summary.prompt_tokens += prompt_tokens;
    summary.completion_tokens += completion_tokens;
  }
  summary.network_calls = client.network_calls();
  summary.cache_hits = client.cache_hits();
  return summary;
}

}  // namespace tracekit::harness
