#include "tracekit/cli/cli.hpp"

#include "tracekit/core/text.hpp"
#include "tracekit/harness/harness.hpp"
#include "tracekit/oracle/spatial_oracle.hpp"
#include "tracekit/prompt/prompt_engine.hpp"
#include "tracekit/schema/trace.hpp"
#include "tracekit/scoring/scoring.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>
#include <sstream>
#include <unordered_map>

namespace tracekit::cli {

namespace {

// Domain failure carrying the message printed on stderr.
struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_input(const std::string& path) {
  try {
    return text::read_file(path);
  } catch (const std::exception& e) {
    throw DomainError(std::string("IoError: ") + e.what());
  }
}

void write_output(const std::string& path, const std::string& body, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << body;
    return;
  }
  try {
    text::write_file_atomic(path, body);
  } catch (const std::exception& e) {
    throw DomainError(std::string("IoError: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// validate

struct ValidateArgs {
  std::string trace;
  bool strict = false;
};

int cmd_validate(const ValidateArgs& a, std::ostream& out) {
  const std::string body = read_input(a.trace);
  schema::ParseResult parsed;
  try {
    parsed = schema::parse_trace(body);
  } catch (const schema::ParseError& e) {
    throw DomainError(std::string("[validate] ParseError: ") + e.what());
  }
  for (const auto& w : parsed.warnings) {
    out << "note " << w.section;
    if (w.index) out << "[" << *w.index << "]";
    if (!w.key.empty()) out << "." << w.key;
    out << ": " << w.message << "\n";
  }
  const auto violations = schema::validate_trace(parsed.document);
  for (const auto& v : violations) {
    out << schema::to_string(v.severity) << " " << schema::rule_name(v.rule) << " " << v.location << ": "
        << v.message << "\n";
  }
  const auto errors = schema::count_errors(violations);
  const auto warnings = schema::count_warnings(violations);
  out << errors << (errors == 1 ? " error, " : " errors, ") << warnings
      << (warnings == 1 ? " warning" : " warnings") << "\n";
  if (errors > 0 || (a.strict && warnings > 0)) return kExitDomain;
  return kExitOk;
}

// ---------------------------------------------------------------------------
// oracle

struct OracleArgs {
  std::string trace;
  std::string task;
  std::string question;
  std::vector<std::string> options;
  std::string category;
  std::vector<std::string> categories;
  std::string a, b;
  std::string entity;
  std::string target;
  std::string standing, facing, query;
  std::string start;
};

oracle::OracleQuery build_query(const OracleArgs& a, TaskKind task) {
  if (!a.question.empty()) {
    auto q = oracle::query_from_question(task, a.question, a.options);
    if (!q) throw DomainError("[oracle] UnrecognisedQuestion: question phrasing not recognised for " + a.task);
    return *q;
  }
  oracle::OracleQuery q;
  q.task = task;
  q.options = a.options;
  auto push = [&q](const std::string& s) {
    if (!s.empty()) q.subjects.push_back(s);
  };
  switch (task) {
    case TaskKind::ObjCount: push(a.category); break;
    case TaskKind::AbsDist: push(a.a); push(a.b); break;
    case TaskKind::ObjSize: push(a.entity); break;
    case TaskKind::RoomSize: break;
    case TaskKind::RelDist: push(a.target); break;
    case TaskKind::RelDir: push(a.standing); push(a.facing); push(a.query); break;
    case TaskKind::Route: push(a.start); push(a.facing); break;
    case TaskKind::Order:
      q.subjects = a.categories;
      break;
    case TaskKind::Other: break;
  }
  return q;
}

int cmd_oracle(const OracleArgs& a, std::ostream& out) {
  const TaskKind task = parse_task_kind(a.task);
  if (task == TaskKind::Other) throw DomainError("[oracle] UnknownTask: " + a.task);
  const std::string body = read_input(a.trace);
  schema::ParseResult parsed;
  try {
    parsed = schema::parse_trace(body);
  } catch (const schema::ParseError& e) {
    throw DomainError(std::string("[oracle] ParseError: ") + e.what());
  }
  oracle::OracleAnswer ans;
  try {
    ans = oracle::answer(parsed.document, build_query(a, task));
  } catch (const oracle::OracleError& e) {
    throw DomainError(std::string("[oracle] ") + e.what());
  }
  out << ans.display() << "\n";
  if (ans.option_index) out << "option: " << ans.answer_text() << "\n";
  out << "derivation: " << ans.trace << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// prompt

struct PromptArgs {
  std::string strategy = "trace";
  std::string ablation = "full";
  std::string answer_type = "NA";
  std::string mode = "one_stage";
  std::string question;
  std::vector<std::string> options;
  std::string categories_file;
  std::string benchmark = "vsi";
  std::string context_file;
  std::string output;
};

int cmd_prompt(const PromptArgs& a, std::ostream& out) {
  prompt::PromptRequest req;
  const auto s = prompt::parse_strategy(a.strategy);
  if (!s) throw DomainError("[prompt] UnknownStrategy: " + a.strategy);
  const auto ab = prompt::parse_ablation(a.ablation);
  if (!ab) throw DomainError("[prompt] UnknownAblation: " + a.ablation);
  const auto t = parse_answer_type(a.answer_type);
  if (!t) throw DomainError("[prompt] UnknownAnswerType: " + a.answer_type);
  req.strategy = {*s, *ab};
  req.answer_type = *t;
  req.question = a.question;
  req.options = a.options;
  if (!a.categories_file.empty()) {
    try {
      req.categories = bench::load_categories(a.categories_file, a.benchmark);
    } catch (const std::exception& e) {
      throw DomainError(std::string("[prompt] IoError: ") + e.what());
    }
  }
  std::optional<prompt::Mode> mode;
  for (auto m : {prompt::Mode::OneStage, prompt::Mode::TwoStageS1, prompt::Mode::TwoStageS2,
                 prompt::Mode::TextOnlyParser}) {
    if (prompt::to_string(m) == a.mode) mode = m;
  }
  if (!mode) throw DomainError("[prompt] UnknownMode: " + a.mode);
  std::optional<std::string> context;
  if (!a.context_file.empty()) context = read_input(a.context_file);
  prompt::PromptBundle bundle;
  try {
    bundle = prompt::build_bundle(req, *mode, {}, context ? std::optional<std::string_view>(*context) : std::nullopt);
  } catch (const prompt::PromptError& e) {
    throw DomainError(std::string("[prompt] ") + e.what());
  }
  write_output(a.output, prompt::golden_text(bundle), out);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// run

int cmd_run(const std::string& config_path, std::ostream& out, std::ostream& err) {
  harness::RunSummary s;
  try {
    s = harness::run(harness::load_run_config(config_path));
  } catch (const harness::HarnessError& e) {
    throw DomainError(e.stage().empty() ? std::string("[run] ") + e.what() : std::string(e.what()));
  } catch (const bench::BenchError& e) {
    throw DomainError(std::string("[load] ") + e.what());
  } catch (const std::exception& e) {
    throw DomainError(std::string("[run] ") + e.what());
  }
  for (const auto& w : s.warnings) err << "warning: " << w << "\n";
  for (const auto& p : s.outputs) out << "output: " << p.string() << "\n";
  out << "records: " << s.records << "\n"
      << "skipped: " << s.skipped << "\n"
      << "executed: " << s.executed << "\n"
      << "network_calls: " << s.network_calls << "\n"
      << "cache_hits: " << s.cache_hits << "\n"
      << "prompt_tokens: " << s.prompt_tokens << "\n"
      << "completion_tokens: " << s.completion_tokens << "\n"
      << "total_tokens: " << s.prompt_tokens + s.completion_tokens << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// score

struct ScoreArgs {
  std::vector<std::string> results;
  std::string label;
  std::string output;
};

// Read-only pass over a results file: later duplicates win, corrupt lines are reported.
std::vector<harness::ResponseRecord> read_results(const std::string& path, std::ostream& err) {
  std::vector<harness::ResponseRecord> out;
  std::unordered_map<std::string, std::size_t> slot;
  std::size_t lineno = 0;
  const std::string content = read_input(path);
  for (auto line : text::split_lines(content)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    try {
      auto r = harness::response_from_json(nlohmann::json::parse(line));
      const auto it = slot.find(r.record_id);
      if (it != slot.end()) {
        err << "warning: " << path << ":" << lineno << ": duplicate record " << r.record_id << ", later line wins\n";
        out[it->second] = std::move(r);
      } else {
        slot.emplace(r.record_id, out.size());
        out.push_back(std::move(r));
      }
    } catch (const std::exception& e) {
      err << "warning: CorruptResultsLine: " << path << ":" << lineno << ": " << e.what() << "\n";
    }
  }
  return out;
}

int cmd_score(const ScoreArgs& a, std::ostream& out, std::ostream& err) {
  std::vector<scoring::ScoredRecord> scored;
  bool oracle_parser = false;
  for (const auto& path : a.results) {
    for (const auto& r : read_results(path, err)) {
      scoring::ScoredRecord s;
      s.id = r.record_id;
      s.task = r.task;
      s.source = r.source;
      try {
        s.score = harness::score_response(r);
      } catch (const scoring::ScoringError& e) {
        throw DomainError(std::string("[score] ") + e.what() + " (record " + r.record_id + ")");
      }
      s.prompt_tokens = r.prompt_tokens;
      s.completion_tokens = r.completion_tokens;
      s.approximate_tokens = r.approximate_tokens;
      scored.push_back(std::move(s));
      oracle_parser = oracle_parser || r.parser == harness::kOracleParser;
    }
  }
  auto report = scoring::aggregate(scored);
  report.label = a.label;
  if (report.label.empty() && a.results.size() == 1) report.label = std::filesystem::path(a.results[0]).stem().string();
  if (oracle_parser) report.notes.push_back("parser: oracle (artifact extension, deterministic answers from the parsed trace)");
  write_output(a.output, scoring::report_to_json(report) + "\n", out);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// report

struct ReportArgs {
  std::string scores;
  std::string format = "md";
  std::string output;
};

int cmd_report(const ReportArgs& a, std::ostream& out) {
  scoring::ScoreReport report;
  try {
    report = scoring::report_from_json(read_input(a.scores));
  } catch (const scoring::ScoringError& e) {
    throw DomainError(std::string("[report] ") + e.what());
  }
  std::string body;
  if (a.format == "md") {
    body = scoring::render_markdown(report);
  } else if (a.format == "json") {
    body = scoring::report_to_json(report) + "\n";
  } else {
    body = scoring::render_csv(report);
  }
  write_output(a.output, body, out);
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Structured spatial-trace toolkit: validate, query, prompt, run, score and report.", "tracekit"};
  app.require_subcommand(1);
  app.fallthrough(false);

  ValidateArgs va;
  auto* validate = app.add_subcommand("validate", "Parse and validate a trace document");
  validate->add_option("--trace", va.trace, "Trace YAML file")->required();
  validate->add_flag("--strict", va.strict, "Treat warnings as failures");

  OracleArgs oa;
  auto* orc = app.add_subcommand("oracle", "Answer a spatial question from a trace document");
  orc->add_option("--trace", oa.trace, "Trace YAML file")->required();
  orc->add_option("--task", oa.task, "Task name (count, abs_dist, obj_size, room_size, rel_dist, rel_dir, route, order)")
      ->required();
  orc->add_option("--question", oa.question, "Question text; replaces the per-task flags");
  orc->add_option("--options", oa.options, "Answer options, one argument each");
  orc->add_option("--category", oa.category, "Category to count");
  orc->add_option("--categories", oa.categories, "Categories to order by first appearance");
  orc->add_option("--a", oa.a, "First entity (abs_dist)");
  orc->add_option("--b", oa.b, "Second entity (abs_dist)");
  orc->add_option("--entity", oa.entity, "Entity to measure (obj_size)");
  orc->add_option("--target", oa.target, "Reference entity (rel_dist)");
  orc->add_option("--standing", oa.standing, "Entity the observer stands by (rel_dir)");
  orc->add_option("--facing", oa.facing, "Entity the observer faces (rel_dir, route)");
  orc->add_option("--query", oa.query, "Entity whose direction is asked (rel_dir)");
  orc->add_option("--start", oa.start, "Starting entity (route)");

  PromptArgs pa;
  auto* prm = app.add_subcommand("prompt", "Assemble a prompt and print it in golden layout");
  prm->add_option("--strategy", pa.strategy, "direct, cot, tot, ltm, cm or trace")->capture_default_str();
  prm->add_option("--ablation", pa.ablation, "full, no_trajectory or no_entity_registry")->capture_default_str();
  prm->add_option("--answer-type", pa.answer_type, "NA or MCA")->capture_default_str();
  prm->add_option("--mode", pa.mode, "one_stage, two_stage_s1, two_stage_s2 or text_only_parser")
      ->capture_default_str();
  prm->add_option("--question", pa.question, "Question text")->required();
  prm->add_option("--options", pa.options, "Answer options, one argument each");
  prm->add_option("--categories-file", pa.categories_file, "Categories file for the cm strategy");
  prm->add_option("--benchmark", pa.benchmark, "Key looked up in the categories file")->capture_default_str();
  prm->add_option("--context", pa.context_file, "File holding the representation passed as context");
  prm->add_option("--output", pa.output, "Write here instead of stdout");

  std::string config_path;
  auto* run = app.add_subcommand("run", "Execute a run config end-to-end, resuming completed records");
  run->add_option("--config", config_path, "Run config JSON file")->required();

  ScoreArgs sa;
  auto* score = app.add_subcommand("score", "Score results files into a report JSON");
  score->add_option("--results", sa.results, "Results JSONL file(s)")->required();
  score->add_option("--label", sa.label, "Report label");
  score->add_option("--output", sa.output, "Write here instead of stdout");

  ReportArgs ra;
  auto* report = app.add_subcommand("report", "Render a report JSON as a table");
  report->add_option("--scores", ra.scores, "Report JSON from `score`")->required();
  report->add_option("--format", ra.format, "md, json or csv")
      ->check(CLI::IsMember({"md", "json", "csv"}))
      ->capture_default_str();
  report->add_option("--output", ra.output, "Write here instead of stdout");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    const CLI::App* target = &app;
    for (auto* sub : app.get_subcommands()) target = sub;
    out << target->help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    const CLI::App* target = &app;
    for (auto* sub : app.get_subcommands()) target = sub;
    err << target->help();
    return kExitUsage;
  }

  try {
    if (validate->parsed()) return cmd_validate(va, out);
    if (orc->parsed()) return cmd_oracle(oa, out);
    if (prm->parsed()) return cmd_prompt(pa, out);
    if (run->parsed()) return cmd_run(config_path, out, err);
    if (score->parsed()) return cmd_score(sa, out, err);
    if (report->parsed()) return cmd_report(ra, out);
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kExitDomain;
  }
  err << app.help();
  return kExitUsage;
}

}  // namespace tracekit::cli
