#include "tracekit/cli/cli.hpp"
#include "tracekit/core/text.hpp"
#include "tracekit/harness/harness.hpp"
#include "tracekit/scoring/scoring.hpp"
#include "replay.hpp"
#include "trace_gen.hpp"

#include "json.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

namespace tracekit::cli {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;
using testing::ScratchDir;

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string bedroom_trace() { return (testing::fixture_dir() / "traces" / "bedroom_example.yaml").string(); }

std::string golden(const std::string& name) { return text::read_file((testing::golden_dir() / name).string()); }

TEST(Cli, HelpMatchesGoldens) {
  EXPECT_EQ(cli({"--help"}).out, golden("cli/help.txt"));
  for (const char* sub : {"validate", "oracle", "prompt", "run", "score", "report"}) {
    const auto o = cli({sub, "--help"});
    EXPECT_EQ(o.code, kExitOk) << sub;
    EXPECT_EQ(o.out, golden(std::string("cli/help_") + sub + ".txt")) << sub;
  }
}

TEST(Cli, UsageErrorsExitTwo) {
  for (const auto& args : std::vector<std::vector<std::string>>{
           {},
           {"frobnicate"},
           {"validate"},
           {"validate", "--trace"},
           {"validate", "--trace", "x", "--bogus"},
           {"prompt", "--strategy", "trace"},
           {"report", "--scores", "x", "--format", "html"},
       }) {
    const auto o = cli(args);
    EXPECT_EQ(o.code, kExitUsage) << ::testing::PrintToString(args);
    EXPECT_EQ(o.err.rfind("error: ", 0), 0u) << o.err;
  }
}

TEST(Cli, ValidateBedroomExample) {
  const auto o = cli({"validate", "--trace", bedroom_trace()});
  EXPECT_EQ(o.code, kExitOk);
  EXPECT_NE(o.out.find("0 errors"), std::string::npos) << o.out;
  EXPECT_EQ(cli({"validate", "--trace", bedroom_trace(), "--strict"}).code, kExitDomain);
}

TEST(Cli, ValidateReportsDomainErrors) {
  EXPECT_EQ(cli({"validate", "--trace", (testing::fixture_dir() / "messy" / "08_broken_yaml.txt").string()}).code,
            kExitDomain);
  const auto missing = cli({"validate", "--trace", "/nonexistent/trace.yaml"});
  EXPECT_EQ(missing.code, kExitDomain);
  EXPECT_NE(missing.err.find("IoError"), std::string::npos);
}

TEST(Cli, OracleAnswersBedroomExample) {
  const auto dist = cli({"oracle", "--trace", bedroom_trace(), "--task", "abs_dist", "--a", "bed_01", "--b", "nightstand_01"});
  EXPECT_EQ(dist.code, kExitOk);
  EXPECT_EQ(dist.out.substr(0, dist.out.find('\n')), "0.8062 m");

  const auto count = cli({"oracle", "--trace", bedroom_trace(), "--task", "count", "--category", "chair"});
  EXPECT_EQ(count.out.substr(0, count.out.find('\n')), "0");

  const auto room = cli({"oracle", "--trace", bedroom_trace(), "--task", "room_size"});
  EXPECT_EQ(room.out.substr(0, room.out.find('\n')), "11.2 m^2");

  const auto q = cli({"oracle", "--trace", bedroom_trace(), "--task", "abs_dist", "--question",
                      "Measuring from the closest point of each object, what is the direct distance between the bed "
                      "and the nightstand (in meters)?"});
  EXPECT_EQ(q.code, kExitOk) << q.err;
  EXPECT_EQ(q.out.substr(0, q.out.find('\n')), "0.8062 m");

  EXPECT_EQ(cli({"oracle", "--trace", bedroom_trace(), "--task", "abs_dist", "--a", "bed_01", "--b", "ghost_01"}).code,
            kExitDomain);
}

TEST(Cli, PromptMatchesGolden) {
  const std::string q =
      "Measuring from the closest point of each object, which of these objects (door, bed, trash bin, tv) is the "
      "closest to the nightstand?";
  const auto o = cli({"prompt", "--strategy", "trace", "--answer-type", "MCA", "--question", q, "--options", "door",
                      "bed", "trash bin", "tv"});
  EXPECT_EQ(o.code, kExitOk) << o.err;
  EXPECT_EQ(o.out, golden("prompts/trace_MCA.txt"));

  ScratchDir tmp("cli");
  const auto file = (tmp.path() / "p.txt").string();
  const auto s2 = cli({"prompt", "--mode", "two_stage_s2", "--answer-type", "MCA", "--question", q, "--options",
                       "door", "bed", "trash bin", "tv", "--context", bedroom_trace(), "--output", file});
  EXPECT_EQ(s2.code, kExitOk) << s2.err;
  EXPECT_EQ(text::read_file(file), golden("prompts/two_stage_s2_MCA.txt"));
}

harness::ResponseRecord mca_record(const std::string& id, const std::string& reply, const std::string& task) {
  harness::ResponseRecord r;
  r.record_id = id;
  r.benchmark = "VSI";
  r.scene_id = "scene0001_00";
  r.source = "ScanNet";
  r.task = task;
  r.answer_type = "MCA";
  r.options = {"left", "right", "back"};
  r.ground_truth = "B";
  r.mode = "one_stage";
  r.strategy = "direct";
  r.descriptor = "m";
  r.raw_text = reply;
  r.extracted_answer = scoring::extract_answer(reply);
  r.prompt_tokens = 100;
  r.completion_tokens = 5;
  return r;
}

TEST(Cli, ScoreAndReportHalfCorrectResults) {
  ScratchDir tmp("cli");
  const fs::path results = tmp.path() / "half.jsonl";
  {
    std::ofstream out(results);
    out << harness::to_json(mca_record("r1", "Answer: `B`", "rel_dir")).dump() << "\n";
    out << harness::to_json(mca_record("r2", "Answer: `A`", "rel_dir")).dump() << "\n";
    out << harness::to_json(mca_record("r3", "Answer: `right`", "route")).dump() << "\n";
    out << harness::to_json(mca_record("r4", "Answer: `back`", "route")).dump() << "\n";
  }
  const fs::path scores = tmp.path() / "scores.json";
  const auto s = cli({"score", "--results", results.string(), "--output", scores.string()});
  ASSERT_EQ(s.code, kExitOk) << s.err;
  const json j = json::parse(text::read_file(scores.string()));
  EXPECT_EQ(j["overall_micro"], 0.5);
  EXPECT_EQ(j["n"], 4);
  EXPECT_EQ(j["label"], "half");
  EXPECT_EQ(j["tokens"]["total"], 420);

  const auto md = cli({"report", "--scores", scores.string()});
  ASSERT_EQ(md.code, kExitOk) << md.err;
  std::string header = "|";
  for (const auto& c : scoring::markdown_columns()) header += " " + c + " |";
  EXPECT_NE(md.out.find(header), std::string::npos) << md.out;

  const auto csv = cli({"report", "--scores", scores.string(), "--format", "csv"});
  EXPECT_EQ(csv.out.rfind("group,key,score,n\noverall,micro,0.5,4\n", 0), 0u) << csv.out;

  const auto js = cli({"report", "--scores", scores.string(), "--format", "json"});
  EXPECT_EQ(json::parse(js.out)["overall_micro"], 0.5);
}

TEST(Cli, ScoreWarnsOnDuplicatesAndCorruptLines) {
  ScratchDir tmp("cli");
  const fs::path results = tmp.path() / "dup.jsonl";
  {
    std::ofstream out(results);
    out << harness::to_json(mca_record("r1", "Answer: `A`", "rel_dir")).dump() << "\n";
    out << "{broken\n";
    out << harness::to_json(mca_record("r1", "Answer: `B`", "rel_dir")).dump() << "\n";
  }
  const auto s = cli({"score", "--results", results.string()});
  ASSERT_EQ(s.code, kExitOk);
  EXPECT_EQ(json::parse(s.out)["overall_micro"], 1.0);
  EXPECT_NE(s.err.find("CorruptResultsLine"), std::string::npos);
  EXPECT_NE(s.err.find("later line wins"), std::string::npos);
  EXPECT_EQ(cli({"score", "--results", (tmp.path() / "none.jsonl").string()}).code, kExitDomain);
  EXPECT_EQ(cli({"report", "--scores", results.string()}).code, kExitDomain);
}

TEST(Cli, RunReplaysAConfigEndToEnd) {
  const auto& fx = testing::replay_fixture();
  ScratchDir tmp("cli");
  harness::MockChatServer server;
  server.start();
  server.set_responder(testing::replay_responder(fx));
  const json config = {
      {"name", "cli-replay"},
      {"data", fx.data.string()},
      {"media_root", fx.media_root.string()},
      {"mode", "one_stage"},
      {"strategy", "trace"},
      {"frames", testing::kReplayFrames},
      {"endpoint", {{"name", "desc-alpha"}, {"base_url", server.base_url()}, {"model", "desc-alpha"}}},
      {"cache_dir", "cache"},
      {"output", "results.jsonl"},
  };
  const fs::path cfg = tmp.path() / "run.json";
  text::write_file_atomic(cfg.string(), config.dump(2));
  const auto r = cli({"run", "--config", cfg.string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("executed: 48\n"), std::string::npos) << r.out;
  const auto& want = fx.expected["runs"]["one_stage"];
  const auto total = want["prompt_tokens"].get<std::int64_t>() + want["completion_tokens"].get<std::int64_t>();
  EXPECT_NE(r.out.find("total_tokens: " + std::to_string(total) + "\n"), std::string::npos) << r.out;

  const auto again = cli({"run", "--config", cfg.string()});
  EXPECT_NE(again.out.find("skipped: 48\nexecuted: 0\nnetwork_calls: 0\n"), std::string::npos) << again.out;

  const auto s = cli({"score", "--results", (tmp.path() / "results.jsonl").string()});
  ASSERT_EQ(s.code, kExitOk) << s.err;
  double sum = 0.0;
  for (const auto& [id, v] : want["scores"].items()) sum += v.get<double>();
  EXPECT_NEAR(json::parse(s.out)["overall_micro"].get<double>(), sum / 48.0, 1e-12);
  EXPECT_EQ(json::parse(s.out)["tokens"]["total"].get<std::int64_t>(), total);
}

TEST(Cli, RunConfigErrorsAreDomainErrors) {
  ScratchDir tmp("cli");
  const fs::path cfg = tmp.path() / "bad.json";
  text::write_file_atomic(cfg.string(), R"({"data": "d.jsonl", "output": "o.jsonl", "max_concurrency": 0,
    "endpoint": {"name": "e", "base_url": "http://127.0.0.1:1/v1", "model": "m"}})");
  const auto o = cli({"run", "--config", cfg.string()});
  EXPECT_EQ(o.code, kExitDomain);
  EXPECT_NE(o.err.find("max_concurrency"), std::string::npos) << o.err;
  EXPECT_EQ(cli({"run", "--config", (tmp.path() / "missing.json").string()}).code, kExitDomain);
}

}  // namespace
}  // namespace tracekit::cli
