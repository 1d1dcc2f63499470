#pragma once

// Scripted endpoints over tests/fixtures/replay (see make_fixture.py there).

#include "tracekit/bench/bench.hpp"
#include "tracekit/harness/harness.hpp"

#include "json.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace tracekit::testing {

// Fresh directory under the system temp dir, removed on destruction.
class ScratchDir {
 public:
  explicit ScratchDir(const std::string& tag);
  ~ScratchDir();
  ScratchDir(const ScratchDir&) = delete;
  ScratchDir& operator=(const ScratchDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline constexpr const char* kReplayDescriptors[] = {"desc-alpha", "desc-beta"};
inline constexpr const char* kReplayParsers[] = {"parser-gamma", "parser-delta"};
inline constexpr std::size_t kReplayFrames = 4;

struct ReplayFixture {
  std::filesystem::path dir;
  std::filesystem::path data;
  std::filesystem::path media_root;
  std::vector<bench::QARecord> records;
  nlohmann::json replies;
  nlohmann::json expected;
};

const ReplayFixture& replay_fixture();

// Which pipeline step a chat request belongs to, judged from its messages.
enum class ReplayStage { OneStage, StageOne, StageTwo, Parser, Unknown };
ReplayStage classify_request(const nlohmann::json& request);

// Serves the scripted replies. Unknown requests get no reply (the server answers 404).
harness::MockChatServer::Responder replay_responder(const ReplayFixture& fx);

harness::ModelEndpoint replay_endpoint(const std::string& name, const std::string& base_url);

// A run over the fixture. `work` receives the results file and the cache directory.
harness::RunConfig replay_config(const ReplayFixture& fx, harness::RunMode mode, const std::string& base_url,
                                 const std::filesystem::path& work);

// Expected-run key in expected.json: one_stage, two_stage, text_only/<descriptor>/<parser>.
std::string replay_run_key(harness::RunMode mode, const std::string& descriptor = {}, const std::string& parser = {});

// Differences between a results file and the precomputed run in expected.json: per-record
// score (exact), trace-problem and error flags, token totals. Empty `mismatches` means equal.
struct ReplayCheck {
  std::size_t compared = 0;
  std::int64_t prompt_tokens = 0;  // summed over the file's records
  std::int64_t completion_tokens = 0;
  std::vector<std::string> mismatches;
};
ReplayCheck compare_with_expected(const ReplayFixture& fx, const std::filesystem::path& results,
                                  const std::string& run_key);

// Results file contents keyed by record id.
std::map<std::string, harness::ResponseRecord> read_results(const std::filesystem::path& path);

}  // namespace tracekit::testing
