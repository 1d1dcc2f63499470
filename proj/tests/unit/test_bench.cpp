#include "tracekit/bench/bench.hpp"
#include "tracekit/core/text.hpp"
#include "trace_gen.hpp"

#include "json.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <random>

#include <unistd.h>

namespace tracekit::bench {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;
using testing::Rng;

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = fs::temp_directory_path() / ("tracekit_bench_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

json vsi_line(const std::string& id, const std::string& scene, bool mca) {
  json j = {{"id", id},         {"benchmark", "VSI"}, {"scene_id", scene}, {"media", json::array()},
            {"task", mca ? "rel_dir" : "abs_dist"}, {"answer_type", mca ? "MCA" : "NA"}, {"question", "q?"}};
  if (mca) {
    j["options"] = {"left", "right", "back"};
    j["ground_truth"] = "B";
  } else {
    j["ground_truth"] = 2.5;
  }
  return j;
}

std::string write_lines(const fs::path& file, const std::vector<std::string>& lines) {
  std::ofstream out(file, std::ios::binary);
  for (const auto& l : lines) out << l << "\n";
  return file.string();
}

void make_frames(const fs::path& dir, std::size_t n) {
  fs::create_directories(dir);
  for (std::size_t i = 0; i < n; ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "%05zu.jpg", i);
    std::ofstream(dir / name) << "x";
  }
  std::ofstream(dir / "notes.txt") << "not a frame";
}

TEST(LoadVsi, EmptyFileAndRecords) {
  TempDir tmp;
  EXPECT_TRUE(load_vsi(write_lines(tmp.path() / "empty.jsonl", {})).records.empty());

  const auto path = write_lines(tmp.path() / "vsi.jsonl", {vsi_line("a", "scene0001_00", true).dump(), "",
                                                            vsi_line("b", "arkitscenes_42", false).dump()});
  const auto res = load_vsi(path);
  ASSERT_EQ(res.records.size(), 2u);
  EXPECT_EQ(res.records[0].source, "ScanNet");
  EXPECT_EQ(res.records[0].gt_option(), 1u);
  EXPECT_EQ(res.records[1].source, "ARKitScenes");
  EXPECT_EQ(res.records[1].gt_value(), 2.5);
  EXPECT_EQ(res.records[1].task.kind, TaskKind::AbsDist);
  for (const auto& r : res.records) EXPECT_NO_THROW(check_record(r));
}

TEST(LoadVsi, SchemaErrorsCarryLineNumbers) {
  TempDir tmp;
  auto bad_gt = vsi_line("x", "scene1", true);
  bad_gt["ground_truth"] = "E";
  auto neg = vsi_line("y", "scene1", false);
  neg["ground_truth"] = -3;
  auto no_q = vsi_line("z", "scene1", false);
  no_q.erase("question");
  const std::vector<std::pair<std::string, std::size_t>> cases = {
      {bad_gt.dump(), 3}, {neg.dump(), 3}, {no_q.dump(), 3}, {"{not json", 3}, {"[1,2]", 3}};
  for (const auto& [line, expect] : cases) {
    const auto path = write_lines(tmp.path() / "bad.jsonl", {vsi_line("a", "scene1", true).dump(), "", line});
    try {
      load_vsi(path);
      FAIL() << line;
    } catch (const BenchError& e) {
      EXPECT_EQ(e.kind(), BenchErrorKind::SchemaError) << line;
      EXPECT_EQ(e.line(), expect) << line;
      EXPECT_NE(std::string(e.what()).find("(line 3)"), std::string::npos);
    }
  }
  try {
    load_vsi((tmp.path() / "absent.jsonl").string());
    FAIL();
  } catch (const BenchError& e) {
    EXPECT_EQ(e.kind(), BenchErrorKind::Io);
  }
}

TEST(LoadVsi, OptionLabelsAndTextGroundTruth) {
  auto j = vsi_line("a", "scene1", true);
  j["options"] = {"A. left", "B. right", "C. back"};
  j["ground_truth"] = "back";
  auto r = parse_record(j.dump(), 1, {}, nullptr);
  EXPECT_EQ(r.options, (std::vector<std::string>{"left", "right", "back"}));
  EXPECT_EQ(r.ground_truth, "C");
  j["ground_truth"] = "b.";
  r = parse_record(j.dump(), 1, {}, nullptr);
  EXPECT_EQ(r.ground_truth, "B");
}

TEST(LoadVsi, MediaResolution) {
  TempDir tmp;
  make_frames(tmp.path() / "scene0007_00", 10);
  LoadOptions opts;
  opts.media_root = tmp.path();
  opts.frames = 4;

  auto j = vsi_line("a", "scene0007_00", false);
  j.erase("media");
  std::vector<std::string> warnings;
  auto r = parse_record(j.dump(), 1, opts, &warnings);
  ASSERT_EQ(r.media.size(), 4u);
  EXPECT_EQ(fs::path(r.media[0].path).filename(), "00000.jpg");
  EXPECT_EQ(fs::path(r.media[3].path).filename(), "00009.jpg");
  EXPECT_TRUE(warnings.empty());

  j["media"] = "clips/scene0007.mp4";
  r = parse_record(j.dump(), 5, opts, &warnings);
  ASSERT_EQ(r.media.size(), 1u);
  EXPECT_TRUE(r.media[0].is_video);
  ASSERT_EQ(warnings.size(), 1u);
  EXPECT_TRUE(warnings[0].starts_with("line 5: MissingMedia")) << warnings[0];

  j["scene_id"] = "scene9999_00";
  j.erase("media");
  warnings.clear();
  r = parse_record(j.dump(), 6, opts, &warnings);
  EXPECT_TRUE(r.media.empty());
  ASSERT_EQ(warnings.size(), 1u);
  EXPECT_NE(warnings[0].find("MissingMedia"), std::string::npos);
}

TEST(LoadOst, GroupingAndGaps) {
  TempDir tmp;
  auto turn = [](const std::string& scene, int t) {
    json j = vsi_line(scene + "_t" + std::to_string(t), scene, false);
    j["benchmark"] = "OST";
    j["task"] = "agent_state";
    j["turn_index"] = t;
    return j.dump();
  };
  const auto ok = load_ost(write_lines(tmp.path() / "ost.jsonl", {turn("s1", 1), turn("s2", 0), turn("s1", 0)}));
  ASSERT_EQ(ok.scenes.size(), 2u);
  EXPECT_EQ(ok.scenes[0].scene_id, "s1");
  ASSERT_EQ(ok.scenes[0].turns.size(), 2u);
  EXPECT_EQ(ok.scenes[0].turns[0].turn_index, 0);
  EXPECT_EQ(ok.scenes[0].turns[1].record.id, "s1_t1");
  EXPECT_EQ(ok.scenes[0].turns[0].record.source, kOstSource);
  EXPECT_EQ(ok.scenes[0].turns[0].record.task.name, "agent_state");

  const auto single = load_ost(write_lines(tmp.path() / "one.jsonl", {turn("s", 2), turn("s", 0), turn("s", 1)}));
  ASSERT_EQ(single.scenes.size(), 1u);
  for (int i = 0; i < 3; ++i) EXPECT_EQ(single.scenes[0].turns[i].turn_index, i);

  for (const auto& bad : {std::vector<std::string>{turn("s", 0), turn("s", 2)},
                          std::vector<std::string>{turn("s", 0), turn("s", 0)}}) {
    try {
      load_ost(write_lines(tmp.path() / "gap.jsonl", bad));
      FAIL();
    } catch (const BenchError& e) {
      EXPECT_EQ(e.kind(), BenchErrorKind::SchemaError);
      EXPECT_EQ(e.line(), 2u);
    }
  }
  json no_turn = vsi_line("q", "s", false);
  no_turn["benchmark"] = "OST";
  EXPECT_THROW(load_ost(write_lines(tmp.path() / "nt.jsonl", {no_turn.dump()})), BenchError);
}

TEST(Sources, LongestPrefixAndConfig) {
  const auto rules = SourceRules::load((testing::config_dir() / "sources.conf").string());
  EXPECT_EQ(rules.classify("scannetpp_0a7cc12c0e"), "ScanNetPP");
  EXPECT_EQ(rules.classify("scannet_scene0011"), "ScanNet");
  EXPECT_EQ(rules.classify("scene0011_00"), "ScanNet");
  EXPECT_EQ(rules.classify("ARKitScenes_41069025"), "ARKitScenes");
  EXPECT_EQ(rules.classify("hm3d_001"), kUnknownSource);

  auto r = SourceRules::parse("# comment\nab=Short\nabc=Long\n\nbad line\n");
  EXPECT_EQ(r.classify("abcd"), "Long");
  EXPECT_EQ(r.classify("abd"), "Short");
  r.add("abcd", "Longest");
  EXPECT_EQ(r.classify("abcde"), "Longest");

  QARecord ost;
  ost.benchmark = Benchmark::OST;
  ost.scene_id = "scene0001_00";
  EXPECT_EQ(stratify_source(ost, rules), kOstSource);
}

TEST(Sampling, FrozenReferenceDraws) {
  const json ref = json::parse(text::read_file((testing::fixture_dir() / "bench" / "ost_subset_expected.json").string()));
  const auto ids = ref.at("scene_ids").get<std::vector<std::string>>();
  for (const auto& [seed, expect] : ref.at("subsets").items()) {
    EXPECT_EQ(sample_scene_ids(ids, std::stoull(seed)), expect.get<std::vector<std::string>>()) << seed;
  }
  EXPECT_NE(sample_scene_ids(ids, 1), sample_scene_ids(ids, 2));
}

TEST(Sampling, EngineMatchesStandard) {
  std::mt19937_64 rng;
  rng.discard(9999);
  EXPECT_EQ(rng(), 9981545732273789042ull);
}

TEST(Sampling, PureFunctionOfSortedIds) {
  Rng rng(9);
  std::vector<std::string> ids;
  for (int i = 0; i < 230; ++i) ids.push_back("s" + std::to_string(i));
  const auto base = sample_scene_ids(ids, 42);
  EXPECT_EQ(base.size(), kOstSubsetSize);
  EXPECT_TRUE(std::is_sorted(base.begin(), base.end()));
  std::shuffle(ids.begin(), ids.end(), rng);
  EXPECT_EQ(sample_scene_ids(ids, 42), base);

  std::vector<std::string> exact(ids.begin(), ids.begin() + 200);
  auto sorted = exact;
  std::sort(sorted.begin(), sorted.end());
  for (std::uint64_t seed : {0ull, 1ull, 77ull}) EXPECT_EQ(sample_scene_ids(exact, seed), sorted);

  try {
    sample_scene_ids(std::vector<std::string>(ids.begin(), ids.begin() + 199), 0);
    FAIL();
  } catch (const BenchError& e) {
    EXPECT_EQ(e.kind(), BenchErrorKind::TooFewScenes);
  }
}

TEST(Sampling, OstSubsetKeepsWholeScenes) {
  std::vector<DialogueScene> scenes;
  for (int i = 0; i < 210; ++i) {
    DialogueScene s;
    s.scene_id = "scene" + std::to_string(1000 - i);
    s.turns.resize(static_cast<std::size_t>(i % 3 + 1));
    scenes.push_back(s);
  }
  const auto sub = sample_ost_subset(scenes, 3);
  ASSERT_EQ(sub.size(), 200u);
  for (std::size_t i = 1; i < sub.size(); ++i) EXPECT_LT(sub[i - 1].scene_id, sub[i].scene_id);
  for (const auto& s : sub) {
    const int n = 1000 - std::stoi(s.scene_id.substr(5));
    EXPECT_EQ(s.turns.size(), static_cast<std::size_t>(n % 3 + 1));
  }
}

TEST(Frames, Examples) {
  EXPECT_EQ(frame_indices(100, 4), (std::vector<std::size_t>{0, 33, 66, 99}));
  EXPECT_EQ(frame_indices(5, 5), (std::vector<std::size_t>{0, 1, 2, 3, 4}));
  EXPECT_EQ(frame_indices(3, 8), (std::vector<std::size_t>{0, 1, 2}));
  EXPECT_EQ(frame_indices(9, 1), (std::vector<std::size_t>{4}));
  EXPECT_EQ(frame_indices(10, 1), (std::vector<std::size_t>{5}));
  EXPECT_EQ(frame_indices(11, 3), (std::vector<std::size_t>{0, 5, 10}));
  EXPECT_EQ(frame_indices(10, 4), (std::vector<std::size_t>{0, 3, 6, 9}));
  EXPECT_TRUE(frame_indices(0, 4).empty());
}

TEST(Frames, StrictlyIncreasingWithinRange) {
  for (std::size_t n = 1; n <= 120; ++n) {
    for (std::size_t k = 1; k <= 40; ++k) {
      const auto idx = frame_indices(n, k);
      ASSERT_EQ(idx.size(), std::min(n, k));
      for (std::size_t i = 0; i < idx.size(); ++i) {
        ASSERT_LT(idx[i], n);
        if (i) {
          ASSERT_LT(idx[i - 1], idx[i]) << n << "," << k;
        }
      }
      if (k >= 2 && k < n) {
        EXPECT_EQ(idx.front(), 0u);
        EXPECT_EQ(idx.back(), n - 1);
        // Closest integer to i(n-1)/(k-1).
        for (std::size_t i = 0; i < k; ++i) {
          const double exact = static_cast<double>(i * (n - 1)) / static_cast<double>(k - 1);
          EXPECT_LE(std::abs(static_cast<double>(idx[i]) - exact), 0.5 + 1e-12);
        }
      }
    }
  }
}

TEST(Frames, ManifestFromDirectory) {
  TempDir tmp;
  make_frames(tmp.path() / "s", 7);
  const auto m = frame_manifest(tmp.path(), "s", 3);
  ASSERT_EQ(m.size(), 3u);
  EXPECT_EQ(fs::path(m[1].path).filename(), "00003.jpg");
  try {
    frame_manifest(tmp.path(), "missing", 3);
    FAIL();
  } catch (const BenchError& e) {
    EXPECT_EQ(e.kind(), BenchErrorKind::MissingMedia);
  }
}

TEST(Categories, VsiListHas23Entries) {
  const auto cats = load_categories((testing::config_dir() / "categories.txt").string(), "vsi");
  ASSERT_EQ(cats.size(), 23u);
  EXPECT_EQ(cats.front(), "ceiling light");
  EXPECT_EQ(cats.back(), "telephone");
  EXPECT_TRUE(load_categories((testing::config_dir() / "categories.txt").string(), "nope").empty());
}

}  // namespace
}  // namespace tracekit::bench
