#include "tracekit/core/text.hpp"
#include "tracekit/scoring/scoring.hpp"
#include "trace_gen.hpp"

#include "json.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

namespace tracekit::scoring {
namespace {

using nlohmann::json;
using testing::Rng;

// Integer oracle: count k in 0..9 with |p - g| / g < (10 - k) / 20.
double mra_oracle(long p, long g) {
  int hits = 0;
  for (long k = 0; k < 10; ++k) hits += 20 * std::labs(p - g) < (10 - k) * g;
  return hits / 10.0;
}

bench::QARecord record(AnswerType t, std::string task, std::string gt, std::vector<std::string> options = {}) {
  bench::QARecord r;
  r.id = "q";
  r.task = Task::from_string(task);
  r.answer_type = t;
  r.ground_truth = std::move(gt);
  r.options = std::move(options);
  return r;
}

TEST(Extract, WorkedExamples) {
  auto a = extract_answer("Reasoning: ...\nAnswer: `B`");
  EXPECT_EQ(a.kind, AnswerKind::OptionLetter);
  EXPECT_EQ(a.matched_option, "B");
  EXPECT_EQ(a.path, ExtractionPath::AnswerLine);

  a = extract_answer("The answer is `3.5`");
  EXPECT_EQ(a.kind, AnswerKind::Numeric);
  EXPECT_EQ(a.numeric_value, 3.5);
  EXPECT_EQ(a.path, ExtractionPath::Backticks);

  a = extract_answer("I think it is the sofa");
  EXPECT_EQ(a.kind, AnswerKind::FreeText);
  EXPECT_EQ(a.raw, "I think it is the sofa");
  EXPECT_EQ(a.path, ExtractionPath::FuzzyFallback);
}

TEST(Extract, BlankIsEmptyOutput) {
  for (std::string_view s : {"", "   ", "\n\n\t"}) {
    try {
      extract_answer(s);
      FAIL() << "no throw";
    } catch (const ScoringError& e) {
      EXPECT_EQ(e.kind(), ScoringErrorKind::EmptyOutput);
    }
  }
}

TEST(Extract, Corpus) {
  const json corpus = json::parse(text::read_file((testing::fixture_dir() / "extraction" / "corpus.json").string()));
  ASSERT_GE(corpus.size(), 20u);
  for (const auto& c : corpus) {
    const std::string input = c.at("input").get<std::string>();
    SCOPED_TRACE(input);
    const auto a = extract_answer(input);
    EXPECT_EQ(a.raw, c.at("raw").get<std::string>());
    EXPECT_EQ(to_string(a.kind), c.at("kind").get<std::string>());
    EXPECT_EQ(to_string(a.path), c.at("path").get<std::string>());
    if (c.contains("value")) {
      ASSERT_TRUE(a.numeric_value);
      EXPECT_DOUBLE_EQ(*a.numeric_value, c["value"].get<double>());
    }
    if (a.kind == AnswerKind::Numeric) {
      EXPECT_TRUE(a.numeric_value && std::isfinite(*a.numeric_value));
    }
    if (c.contains("letter")) {
      EXPECT_EQ(a.matched_option, c["letter"].get<std::string>());
    }
    if (c.contains("options")) {
      const auto options = c["options"].get<std::vector<std::string>>();
      const auto got = match_mcq(a, options);
      if (c["match"].is_null()) {
        EXPECT_FALSE(got);
      } else {
        ASSERT_TRUE(got);
        EXPECT_EQ(*got, c["match"].get<std::size_t>());
      }
    }
    for (const auto& [key, unit] : {std::pair{"m", Unit::Meters}, std::pair{"cm", Unit::Centimeters}}) {
      if (!c.contains(key)) continue;
      const auto v = parse_numeric(a, unit);
      if (c[key].is_null()) {
        EXPECT_FALSE(v);
      } else {
        ASSERT_TRUE(v);
        EXPECT_NEAR(*v, c[key].get<double>(), 1e-12);
      }
    }
  }
}

TEST(Mcq, Examples) {
  const std::vector<std::string> abcd = {"door", "bed", "black office chair", "sofa"};
  EXPECT_EQ(match_mcq(classify_answer("B", ExtractionPath::AnswerLine), abcd), 1u);
  EXPECT_EQ(match_mcq(classify_answer("the black office chair", ExtractionPath::AnswerLine), abcd), 2u);
  const std::vector<std::string> tied = {"A red chair near door", "A red chair near bed"};
  EXPECT_FALSE(match_mcq(classify_answer("maybe A or B", ExtractionPath::FuzzyFallback), tied));
  EXPECT_FALSE(match_mcq(classify_answer("red chair near", ExtractionPath::AnswerLine), tied));
  EXPECT_FALSE(match_mcq(classify_answer("Z", ExtractionPath::AnswerLine), abcd));
}

TEST(Mcq, ThresholdIsInclusive) {
  // Dice over {wooden, chair} and {wooden, chair, left} is exactly 0.8.
  const std::vector<std::string> opts = {"wooden chair left", "sofa"};
  const auto a = classify_answer("wooden chair", ExtractionPath::AnswerLine);
  EXPECT_DOUBLE_EQ(token_set_similarity("wooden chair", "wooden chair left"), 0.8);
  EXPECT_EQ(match_mcq(a, opts), 0u);
  EXPECT_FALSE(match_mcq(a, opts, 0.81));
}

TEST(Mcq, CaseAndWhitespaceInvariance) {
  Rng rng(11);
  const std::vector<std::string> words = {"red", "chair", "table", "lamp", "black", "sofa", "desk", "wooden", "bin"};
  for (int i = 0; i < 500; ++i) {
    std::vector<std::string> options;
    const std::size_t n = testing::uniform(rng, 2, 6);
    for (std::size_t k = 0; k < n; ++k) {
      std::string o;
      for (std::size_t w = testing::uniform(rng, 1, 3); w > 0; --w) {
        if (!o.empty()) o += ' ';
        o += words[testing::uniform(rng, 0, words.size() - 1)];
      }
      options.push_back(o);
    }
    const std::string answer = options[testing::uniform(rng, 0, n - 1)];
    const auto base = match_mcq(classify_answer(answer, ExtractionPath::AnswerLine), options);

    auto shout = [&](std::string s) {
      for (auto& ch : s) {
        if (testing::coin(rng)) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
      }
      return std::string(testing::uniform(rng, 0, 3), ' ') + s + std::string(testing::uniform(rng, 0, 3), ' ');
    };
    std::vector<std::string> varied;
    for (const auto& o : options) varied.push_back(shout(o));
    const auto moved = match_mcq(classify_answer(shout(answer), ExtractionPath::AnswerLine), varied);
    EXPECT_EQ(base, moved) << answer;
  }
}

TEST(Numeric, SpecExamples) {
  EXPECT_EQ(parse_numeric(classify_answer("3.5 m", ExtractionPath::AnswerLine), Unit::Meters), 3.5);
  EXPECT_EQ(parse_numeric(classify_answer("120 cm", ExtractionPath::AnswerLine), Unit::Centimeters), 120.0);
  EXPECT_FALSE(parse_numeric(classify_answer("about four", ExtractionPath::AnswerLine), Unit::Count));
  EXPECT_EQ(parse_numeric(classify_answer("2,400 cm", ExtractionPath::AnswerLine), Unit::Centimeters), 2400.0);
  EXPECT_EQ(parse_numeric(classify_answer("12 sq m", ExtractionPath::AnswerLine), Unit::SquareMeters), 12.0);
  EXPECT_EQ(parse_numeric(classify_answer("about 3 meters", ExtractionPath::FuzzyFallback), Unit::Meters), 3.0);
  EXPECT_EQ(parse_numeric(classify_answer("1.5 m", ExtractionPath::AnswerLine), Unit::Centimeters), 150.0);
}

TEST(Mra, SpecExamples) {
  EXPECT_EQ(mra(1.0, 1.0), 1.0);
  EXPECT_EQ(mra(3.7, 3.7), 1.0);
  EXPECT_EQ(mra(1.2, 1.0), 0.6);
  EXPECT_EQ(mra(0.8, 1.0), 0.6);
  EXPECT_EQ(mra(2.0, 1.0), 0.0);
  EXPECT_EQ(mra(0.0, 1.0), 0.0);
  EXPECT_EQ(mra(1.5, 1.0), 0.0);
  EXPECT_EQ(mra(1.45, 1.0), 0.1);
  EXPECT_EQ(mra(1.04, 1.0), 1.0);
  EXPECT_EQ(mra(1.05, 1.0), 0.9);
  for (double gt : {0.0, -1.0, std::nan("")}) {
    try {
      mra(1.0, gt);
      FAIL();
    } catch (const ScoringError& e) {
      EXPECT_EQ(e.kind(), ScoringErrorKind::NonPositiveGroundTruth);
    }
  }
}

TEST(Mra, IntegerOracleIncludingBoundaries) {
  for (long g = 1; g <= 120; ++g) {
    for (long p = 0; p <= 260; ++p) {
      ASSERT_EQ(mra(static_cast<double>(p), static_cast<double>(g)), mra_oracle(p, g)) << p << " vs " << g;
    }
  }
  // rel err exactly 0.25 fails theta = 0.75 under the strict inequality.
  EXPECT_EQ(mra(125, 100), 0.5);
  EXPECT_EQ(mra(75, 100), 0.5);
}

TEST(Mra, LatticeMonotoneAndScaleInvariant) {
  Rng rng(3);
  for (int i = 0; i < 2000; ++i) {
    const double gt = testing::uniform_real(rng, 0.01, 100.0);
    std::vector<double> errs;
    for (int k = 0; k < 8; ++k) errs.push_back(testing::uniform_real(rng, 0.0, 1.2 * gt));
    std::sort(errs.begin(), errs.end());
    double prev = 1.0;
    for (double e : errs) {
      const double sign = testing::coin(rng) ? 1.0 : -1.0;
      const double v = mra(gt + sign * e, gt);
      EXPECT_EQ(v * 10.0, std::round(v * 10.0));
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
      EXPECT_LE(v, prev);
      prev = v;
    }
    const double pred = gt + testing::uniform_real(rng, -gt, gt);
    const double c = std::ldexp(1.0, static_cast<int>(testing::uniform(rng, 0, 40)) - 20);
    EXPECT_EQ(mra(c * pred, c * gt), mra(pred, gt));
  }
}

TEST(ScoreRecord, Examples) {
  const std::vector<std::string> opts = {"a", "b", "c", "d"};
  EXPECT_EQ(score_record(record(AnswerType::MCA, "rel_dir", "B", opts), classify_answer("B", ExtractionPath::AnswerLine)),
            1.0);
  EXPECT_EQ(score_record(record(AnswerType::MCA, "rel_dir", "B", opts), classify_answer("C", ExtractionPath::AnswerLine)),
            0.0);
  EXPECT_EQ(score_record(record(AnswerType::NA, "abs_dist", "4.0"), classify_answer("4.0 m", ExtractionPath::AnswerLine)),
            1.0);
  EXPECT_EQ(score_record(record(AnswerType::NA, "abs_dist", "4.0"), classify_answer("far", ExtractionPath::AnswerLine)),
            0.0);
  EXPECT_EQ(score_missing(), 0.0);
}

ScoredRecord scored(std::string task, std::string source, double s) {
  ScoredRecord r;
  r.task = std::move(task);
  r.source = std::move(source);
  r.score = s;
  return r;
}

TEST(Aggregate, Examples) {
  const std::vector<ScoredRecord> recs = {scored("obj_count", "ScanNet", 1), scored("obj_count", "ScanNet", 0),
                                          scored("rel_dir", "ARKitScenes", 1), scored("rel_dir", "ARKitScenes", 1),
                                          scored("rel_dir", "ScanNetPP", 1), scored("rel_dir", "ScanNetPP", 1)};
  const auto r = aggregate(recs);
  // Task means 0.5 and 1.0.
  EXPECT_DOUBLE_EQ(r.overall_macro, 0.75);
  EXPECT_DOUBLE_EQ(r.overall.mean(), 5.0 / 6.0);
  EXPECT_EQ(r.overall.n, 6u);
  EXPECT_EQ(r.per_task.at("obj_count").n, 2u);
  EXPECT_DOUBLE_EQ(r.per_source.at("ScanNet").mean(), 0.5);

  const std::vector<ScoredRecord> one = {scored("route", "ScanNet", 0.3)};
  const auto s = aggregate(one);
  EXPECT_DOUBLE_EQ(s.overall.mean(), 0.3);
  EXPECT_DOUBLE_EQ(s.overall_macro, 0.3);
  EXPECT_DOUBLE_EQ(s.per_task.at("route").mean(), 0.3);
  EXPECT_DOUBLE_EQ(s.per_source.at("ScanNet").mean(), 0.3);

  const auto e = aggregate({});
  EXPECT_EQ(e.overall.n, 0u);
  EXPECT_TRUE(e.per_task.empty());
  EXPECT_EQ(e.overall_macro, 0.0);
}

TEST(Aggregate, MicroMatchesBruteForce) {
  Rng rng(5);
  const std::vector<std::string> tasks = {"obj_count", "abs_dist", "route", "order", "Other-sub"};
  const std::vector<std::string> sources = {"ARKitScenes", "ScanNet", "ScanNetPP"};
  for (int i = 0; i < 200; ++i) {
    std::vector<ScoredRecord> recs;
    for (std::size_t k = testing::uniform(rng, 1, 300); k > 0; --k) {
      recs.push_back(scored(tasks[testing::uniform(rng, 0, 4)], sources[testing::uniform(rng, 0, 2)],
                            testing::uniform(rng, 0, 10) / 10.0));
    }
    const auto r = aggregate(recs);
    double sum = 0;
    for (const auto& x : recs) sum += x.score;
    EXPECT_NEAR(r.overall.mean(), sum / static_cast<double>(recs.size()), 1e-12);
    std::size_t n = 0;
    for (const auto& [k, c] : r.per_task) {
      n += c.n;
      EXPECT_GE(c.mean(), 0.0);
      EXPECT_LE(c.mean(), 1.0);
    }
    EXPECT_EQ(n, recs.size());
  }
}

TEST(Report, MarkdownColumnsAndJsonRoundTrip) {
  EXPECT_EQ(markdown_columns(), (std::vector<std::string>{"Avg.", "Obj. Cnt.", "Abs. Dist.", "Obj. Size", "Room Size",
                                                          "Rel. Dist.", "Rel. Dir.", "Route", "Order"}));
  const std::vector<ScoredRecord> recs = {scored("obj_count", "ScanNet", 1), scored("order", "ScanNetPP", 0.5),
                                          scored("custom", "unknown", 0)};
  auto r = aggregate(recs);
  r.label = "demo";
  r.notes = {"note one"};
  r.tokens.prompt = 10;
  r.tokens.completion = 5;

  const std::string md = render_markdown(r);
  EXPECT_NE(md.find("| Avg. | Obj. Cnt. | Abs. Dist. | Obj. Size | Room Size | Rel. Dist. | Rel. Dir. | Route | Order |"),
            std::string::npos)
      << md;
  EXPECT_NE(md.find("## demo"), std::string::npos);
  EXPECT_NE(md.find("custom"), std::string::npos);

  const auto back = report_from_json(report_to_json(r));
  EXPECT_EQ(back.label, r.label);
  EXPECT_EQ(back.notes, r.notes);
  EXPECT_EQ(back.overall.n, r.overall.n);
  EXPECT_DOUBLE_EQ(back.overall.sum, r.overall.sum);
  EXPECT_DOUBLE_EQ(back.overall_macro, r.overall_macro);
  ASSERT_EQ(back.per_task.size(), r.per_task.size());
  for (const auto& [k, c] : r.per_task) EXPECT_DOUBLE_EQ(back.per_task.at(k).sum, c.sum);
  EXPECT_EQ(back.per_source.size(), r.per_source.size());
  EXPECT_EQ(back.tokens.total(), 15);
  EXPECT_EQ(report_to_json(back), report_to_json(r));

  const std::string csv = render_csv(r);
  EXPECT_TRUE(csv.starts_with("group,key,score,n\noverall,micro,0.5,3\n")) << csv;

  try {
    report_from_json("{\"label\": 1");
    FAIL();
  } catch (const ScoringError& e) {
    EXPECT_EQ(e.kind(), ScoringErrorKind::BadReport);
  }
}

}  // namespace
}  // namespace tracekit::scoring
