#pragma once

// Answer extraction, MCQ matching, numeric parsing, MRA and aggregation.

#include "tracekit/bench/bench.hpp"
#include "tracekit/core/task.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tracekit::scoring {

enum class ScoringErrorKind { EmptyOutput, NonPositiveGroundTruth, BadReport };

std::string_view to_string(ScoringErrorKind k);

class ScoringError : public std::runtime_error {
 public:
  ScoringError(ScoringErrorKind kind, const std::string& detail);
  ScoringErrorKind kind() const noexcept { return kind_; }

 private:
  ScoringErrorKind kind_;
};

enum class AnswerKind { OptionLetter, FreeText, Numeric };
enum class ExtractionPath { AnswerLine, Backticks, FuzzyFallback };

std::string_view to_string(AnswerKind k);
std::string_view to_string(ExtractionPath p);
std::optional<ExtractionPath> parse_extraction_path(std::string_view s);

struct ExtractedAnswer {
  std::string raw;
  AnswerKind kind = AnswerKind::FreeText;
  std::optional<double> numeric_value;
  std::optional<std::string> matched_option;  // upper-case letter when kind is OptionLetter
  ExtractionPath path = ExtractionPath::FuzzyFallback;
};

// Precedence: last "Answer:" line (backtick content, else the rest of the line, else the
// next non-empty line), then the last backtick span outside code fences, then the last
// non-empty line. Throws ScoringError(EmptyOutput) on blank input.
ExtractedAnswer extract_answer(std::string_view text);

// Classifies an already-isolated answer string.
ExtractedAnswer classify_answer(std::string_view raw, ExtractionPath path);

inline constexpr double kFuzzyThreshold = 0.8;

// Tokens: lower-case alphanumeric runs, articles dropped.
std::vector<std::string> answer_tokens(std::string_view s);
// Dice coefficient over token sets.
double token_set_similarity(std::string_view a, std::string_view b);

// (1) option letter, (2) case-insensitive option text, (3) fuzzy similarity >= threshold
// with a unique best option. Returns the option index.
std::optional<std::size_t> match_mcq(const ExtractedAnswer& ans, std::span<const std::string> options,
                                     double threshold = kFuzzyThreshold);

// First numeral in the answer, unit suffix stripped, converted into `target` when the
// suffix names a different length unit.
std::optional<double> parse_numeric(const ExtractedAnswer& ans, Unit target);

// Mean over theta in {0.50, 0.55, ..., 0.95} of [ |pred - gt| / gt < 1 - theta ].
double mra(double pred, double gt);

struct ScoreOptions {
  double fuzzy_threshold = kFuzzyThreshold;
};

double score_record(const bench::QARecord& record, const ExtractedAnswer& ans, const ScoreOptions& opts = {});
// Same, for runs whose reply yielded nothing (error tag): always 0.
double score_missing();

struct ScoredRecord {
  std::string id;
  std::string task;    // canonical task name
  std::string source;  // stratification tag
  double score = 0.0;
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;
  bool approximate_tokens = false;
};

struct Cell {
  double sum = 0.0;
  std::size_t n = 0;
  double mean() const { return n ? sum / static_cast<double>(n) : 0.0; }
};

struct TokenTotals {
  std::int64_t prompt = 0;
  std::int64_t completion = 0;
  std::size_t approximate_records = 0;
  std::int64_t total() const { return prompt + completion; }
};

struct ScoreReport {
  std::string label;                  // run name shown in rendered reports
  std::vector<std::string> notes;     // e.g. artifact-extension labels
  std::map<std::string, Cell> per_task;
  std::map<std::string, Cell> per_source;
  Cell overall;                       // question-weighted (micro)
  double overall_macro = 0.0;         // unweighted mean over tasks with n > 0
  TokenTotals tokens;
};

ScoreReport aggregate(std::span<const ScoredRecord> records);

// Serialized forms. JSON round-trips through report_from_json.
std::string report_to_json(const ScoreReport& r);
ScoreReport report_from_json(std::string_view json);
std::string render_markdown(const ScoreReport& r);
std::string render_csv(const ScoreReport& r);

// Column headers of the main markdown table.
std::vector<std::string> markdown_columns();

}  // namespace tracekit::scoring
