#include "tracekit/scoring/scoring.hpp"

#include <cmath>

namespace tracekit::scoring {

namespace {

// theta_k = 0.50 + 0.05 k, so 1 - theta_k = (10 - k) / 20.
constexpr int kThresholdCount = 10;
// Relative errors this close to a threshold count as equal to it (decimal inputs like 1.2 vs 1.0).
constexpr double kBoundaryTolerance = 1e-9;

}  // namespace

double mra(double pred, double gt) {
  if (!(gt > 0.0) || !std::isfinite(gt)) {
    throw ScoringError(ScoringErrorKind::NonPositiveGroundTruth, "ground truth must be > 0");
  }
  if (!std::isfinite(pred)) return 0.0;
  const double err = 20.0 * std::abs(pred - gt);
  int hits = 0;
  for (int k = 0; k < kThresholdCount; ++k) hits += err < ((kThresholdCount - k) - kBoundaryTolerance) * gt;
  return hits / 10.0;
}

double score_record(const bench::QARecord& record, const ExtractedAnswer& ans, const ScoreOptions& opts) {
  if (record.answer_type == AnswerType::MCA) {
    const auto gt = record.gt_option();
    const auto got = match_mcq(ans, record.options, opts.fuzzy_threshold);
    return gt && got && *gt == *got ? 1.0 : 0.0;
  }
  const auto gt = record.gt_value();
  if (!gt) throw ScoringError(ScoringErrorKind::NonPositiveGroundTruth, record.id + " has no numeric ground truth");
  const auto pred = parse_numeric(ans, task_unit(record.task.kind));
  if (!pred) return 0.0;
  return mra(*pred, *gt);
}

double score_missing() { return 0.0; }

ScoreReport aggregate(std::span<const ScoredRecord> records) {
  ScoreReport r;
  for (const auto& s : records) {
    auto& t = r.per_task[s.task];
    t.sum += s.score;
    ++t.n;
    auto& src = r.per_source[s.source];
    src.sum += s.score;
    ++src.n;
    r.overall.sum += s.score;
    ++r.overall.n;
    r.tokens.prompt += s.prompt_tokens;
    r.tokens.completion += s.completion_tokens;
    r.tokens.approximate_records += s.approximate_tokens;
  }
  double macro = 0.0;
  std::size_t tasks = 0;
  for (const auto& [name, cell] : r.per_task) {
    if (!cell.n) continue;
    macro += cell.mean();
    ++tasks;
  }
  r.overall_macro = tasks ? macro / static_cast<double>(tasks) : 0.0;
  return r;
}

}  // namespace tracekit::scoring
