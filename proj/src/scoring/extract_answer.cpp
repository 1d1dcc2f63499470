#include "tracekit/scoring/scoring.hpp"

#include "tracekit/core/text.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <regex>
#include <set>

namespace tracekit::scoring {

std::string_view to_string(ScoringErrorKind k) {
  switch (k) {
    case ScoringErrorKind::EmptyOutput: return "EmptyOutput";
    case ScoringErrorKind::NonPositiveGroundTruth: return "NonPositiveGroundTruth";
    case ScoringErrorKind::BadReport: return "BadReport";
  }
  return "ScoringError";
}

ScoringError::ScoringError(ScoringErrorKind kind, const std::string& detail)
    : std::runtime_error(std::string(to_string(kind)) + ": " + detail), kind_(kind) {}

std::string_view to_string(AnswerKind k) {
  switch (k) {
    case AnswerKind::OptionLetter: return "option_letter";
    case AnswerKind::FreeText: return "free_text";
    case AnswerKind::Numeric: return "numeric";
  }
  return "free_text";
}

std::string_view to_string(ExtractionPath p) {
  switch (p) {
    case ExtractionPath::AnswerLine: return "answer_line";
    case ExtractionPath::Backticks: return "backticks";
    case ExtractionPath::FuzzyFallback: return "fuzzy_fallback";
  }
  return "fuzzy_fallback";
}

std::optional<ExtractionPath> parse_extraction_path(std::string_view s) {
  for (auto p : {ExtractionPath::AnswerLine, ExtractionPath::Backticks, ExtractionPath::FuzzyFallback}) {
    if (s == to_string(p)) return p;
  }
  return std::nullopt;
}

namespace {

bool is_fence(std::string_view line) { return text::trim(line).substr(0, 3) == "```"; }

// Contents of single-backtick spans on a line, in order.
std::vector<std::string_view> backtick_spans(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t from = 0;
  while (true) {
    const auto open = line.find('`', from);
    if (open == std::string_view::npos) break;
    const auto close = line.find('`', open + 1);
    if (close == std::string_view::npos) break;
    if (close > open + 1) out.push_back(line.substr(open + 1, close - open - 1));
    from = close + 1;
  }
  return out;
}

// Drops decoration a model wraps around a short answer: emphasis, quotes, final period.
std::string clean(std::string_view s) {
  s = text::trim(s);
  bool changed = true;
  while (changed && !s.empty()) {
    changed = false;
    for (std::string_view wrap : {"**", "__", "*", "\"", "'", "`"}) {
      if (s.size() >= 2 * wrap.size() && s.substr(0, wrap.size()) == wrap &&
          s.substr(s.size() - wrap.size()) == wrap) {
        s = text::trim(s.substr(wrap.size(), s.size() - 2 * wrap.size()));
        changed = true;
      }
    }
    if (!s.empty() && s.front() == '*') {
      const auto first = s.find_first_not_of('*');
      s = first == std::string_view::npos ? std::string_view{} : text::trim(s.substr(first));
      changed = true;
    }
  }
  while (!s.empty() && (s.back() == '.' || s.back() == '*')) s = text::trim(s.substr(0, s.size() - 1));
  return std::string(s);
}

const std::regex& number_regex() {
  static const std::regex re(R"(([-+]?(?:\d{1,3}(?:,\d{3})+|\d+)(?:\.\d+)?|[-+]?\.\d+))");
  return re;
}

enum class Suffix { None, Meters, Centimeters, Millimeters, SquareMeters, Unknown };

Suffix suffix_of(std::string_view rest) {
  std::string s = text::to_lower(text::trim(rest));
  while (!s.empty() && (s.back() == '.' || s.back() == ')')) s.pop_back();
  s = std::string(text::trim(s));
  if (s.empty()) return Suffix::None;
  static const std::pair<std::string_view, Suffix> kUnits[] = {
      {"m^2", Suffix::SquareMeters},          {"m2", Suffix::SquareMeters},
      {"m\xC2\xB2", Suffix::SquareMeters},    {"sq m", Suffix::SquareMeters},
      {"sq. m", Suffix::SquareMeters},        {"sqm", Suffix::SquareMeters},
      {"square meters", Suffix::SquareMeters}, {"square meter", Suffix::SquareMeters},
      {"square metres", Suffix::SquareMeters}, {"cm", Suffix::Centimeters},
      {"centimeters", Suffix::Centimeters},   {"centimetres", Suffix::Centimeters},
      {"centimeter", Suffix::Centimeters},    {"mm", Suffix::Millimeters},
      {"millimeters", Suffix::Millimeters},   {"m", Suffix::Meters},
      {"meters", Suffix::Meters},             {"metres", Suffix::Meters},
      {"meter", Suffix::Meters},
  };
  for (const auto& [name, unit] : kUnits) {
    if (s == name) return unit;
  }
  return Suffix::Unknown;
}

std::optional<double> to_double(std::string digits) {
  digits.erase(std::remove(digits.begin(), digits.end(), ','), digits.end());
  return text::parse_double(digits);
}

}  // namespace

ExtractedAnswer classify_answer(std::string_view raw_in, ExtractionPath path) {
  ExtractedAnswer a;
  a.raw = clean(raw_in);
  a.path = path;
  static const std::regex kLetter(R"(^\(?([A-Za-z])\)?[.):]?$)");
  std::smatch m;
  if (std::regex_match(a.raw, m, kLetter)) {
    a.kind = AnswerKind::OptionLetter;
    a.matched_option = text::to_upper(m[1].str());
    return a;
  }
  if (std::regex_match(a.raw, m, number_regex()) ||
      (std::regex_search(a.raw, m, number_regex()) && m.position(0) == 0 &&
       suffix_of(a.raw.substr(static_cast<std::size_t>(m.length(0)))) != Suffix::Unknown)) {
    if (auto v = to_double(m[1].str()); v && std::isfinite(*v)) {
      a.kind = AnswerKind::Numeric;
      a.numeric_value = *v;
      return a;
    }
  }
  a.kind = AnswerKind::FreeText;
  return a;
}

ExtractedAnswer extract_answer(std::string_view output) {
  if (text::trim(output).empty()) throw ScoringError(ScoringErrorKind::EmptyOutput, "model output is blank");
  const auto lines = text::split_lines(output);

  for (std::size_t i = lines.size(); i-- > 0;) {
    const auto payload = text::answer_line_payload(lines[i]);
    if (!payload) continue;
    const auto spans = backtick_spans(*payload);
    if (!spans.empty()) return classify_answer(spans.front(), ExtractionPath::AnswerLine);
    if (!clean(*payload).empty()) return classify_answer(*payload, ExtractionPath::AnswerLine);
    for (std::size_t j = i + 1; j < lines.size(); ++j) {
      if (!clean(lines[j]).empty() && !is_fence(lines[j])) {
        return classify_answer(lines[j], ExtractionPath::AnswerLine);
      }
    }
  }

  bool in_fence = false;
  std::optional<std::string_view> last_span;
  for (auto line : lines) {
    if (is_fence(line)) {
      in_fence = !in_fence;
      continue;
    }
    if (in_fence) continue;
    const auto spans = backtick_spans(line);
    if (!spans.empty()) last_span = spans.back();
  }
  if (last_span) return classify_answer(*last_span, ExtractionPath::Backticks);

  for (std::size_t i = lines.size(); i-- > 0;) {
    if (!text::trim(lines[i]).empty() && !is_fence(lines[i])) {
      return classify_answer(lines[i], ExtractionPath::FuzzyFallback);
    }
  }
  throw ScoringError(ScoringErrorKind::EmptyOutput, "model output has no answer text");
}

std::vector<std::string> answer_tokens(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty() && cur != "a" && cur != "an" && cur != "the") out.push_back(cur);
    cur.clear();
  };
  for (char c : s) {
    const auto uc = static_cast<unsigned char>(c);
    if (std::isalnum(uc) || uc >= 0x80) {
      cur.push_back(static_cast<char>(std::tolower(uc)));
    } else {
      flush();
    }
  }
  flush();
  return out;
}

double token_set_similarity(std::string_view a, std::string_view b) {
  const auto ta = answer_tokens(a), tb = answer_tokens(b);
  const std::set<std::string> sa(ta.begin(), ta.end()), sb(tb.begin(), tb.end());
  if (sa.empty() && sb.empty()) return 0.0;
  std::size_t common = 0;
  for (const auto& t : sa) common += sb.count(t);
  return 2.0 * static_cast<double>(common) / static_cast<double>(sa.size() + sb.size());
}

std::optional<std::size_t> match_mcq(const ExtractedAnswer& ans, std::span<const std::string> options,
                                     double threshold) {
  const std::string raw = clean(ans.raw);
  static const std::regex kLetterLead(R"(^(?:option\s*)?\(?([A-Za-z])\)?(?:$|[.):]\s*(.*)$))",
                                      std::regex::icase);
  std::smatch m;
  if (std::regex_match(raw, m, kLetterLead)) {
    const auto idx = static_cast<std::size_t>(std::toupper(static_cast<unsigned char>(m[1].str()[0])) - 'A');
    if (idx < options.size()) return idx;
  }
  for (std::size_t i = 0; i < options.size(); ++i) {
    if (text::iequals(raw, clean(options[i]))) return i;
  }
  double best = -1.0;
  std::optional<std::size_t> best_index;
  bool tie = false;
  for (std::size_t i = 0; i < options.size(); ++i) {
    const double s = token_set_similarity(raw, options[i]);
    if (s > best) {
      best = s;
      best_index = i;
      tie = false;
    } else if (s == best) {
      tie = true;
    }
  }
  if (best_index && !tie && best >= threshold) return best_index;
  return std::nullopt;
}

std::optional<double> parse_numeric(const ExtractedAnswer& ans, Unit target) {
  std::smatch m;
  const std::string& raw = ans.raw;
  if (!std::regex_search(raw, m, number_regex())) return std::nullopt;
  auto v = to_double(m[1].str());
  if (!v || !std::isfinite(*v)) return std::nullopt;
  std::string rest = raw.substr(static_cast<std::size_t>(m.position(0) + m.length(0)));
  // Only the word immediately after the number can be its unit.
  static const std::regex kUnitHead(R"(^\s*(square\s+met(?:er|re)s?|sq\.?\s*m|m\^2|m\xC2\xB2|[A-Za-z]+))");
  std::smatch u;
  Suffix suffix = Suffix::None;
  if (std::regex_search(rest, u, kUnitHead)) {
    suffix = suffix_of(u[1].str());
  }
  double value = *v;
  if (target == Unit::Meters) {
    if (suffix == Suffix::Centimeters) value /= 100.0;
    if (suffix == Suffix::Millimeters) value /= 1000.0;
  } else if (target == Unit::Centimeters) {
    if (suffix == Suffix::Meters) value *= 100.0;
    if (suffix == Suffix::Millimeters) value /= 10.0;
  }
  return value;
}

}  // namespace tracekit::scoring
