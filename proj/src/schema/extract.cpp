#include "tracekit/schema/trace.hpp"

#include "tracekit/core/text.hpp"

namespace tracekit::schema {

namespace {

constexpr std::string_view kHeader = "structured textual allocentric representation";

bool is_fence(std::string_view line) { return text::trim(line).substr(0, 3) == "```"; }

std::optional<std::size_t> find_header(const std::vector<std::string_view>& lines) {
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (text::to_lower(lines[i]).find(kHeader) != std::string::npos) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> last_answer_line(const std::vector<std::string_view>& lines) {
  for (std::size_t i = lines.size(); i-- > 0;) {
    if (text::answer_line_payload(lines[i])) return i;
  }
  return std::nullopt;
}

// Contents of the first fenced block in [begin, end); an unclosed fence runs to `end`.
std::optional<std::pair<std::size_t, std::size_t>> first_fence(
    const std::vector<std::string_view>& lines, std::size_t begin, std::size_t end) {
  for (std::size_t i = begin; i < end; ++i) {
    if (!is_fence(lines[i])) continue;
    for (std::size_t j = i + 1; j < end; ++j) {
      if (is_fence(lines[j])) return std::pair{i + 1, j};
    }
    return std::pair{i + 1, end};
  }
  return std::nullopt;
}

std::optional<std::string> collect(const std::vector<std::string_view>& lines, std::size_t begin,
                                   std::size_t end, std::string_view head = {}) {
  std::vector<std::string_view> kept;
  if (!text::trim(head).empty()) kept.push_back(text::trim(head));
  for (std::size_t i = begin; i < end; ++i) kept.push_back(lines[i]);
  while (!kept.empty() && text::trim(kept.front()).empty()) kept.erase(kept.begin());
  while (!kept.empty() && text::trim(kept.back()).empty()) kept.pop_back();
  if (kept.empty()) return std::nullopt;
  std::string out;
  for (std::size_t i = 0; i < kept.size(); ++i) {
    if (i) out += '\n';
    out += kept[i];
  }
  return out;
}

}  // namespace

std::optional<std::string> extract_trace_block(std::string_view model_output) {
  const auto lines = text::split_lines(model_output);
  const auto answer = last_answer_line(lines);

  if (auto header = find_header(lines)) {
    const std::size_t begin = *header + 1;
    const std::size_t end = (answer && *answer > *header) ? *answer : lines.size();
    if (begin > end) return std::nullopt;
    if (auto fence = first_fence(lines, begin, end)) {
      return collect(lines, fence->first, fence->second);
    }
    // Anything written after the header's colon on the same line belongs to the block.
    std::string_view header_line = lines[*header];
    std::string_view tail;
    const std::string lowered = text::to_lower(header_line);
    const std::size_t at = lowered.find(kHeader);
    const std::size_t colon = header_line.find(':', at + kHeader.size());
    if (colon != std::string_view::npos) tail = header_line.substr(colon + 1);
    tail = text::trim(tail);
    while (!tail.empty() && (tail.front() == '*' || tail.front() == '_')) tail.remove_prefix(1);
    return collect(lines, begin, end, tail);
  }

  const std::size_t end = answer ? *answer : lines.size();
  if (auto fence = first_fence(lines, 0, lines.size())) {
    return collect(lines, fence->first, fence->second);
  }
  for (std::size_t i = 0; i < end; ++i) {
    if (text::starts_with_icase(text::trim(lines[i]), "meta_context")) {
      return collect(lines, i, end);
    }
  }
  return std::nullopt;
}

}  // namespace tracekit::schema
