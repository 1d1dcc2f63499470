#include "tracekit/oracle/spatial_oracle.hpp"

#include "tracekit/core/text.hpp"

#include <regex>

namespace tracekit::oracle {

namespace {

std::optional<std::smatch> search(const std::string& q, const std::regex& re) {
  std::smatch m;
  if (std::regex_search(q, m, re)) return m;
  return std::nullopt;
}

std::string cap(const std::smatch& m, std::size_t i) { return std::string(text::trim(m[i].str())); }

std::vector<std::string> list_of(std::string_view s) {
  std::string joined(s);
  static const std::regex kAnd(R"(,?\s+and\s+)");
  joined = std::regex_replace(joined, kAnd, ", ");
  std::vector<std::string> out;
  for (auto& part : text::split(joined, ',')) {
    std::string t(text::trim(part));
    if (!t.empty()) out.push_back(t);
  }
  return out;
}

// Substitutes the option's comma-separated turns into the "[please fill in]" blanks.
std::string fill_route(const std::string& steps, const std::string& option) {
  static const std::string kBlank = "[please fill in]";
  const auto turns = text::split(option, ',');
  std::string out;
  std::size_t from = 0, used = 0;
  for (std::size_t at = steps.find(kBlank); at != std::string::npos; at = steps.find(kBlank, from)) {
    out += steps.substr(from, at - from);
    out += used < turns.size() ? std::string(text::trim(turns[used])) : kBlank;
    ++used;
    from = at + kBlank.size();
  }
  out += steps.substr(from);
  return out;
}

}  // namespace

std::optional<OracleQuery> query_from_question(TaskKind task, std::string_view question,
                                               std::span<const std::string> options) {
  const std::string q(text::trim(question));
  OracleQuery out;
  out.task = task;
  out.options.assign(options.begin(), options.end());
  constexpr auto icase = std::regex::icase;

  switch (task) {
    case TaskKind::ObjCount: {
      static const std::regex re(R"(how many\s+(.+?)(?:\(s\)|\(es\))?\s+(?:are|is|were)\b)", icase);
      auto m = search(q, re);
      if (!m) return std::nullopt;
      out.subjects = {cap(*m, 1)};
      return out;
    }
    case TaskKind::AbsDist: {
      static const std::regex re(R"(between the\s+(.+?)\s+and the\s+(.+?)\s*(?:\(|\?|,|$))", icase);
      auto m = search(q, re);
      if (!m) return std::nullopt;
      out.subjects = {cap(*m, 1), cap(*m, 2)};
      return out;
    }
    case TaskKind::ObjSize: {
      static const std::regex re(R"(^.*\bof the\s+([^,?()]+?)\s*(?:,|\?|\(in|measured))", icase);
      static const std::regex longest(R"(longest dimension\s*\([^)]*\)\s*)", icase);
      const std::string stripped = std::regex_replace(q, longest, "longest dimension ");
      auto m = search(stripped, re);
      if (!m) return std::nullopt;
      out.subjects = {cap(*m, 1)};
      return out;
    }
    case TaskKind::RoomSize: return out;
    case TaskKind::RelDist: {
      static const std::regex re(R"(closest to the\s+(.+?)\s*\?)", icase);
      auto m = search(q, re);
      if (!m || out.options.empty()) return std::nullopt;
      out.subjects = {cap(*m, 1)};
      return out;
    }
    case TaskKind::RelDir: {
      static const std::regex re(
          R"(standing by the\s+(.+?)\s+and facing the\s+(.+?),\s*is the\s+(.+?)\s+to\s+(?:my|the)\b)", icase);
      auto m = search(q, re);
      if (!m) return std::nullopt;
      out.subjects = {cap(*m, 1), cap(*m, 2), cap(*m, 3)};
      return out;
    }
    case TaskKind::Route: {
      static const std::regex start(R"(beginning at the\s+(.+?)\s+(?:and\s+)?facing the\s+(.+?)\s*[.,])", icase);
      static const std::regex steps(R"(\)\s*:\s*(.+?)\s*(?:you have reached|$))", icase);
      auto m = search(q, start);
      auto s = search(q, steps);
      if (!m || !s || out.options.empty()) return std::nullopt;
      out.subjects = {cap(*m, 1), cap(*m, 2)};
      const std::string tmpl = cap(*s, 1);
      for (auto& o : out.options) o = fill_route(tmpl, o);
      return out;
    }
    case TaskKind::Order: {
      static const std::regex re(R"(following categories[^:]*:\s*(.+?)\s*\?)", icase);
      auto m = search(q, re);
      if (!m) return std::nullopt;
      out.subjects = list_of(cap(*m, 1));
      if (out.subjects.empty()) return std::nullopt;
      return out;
    }
    case TaskKind::Other: break;
  }
  return std::nullopt;
}

}  // namespace tracekit::oracle
