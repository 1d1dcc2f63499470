#include "tracekit/scoring/scoring.hpp"

#include "tracekit/core/text.hpp"

#include "json.hpp"

#include <array>
#include <cstdio>

namespace tracekit::scoring {

using nlohmann::json;

namespace {

constexpr std::array<std::string_view, 3> kSources = {"ARKitScenes", "ScanNet", "ScanNetPP"};

json cell_json(const Cell& c) { return json{{"score", c.mean()}, {"sum", c.sum}, {"n", c.n}}; }

Cell cell_from(const json& j) {
  Cell c;
  c.n = j.at("n").get<std::size_t>();
  c.sum = j.contains("sum") ? j.at("sum").get<double>() : j.at("score").get<double>() * static_cast<double>(c.n);
  return c;
}

std::string percent(const Cell& c) {
  if (!c.n) return "-";
  std::array<char, 32> buf{};
  std::snprintf(buf.data(), buf.size(), "%.2f", c.mean() * 100.0);
  return buf.data();
}

std::string percent(double v) {
  std::array<char, 32> buf{};
  std::snprintf(buf.data(), buf.size(), "%.2f", v * 100.0);
  return buf.data();
}

Cell lookup(const std::map<std::string, Cell>& m, std::string_view key) {
  auto it = m.find(std::string(key));
  return it == m.end() ? Cell{} : it->second;
}

std::string row(const std::vector<std::string>& cells) {
  std::string out = "|";
  for (const auto& c : cells) out += " " + c + " |";
  return out + "\n";
}

std::string rule(std::size_t n) {
  std::string out = "|";
  for (std::size_t i = 0; i < n; ++i) out += "---|";
  return out + "\n";
}

bool is_vsi_task(const std::string& name) {
  for (TaskKind k : kVsiTasks) {
    if (task_name(k) == name) return true;
  }
  return false;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::vector<std::string> markdown_columns() {
  std::vector<std::string> cols = {"Avg."};
  for (TaskKind k : kVsiTasks) cols.emplace_back(task_column(k));
  return cols;
}

std::string report_to_json(const ScoreReport& r) {
  json j;
  j["label"] = r.label;
  j["notes"] = r.notes;
  j["overall_micro"] = r.overall.mean();
  j["overall_macro"] = r.overall_macro;
  j["n"] = r.overall.n;
  j["overall"] = cell_json(r.overall);
  j["per_task"] = json::object();
  for (const auto& [k, c] : r.per_task) j["per_task"][k] = cell_json(c);
  j["per_source"] = json::object();
  for (const auto& [k, c] : r.per_source) j["per_source"][k] = cell_json(c);
  j["tokens"] = {{"prompt", r.tokens.prompt},
                 {"completion", r.tokens.completion},
                 {"total", r.tokens.total()},
                 {"approximate_records", r.tokens.approximate_records}};
  return j.dump(2) + "\n";
}

ScoreReport report_from_json(std::string_view text) {
  try {
    const json j = json::parse(text);
    ScoreReport r;
    r.label = j.value("label", "");
    if (j.contains("notes")) r.notes = j.at("notes").get<std::vector<std::string>>();
    r.overall = cell_from(j.at("overall"));
    r.overall_macro = j.at("overall_macro").get<double>();
    for (const auto& [k, v] : j.at("per_task").items()) r.per_task[k] = cell_from(v);
    for (const auto& [k, v] : j.at("per_source").items()) r.per_source[k] = cell_from(v);
    if (j.contains("tokens")) {
      const auto& t = j.at("tokens");
      r.tokens.prompt = t.value("prompt", std::int64_t{0});
      r.tokens.completion = t.value("completion", std::int64_t{0});
      r.tokens.approximate_records = t.value("approximate_records", std::size_t{0});
    }
    return r;
  } catch (const json::exception& e) {
    throw ScoringError(ScoringErrorKind::BadReport, e.what());
  }
}

std::string render_markdown(const ScoreReport& r) {
  std::string out;
  out += "## " + (r.label.empty() ? std::string("Results") : r.label) + "\n\n";
  for (const auto& n : r.notes) out += "> " + n + "\n";
  if (!r.notes.empty()) out += "\n";

  const auto cols = markdown_columns();
  out += row(cols);
  out += rule(cols.size());
  std::vector<std::string> cells = {percent(r.overall)};
  for (TaskKind k : kVsiTasks) cells.push_back(percent(lookup(r.per_task, task_name(k))));
  out += row(cells);

  std::vector<std::string> extra;
  for (const auto& [name, cell] : r.per_task) {
    if (!is_vsi_task(name)) extra.push_back(name);
  }
  if (!extra.empty()) {
    out += "\n### Other tasks\n\n";
    out += row(extra);
    out += rule(extra.size());
    std::vector<std::string> vals;
    for (const auto& name : extra) vals.push_back(percent(lookup(r.per_task, name)));
    out += row(vals);
  }

  out += "\n### Stratified by source\n\n";
  std::vector<std::string> scols = {"Avg."};
  for (auto s : kSources) scols.emplace_back(s);
  out += row(scols);
  out += rule(scols.size());
  std::vector<std::string> svals = {percent(r.overall)};
  for (auto s : kSources) svals.push_back(percent(lookup(r.per_source, s)));
  out += row(svals);

  out += "\nOverall: micro " + percent(r.overall) + ", macro " + percent(r.overall_macro) + " over " +
         std::to_string(r.overall.n) + " questions.\n";
  out += "Tokens: " + std::to_string(r.tokens.prompt) + " prompt + " + std::to_string(r.tokens.completion) +
         " completion = " + std::to_string(r.tokens.total());
  if (r.tokens.approximate_records) {
    out += " (" + std::to_string(r.tokens.approximate_records) + " records estimated)";
  }
  out += ".\n";
  return out;
}

std::string render_csv(const ScoreReport& r) {
  std::string out = "group,key,score,n\n";
  auto add = [&out](const std::string& group, const std::string& key, const Cell& c) {
    out += group + "," + csv_field(key) + "," + text::format_shortest(c.mean()) + "," + std::to_string(c.n) + "\n";
  };
  add("overall", "micro", r.overall);
  out += "overall,macro," + text::format_shortest(r.overall_macro) + "," + std::to_string(r.overall.n) + "\n";
  for (const auto& [k, c] : r.per_task) add("task", k, c);
  for (const auto& [k, c] : r.per_source) add("source", k, c);
  return out;
}

}  // namespace tracekit::scoring
