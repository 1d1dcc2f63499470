#include "tracekit/bench/bench.hpp"

#include "tracekit/core/text.hpp"

#include "json.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <regex>

namespace tracekit::bench {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

bool is_video_path(const fs::path& p) {
  const std::string ext = text::to_lower(p.extension().string());
  return ext == ".mp4" || ext == ".mov" || ext == ".avi" || ext == ".mkv" || ext == ".webm";
}

std::string scalar_text(const json& v) {
  if (v.is_string()) return std::string(text::trim(v.get<std::string>()));
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number()) return text::format_shortest(v.get<double>());
  return {};
}

// "B. sofa" -> "sofa"
std::string strip_option_label(const std::string& s) {
  static const std::regex kLabel(R"(^\s*\(?[A-Z][.)]\s+)");
  return std::string(text::trim(std::regex_replace(s, kLabel, "", std::regex_constants::format_first_only)));
}

fs::path resolve(const fs::path& root, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() || root.empty() ? path : root / path;
}

}  // namespace

QARecord parse_record(std::string_view json_line, std::size_t line, const LoadOptions& opts,
                      std::vector<std::string>* warnings) {
  auto fail = [line](const std::string& msg) { throw BenchError(BenchErrorKind::SchemaError, line, msg); };
  auto warn = [&](const std::string& msg) {
    if (warnings) warnings->push_back("line " + std::to_string(line) + ": " + msg);
  };

  json j;
  try {
    j = json::parse(json_line);
  } catch (const json::parse_error& e) {
    fail(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) fail("record is not a JSON object");

  auto field = [&](const char* key) -> std::string {
    if (!j.contains(key) || j[key].is_null()) fail(std::string("missing field '") + key + "'");
    std::string v = scalar_text(j[key]);
    if (v.empty()) fail(std::string("field '") + key + "' is empty or not a scalar");
    return v;
  };

  QARecord r;
  r.id = field("id");
  const auto bench = parse_benchmark(field("benchmark"));
  if (!bench) fail("unknown benchmark '" + scalar_text(j["benchmark"]) + "'");
  r.benchmark = *bench;
  r.scene_id = field("scene_id");
  r.task = Task::from_string(field("task"));
  const auto at = parse_answer_type(field("answer_type"));
  if (!at) fail("answer_type must be NA or MCA");
  r.answer_type = *at;
  if (!j.contains("question") || !j["question"].is_string()) fail("missing field 'question'");
  r.question = j["question"].get<std::string>();

  if (j.contains("options") && !j["options"].is_null()) {
    if (!j["options"].is_array()) fail("options must be an array");
    for (const auto& o : j["options"]) {
      const std::string text = scalar_text(o);
      if (text.empty()) fail("options entries must be non-empty strings");
      r.options.push_back(strip_option_label(text));
    }
  }

  r.ground_truth = field("ground_truth");
  if (r.answer_type == AnswerType::MCA) {
    std::string gt = r.ground_truth;
    if (gt.size() >= 2 && (gt[1] == '.' || gt[1] == ')') && std::isalpha(static_cast<unsigned char>(gt[0]))) {
      gt = gt.substr(0, 1);
    }
    if (gt.size() == 1) {
      r.ground_truth = text::to_upper(gt);
    } else {
      const auto it = std::find_if(r.options.begin(), r.options.end(),
                                   [&](const std::string& o) { return text::iequals(o, gt); });
      if (it != r.options.end()) {
        r.ground_truth = std::string(1, static_cast<char>('A' + (it - r.options.begin())));
      }
    }
  }

  if (j.contains("turn_index") && !j["turn_index"].is_null()) {
    if (!j["turn_index"].is_number_integer()) fail("turn_index must be an integer");
    r.turn_index = j["turn_index"].get<int>();
  }

  // media: list of files, a frame directory / video path, or absent (scene folder under media_root).
  try {
    const json media = j.contains("media") ? j["media"] : json();
    if (media.is_array()) {
      for (const auto& m : media) {
        if (!m.is_string()) fail("media entries must be strings");
        const fs::path p = resolve(opts.media_root, m.get<std::string>());
        if (!fs::exists(p)) warn("MissingMedia: " + p.string());
        r.media.push_back(MediaRef{p.string(), is_video_path(p)});
      }
    } else if (media.is_string()) {
      const fs::path p = resolve(opts.media_root, media.get<std::string>());
      if (fs::is_directory(p)) {
        r.media = frame_manifest(p.parent_path(), p.filename().string(), opts.frames);
      } else {
        if (!fs::exists(p)) warn("MissingMedia: " + p.string());
        r.media.push_back(MediaRef{p.string(), is_video_path(p)});
      }
    } else if (media.is_null()) {
      r.media = frame_manifest(opts.media_root, r.scene_id, opts.frames);
    } else {
      fail("media must be a list, a string or absent");
    }
  } catch (const BenchError& e) {
    if (e.kind() != BenchErrorKind::MissingMedia) throw;
    warn(e.what());
  }

  r.source = stratify_source(r, opts.sources);
  if (r.benchmark == Benchmark::VSI && r.source == kUnknownSource) warn("UnknownSource: " + r.scene_id);
  try {
    check_record(r);
  } catch (const BenchError& e) {
    throw BenchError(BenchErrorKind::SchemaError, line, e.what());
  }
  return r;
}

namespace {

template <class F>
void for_each_line(const std::string& path, F&& f) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw BenchError(BenchErrorKind::Io, std::nullopt, "cannot open " + path);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::trim(line).empty()) continue;
    f(line, n);
  }
}

}  // namespace

LoadResult load_vsi(const std::string& path, const LoadOptions& opts) {
  LoadResult out;
  for_each_line(path, [&](const std::string& line, std::size_t n) {
    out.records.push_back(parse_record(line, n, opts, &out.warnings));
  });
  return out;
}

OstLoadResult load_ost(const std::string& path, const LoadOptions& opts) {
  OstLoadResult out;
  std::map<std::string, std::size_t> index;
  std::vector<std::vector<std::pair<QARecord, std::size_t>>> grouped;
  for_each_line(path, [&](const std::string& line, std::size_t n) {
    QARecord r = parse_record(line, n, opts, &out.warnings);
    if (!r.turn_index) throw BenchError(BenchErrorKind::SchemaError, n, "dialogue record without turn_index");
    auto [it, inserted] = index.emplace(r.scene_id, grouped.size());
    if (inserted) {
      grouped.emplace_back();
      out.scenes.push_back(DialogueScene{r.scene_id, {}});
    }
    grouped[it->second].emplace_back(std::move(r), n);
  });
  for (std::size_t s = 0; s < grouped.size(); ++s) {
    auto& turns = grouped[s];
    std::stable_sort(turns.begin(), turns.end(),
                     [](const auto& a, const auto& b) { return *a.first.turn_index < *b.first.turn_index; });
    for (std::size_t i = 0; i < turns.size(); ++i) {
      const int t = *turns[i].first.turn_index;
      if (t != static_cast<int>(i)) {
        throw BenchError(BenchErrorKind::SchemaError, turns[i].second,
                         "scene '" + out.scenes[s].scene_id + "' turn " + std::to_string(t) +
                             (t < static_cast<int>(i) ? " is duplicated" : " leaves a gap at turn " + std::to_string(i)));
      }
      out.scenes[s].turns.push_back(DialogueTurn{t, std::move(turns[i].first)});
    }
  }
  return out;
}

std::vector<std::string> load_categories(const std::string& path, std::string_view benchmark) {
  const std::string content = text::read_file(path);
  for (auto raw : text::split_lines(content)) {
    auto line = text::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos || !text::iequals(text::trim(line.substr(0, eq)), benchmark)) continue;
    std::vector<std::string> out;
    for (auto& c : text::split(line.substr(eq + 1), ',')) {
      std::string t(text::trim(c));
      if (!t.empty()) out.push_back(t);
    }
    return out;
  }
  return {};
}

}  // namespace tracekit::bench
