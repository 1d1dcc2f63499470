#include "tracekit/schema/trace.hpp"

#include "tracekit/core/text.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <functional>
#include <map>
#include <utility>

namespace tracekit::schema {

std::string_view to_string(ParseErrorKind k) {
  switch (k) {
    case ParseErrorKind::MissingSection: return "MissingSection";
    case ParseErrorKind::MalformedItem: return "MalformedItem";
    case ParseErrorKind::BadNumber: return "BadNumber";
    case ParseErrorKind::BadFacing: return "BadFacing";
    case ParseErrorKind::MalformedDocument: return "MalformedDocument";
  }
  return "MalformedDocument";
}

namespace {

std::string format_location(const std::string& section, std::optional<std::size_t> index) {
  if (!index) return section;
  return section + "[" + std::to_string(*index) + "]";
}

}  // namespace

ParseError::ParseError(ParseErrorKind kind, std::string section, std::optional<std::size_t> index,
                       std::string detail)
    : std::runtime_error(std::string(to_string(kind)) +
                         (section.empty() ? std::string() : " at " + format_location(section, index)) +
                         (detail.empty() ? std::string() : ": " + detail)),
      kind_(kind),
      section_(std::move(section)),
      index_(index) {}

std::string ParseError::location() const { return format_location(section_, index_); }

namespace {

constexpr const char* kMeta = "Meta_Context";
constexpr const char* kTrajectory = "Trajectory";
constexpr const char* kEntities = "Entity_Registry";

// "Entity Registry", "entity-registry", "ENTITY_REGISTRY" all normalize to "entity_registry".
std::string normalize_key(std::string_view key) {
  std::string out;
  for (char c : text::trim(key)) {
    if (c == ' ' || c == '-') c = '_';
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

std::string describe(const YAML::Node& n) {
  if (!n || n.IsNull()) return "null";
  if (n.IsScalar()) return "'" + n.Scalar() + "'";
  if (n.IsSequence()) return "a list";
  return "a mapping";
}

class ItemReader {
 public:
  ItemReader(const YAML::Node& node, std::string section, std::optional<std::size_t> index,
             std::vector<ParseWarning>& warnings)
      : section_(std::move(section)), index_(index), warnings_(warnings) {
    if (!node.IsMap()) {
      throw ParseError(ParseErrorKind::MalformedItem, section_, index_,
                       "expected a mapping, got " + describe(node));
    }
    for (auto it = node.begin(); it != node.end(); ++it) {
      if (!it->first.IsScalar()) {
        warn("", "ignoring non-scalar key");
        continue;
      }
      fields_.emplace(normalize_key(it->first.Scalar()), Field{it->first.Scalar(), it->second});
    }
  }

  // Warns for every key not in `known`, preserving its value in the message.
  void report_unknown(std::initializer_list<std::string_view> known) {
    for (const auto& [key, field] : fields_) {
      bool found = false;
      for (auto k : known) found = found || key == k;
      if (found) continue;
      std::string value = field.node.IsScalar() ? field.node.Scalar() : describe(field.node);
      warn(field.original, "unknown key '" + field.original + "' = " + value);
    }
  }

  const YAML::Node* find(std::string_view key) const {
    auto it = fields_.find(std::string(key));
    if (it == fields_.end() || !it->second.node || it->second.node.IsNull()) return nullptr;
    return &it->second.node;
  }

  const YAML::Node& require(std::string_view key) const {
    const YAML::Node* n = find(key);
    if (!n) {
      throw ParseError(ParseErrorKind::MalformedItem, section_, index_,
                       "missing key '" + std::string(key) + "'");
    }
    return *n;
  }

  std::string text_of(std::string_view key, const YAML::Node& n) const {
    if (!n.IsScalar()) {
      throw ParseError(ParseErrorKind::MalformedItem, section_, index_,
                       "key '" + std::string(key) + "' must be text, got " + describe(n));
    }
    return n.Scalar();
  }

  std::string required_text(std::string_view key) const { return text_of(key, require(key)); }

  std::optional<std::string> optional_text(std::string_view key) const {
    const YAML::Node* n = find(key);
    if (!n) return std::nullopt;
    return text_of(key, *n);
  }

  // Recommended free-text keys: absent means empty, with a warning.
  std::string soft_text(std::string_view key) {
    const YAML::Node* n = find(key);
    if (!n) {
      warn(std::string(key), "missing key '" + std::string(key) + "'");
      return {};
    }
    return text_of(key, *n);
  }

  [[noreturn]] void bad_number(std::string_view key, const YAML::Node& n) const {
    throw ParseError(ParseErrorKind::BadNumber, section_, index_,
                     "key '" + std::string(key) + "' has unparsable value " + describe(n));
  }

  double real(std::string_view key, const YAML::Node& n, std::string_view token) const {
    std::string_view t = text::trim(token);
    // Tolerate a trailing unit ("1.8m", "1.8 m").
    if (!t.empty() && (t.back() == 'm' || t.back() == 'M')) t = text::trim(t.substr(0, t.size() - 1));
    auto v = text::parse_double(t);
    if (!v || !std::isfinite(*v)) bad_number(key, n);
    return *v;
  }

  std::vector<double> real_list(std::string_view key, std::size_t arity) const {
    const YAML::Node& n = require(key);
    std::vector<std::string> tokens;
    if (n.IsSequence()) {
      for (const auto& item : n) {
        if (!item.IsScalar()) bad_number(key, n);
        tokens.push_back(item.Scalar());
      }
    } else if (n.IsScalar()) {
      // "[0.8, 0.0]" written as a quoted string.
      std::string_view s = text::trim(n.Scalar());
      if (s.size() >= 2 && (s.front() == '[' || s.front() == '(') &&
          (s.back() == ']' || s.back() == ')')) {
        s = s.substr(1, s.size() - 2);
      }
      tokens = text::split(s, ',');
    } else {
      bad_number(key, n);
    }
    if (tokens.size() != arity) bad_number(key, n);
    std::vector<double> out;
    for (const auto& t : tokens) out.push_back(real(key, n, t));
    return out;
  }

  Vec2 vec2(std::string_view key) const {
    auto v = real_list(key, 2);
    return {v[0], v[1]};
  }

  // "4s", "4 s", "4sec", "4 seconds", or a bare number.
  double seconds(std::string_view key) const {
    const YAML::Node& n = require(key);
    if (!n.IsScalar()) bad_number(key, n);
    std::string lowered = text::to_lower(text::trim(n.Scalar()));
    std::string_view t = lowered;
    for (std::string_view suffix : {"seconds", "second", "secs", "sec", "s"}) {
      if (t.size() > suffix.size() && t.substr(t.size() - suffix.size()) == suffix) {
        t = t.substr(0, t.size() - suffix.size());
        break;
      }
    }
    auto v = text::parse_double(t);
    if (!v || !std::isfinite(*v) || *v < 0.0) bad_number(key, n);
    return *v;
  }

  std::int64_t step_index(std::string_view key) const {
    const YAML::Node& n = require(key);
    if (!n.IsScalar()) bad_number(key, n);
    auto v = text::parse_int(n.Scalar());
    if (!v || *v < 0) bad_number(key, n);
    return *v;
  }

  Facing facing(std::string_view key) const {
    std::string label = required_text(key);
    auto o = parse_facing_token(label);
    if (!o) {
      throw ParseError(ParseErrorKind::BadFacing, section_, index_,
                       "facing '" + label + "' is not one of N, NE, E, SE, S, SW, W, NW");
    }
    return Facing{*o, label};
  }

  void warn(std::string key, std::string message) {
    warnings_.push_back(ParseWarning{section_, index_, std::move(key), std::move(message)});
  }

 private:
  struct Field {
    std::string original;
    YAML::Node node;
  };
  std::string section_;
  std::optional<std::size_t> index_;
  std::vector<ParseWarning>& warnings_;
  std::map<std::string, Field> fields_;
};

MetaContext parse_meta(const YAML::Node& node, std::vector<ParseWarning>& warnings) {
  ItemReader r(node, kMeta, std::nullopt, warnings);
  MetaContext m;
  m.room_topology = r.required_text("room_topology");
  m.grid_alignment = r.required_text("grid_alignment");
  m.initial_camera_heading = r.required_text("initial_camera_heading");
  for (auto [key, value] : {std::pair<const char*, const std::string*>{"room_topology", &m.room_topology},
                            {"grid_alignment", &m.grid_alignment},
                            {"initial_camera_heading", &m.initial_camera_heading}}) {
    if (text::trim(*value).empty()) {
      throw ParseError(ParseErrorKind::MalformedItem, kMeta, std::nullopt,
                       "key '" + std::string(key) + "' is empty");
    }
  }
  r.report_unknown({"room_topology", "grid_alignment", "initial_camera_heading"});
  return m;
}

template <typename Item, typename ParseOne>
std::vector<Item> parse_list(const YAML::Node& node, const char* section,
                             std::vector<ParseWarning>& warnings, ParseOne parse_one) {
  std::vector<Item> items;
  if (!node || node.IsNull()) return items;
  if (!node.IsSequence()) {
    throw ParseError(ParseErrorKind::MalformedItem, section, std::nullopt,
                     "expected a list, got " + describe(node));
  }
  std::size_t index = 0;
  for (const auto& child : node) {
    ItemReader r(child, section, index, warnings);
    items.push_back(parse_one(r));
    ++index;
  }
  return items;
}

TrajectoryStep parse_step(ItemReader& r) {
  TrajectoryStep s;
  s.step = r.step_index("step");
  s.time = r.seconds("time");
  s.pos = r.vec2("pos");
  s.facing = r.facing("facing");
  s.action = r.soft_text("action");
  r.report_unknown({"step", "time", "pos", "facing", "action"});
  return s;
}

Entity parse_entity(ItemReader& r) {
  Entity e;
  e.id = r.required_text("id");
  e.category = r.required_text("category");
  e.first_seen_at = r.seconds("first_seen_at");
  e.state = r.optional_text("state");
  e.estimated_pos = r.vec2("estimated_pos");
  if (r.find("approx_size")) {
    auto v = r.real_list("approx_size", 3);
    e.approx_size = Size3{v[0], v[1], v[2]};
  }
  e.orientation = r.optional_text("orientation");
  e.visual_signature = r.soft_text("visual_signature");
  e.spatial_relation = r.soft_text("spatial_relation");
  r.report_unknown({"id", "category", "first_seen_at", "state", "estimated_pos", "approx_size",
                    "orientation", "visual_signature", "spatial_relation"});
  return e;
}

}  // namespace

ParseResult parse_trace(std::string_view text) {
  if (text::trim(text).empty()) {
    throw ParseError(ParseErrorKind::MalformedDocument, "", std::nullopt, "empty input");
  }
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::Exception& e) {
    throw ParseError(ParseErrorKind::MalformedDocument, "", std::nullopt, e.what());
  }
  if (!root.IsMap()) {
    throw ParseError(ParseErrorKind::MalformedDocument, "", std::nullopt,
                     "top level must be a mapping, got " + describe(root));
  }

  ParseResult result;
  struct Section {
    const char* name;
    YAML::Node node;
    bool present = false;
  };
  std::array<Section, 3> sections = {Section{kMeta, {}}, Section{kTrajectory, {}},
                                     Section{kEntities, {}}};
  for (auto it = root.begin(); it != root.end(); ++it) {
    if (!it->first.IsScalar()) {
      result.warnings.push_back({"", std::nullopt, "", "ignoring non-scalar top-level key"});
      continue;
    }
    const std::string& key = it->first.Scalar();
    const std::string norm = normalize_key(key);
    bool matched = false;
    for (auto& s : sections) {
      if (norm == normalize_key(s.name)) {
        s.node = it->second;
        s.present = true;
        matched = true;
        if (key != s.name) {
          result.warnings.push_back(
              {s.name, std::nullopt, key, "non-canonical section name '" + key + "'"});
        }
      }
    }
    if (!matched) {
      result.warnings.push_back({"", std::nullopt, key, "unknown top-level key '" + key + "'"});
    }
  }
  for (const auto& s : sections) {
    if (!s.present) throw ParseError(ParseErrorKind::MissingSection, s.name, std::nullopt, "");
  }

  try {
    if (!sections[0].node || sections[0].node.IsNull()) {
      throw ParseError(ParseErrorKind::MalformedItem, kMeta, std::nullopt,
                       "missing key 'room_topology'");
    }
    result.document.meta = parse_meta(sections[0].node, result.warnings);
    result.document.trajectory =
        parse_list<TrajectoryStep>(sections[1].node, kTrajectory, result.warnings, parse_step);
    result.document.entities =
        parse_list<Entity>(sections[2].node, kEntities, result.warnings, parse_entity);
  } catch (const YAML::Exception& e) {
    throw ParseError(ParseErrorKind::MalformedDocument, "", std::nullopt, e.what());
  }
  return result;
}

}  // namespace tracekit::schema
