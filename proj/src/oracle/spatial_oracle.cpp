#include "tracekit/oracle/spatial_oracle.hpp"

#include "tracekit/core/text.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace tracekit::oracle {

std::string_view to_string(OracleErrorKind k) {
  switch (k) {
    case OracleErrorKind::UnknownEntity: return "UnknownEntity";
    case OracleErrorKind::AmbiguousCategory: return "AmbiguousCategory";
    case OracleErrorKind::NoSize: return "NoSize";
    case OracleErrorKind::EmptyScene: return "EmptyScene";
    case OracleErrorKind::DegenerateHeading: return "DegenerateHeading";
    case OracleErrorKind::EmptyTrajectory: return "EmptyTrajectory";
    case OracleErrorKind::UnparsableCandidate: return "UnparsableCandidate";
    case OracleErrorKind::MissingParameter: return "MissingParameter";
  }
  return "OracleError";
}

OracleError::OracleError(OracleErrorKind kind, const std::string& detail)
    : std::runtime_error(std::string(to_string(kind)) + ": " + detail), kind_(kind) {}

std::string normalize_category(std::string_view category) {
  std::string s;
  bool pending_space = false;
  for (char c : text::trim(category)) {
    if (c == '_' || c == '-' || std::isspace(static_cast<unsigned char>(c))) {
      pending_space = !s.empty();
      continue;
    }
    if (pending_space) s.push_back(' ');
    pending_space = false;
    s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  if (s.size() > 1 && s.back() == 's' && s[s.size() - 2] != 's' && s[s.size() - 2] != ' ') {
    s.pop_back();
  }
  return s;
}

namespace {

std::string strip_article(std::string_view ref) {
  std::string_view r = text::trim(ref);
  if (text::starts_with_icase(r, "the ")) r.remove_prefix(4);
  return std::string(text::trim(r));
}

double dist(const schema::Vec2& a, const schema::Vec2& b) { return std::hypot(a.x - b.x, a.y - b.y); }

std::string fmt(double v) { return text::format_trimmed(v, 4); }

std::string fmt(const schema::Vec2& v) { return "[" + fmt(v.x) + ", " + fmt(v.y) + "]"; }

std::vector<std::size_t> category_matches(const schema::TraceDocument& doc, std::string_view category) {
  const std::string want = normalize_category(category);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < doc.entities.size(); ++i) {
    if (normalize_category(doc.entities[i].category) == want) out.push_back(i);
  }
  return out;
}

const std::string& need(const OracleQuery& q, std::size_t i, const char* what) {
  if (q.subjects.size() <= i) {
    throw OracleError(OracleErrorKind::MissingParameter,
                      std::string(task_name(q.task)) + " needs " + what);
  }
  return q.subjects[i];
}

}  // namespace

const schema::Entity& resolve_entity(const schema::TraceDocument& doc, std::string_view ref) {
  const std::string r = strip_article(ref);
  for (const auto& e : doc.entities) {
    if (e.id == r) return e;
  }
  const auto hits = category_matches(doc, r);
  if (hits.size() == 1) return doc.entities[hits.front()];
  if (hits.empty()) throw OracleError(OracleErrorKind::UnknownEntity, "no entity matches '" + r + "'");
  throw OracleError(OracleErrorKind::AmbiguousCategory,
                    "'" + r + "' matches " + std::to_string(hits.size()) + " entities");
}

std::size_t count_objects(const schema::TraceDocument& doc, std::string_view category) {
  return category_matches(doc, strip_article(category)).size();
}

double abs_distance(const schema::TraceDocument& doc, std::string_view a, std::string_view b) {
  return dist(resolve_entity(doc, a).estimated_pos, resolve_entity(doc, b).estimated_pos);
}

double object_size_cm(const schema::TraceDocument& doc, std::string_view entity) {
  const auto& e = resolve_entity(doc, entity);
  if (!e.approx_size) throw OracleError(OracleErrorKind::NoSize, e.id + " has no approx_size");
  const auto& z = *e.approx_size;
  return std::max({z.width, z.height, z.depth}) * 100.0;
}

double room_size(const schema::TraceDocument& doc) {
  std::vector<schema::Vec2> pts;
  for (const auto& e : doc.entities) pts.push_back(e.estimated_pos);
  for (const auto& s : doc.trajectory) pts.push_back(s.pos);
  if (pts.empty()) throw OracleError(OracleErrorKind::EmptyScene, "no positioned points");
  double x0 = pts[0].x, x1 = pts[0].x, y0 = pts[0].y, y1 = pts[0].y;
  for (const auto& p : pts) {
    x0 = std::min(x0, p.x);
    x1 = std::max(x1, p.x);
    y0 = std::min(y0, p.y);
    y1 = std::max(y1, p.y);
  }
  return (x1 - x0) * (y1 - y0);
}

DistanceChoice relative_distance(const schema::TraceDocument& doc, std::string_view target,
                                 std::span<const std::string> options) {
  if (options.empty()) throw OracleError(OracleErrorKind::MissingParameter, "no options");
  const auto& t = resolve_entity(doc, target);
  DistanceChoice out;
  for (std::size_t i = 0; i < options.size(); ++i) {
    out.distances.push_back(dist(t.estimated_pos, resolve_entity(doc, options[i]).estimated_pos));
    if (out.distances[i] < out.distances[out.index]) out.index = i;
  }
  return out;
}

std::string_view to_string(Direction d) {
  switch (d) {
    case Direction::Front: return "front";
    case Direction::Back: return "back";
    case Direction::Left: return "left";
    case Direction::Right: return "right";
    case Direction::FrontLeft: return "front-left";
    case Direction::FrontRight: return "front-right";
    case Direction::BackLeft: return "back-left";
    case Direction::BackRight: return "back-right";
  }
  return "front";
}

std::optional<Direction> parse_direction(std::string_view label) {
  std::string s = text::to_lower(text::trim(label));
  std::replace(s.begin(), s.end(), ' ', '-');
  std::replace(s.begin(), s.end(), '_', '-');
  while (!s.empty() && (s.back() == '.' || s.back() == '?')) s.pop_back();
  for (Direction d : {Direction::Front, Direction::Back, Direction::Left, Direction::Right,
                      Direction::FrontLeft, Direction::FrontRight, Direction::BackLeft,
                      Direction::BackRight}) {
    if (s == to_string(d)) return d;
  }
  if (s == "behind") return Direction::Back;
  return std::nullopt;
}

Direction RelativeDirection::three_way() const {
  if (std::abs(cross) < kCollinearEpsilon) return dot > 0 ? Direction::Front : Direction::Back;
  if (dot < 0) return Direction::Back;
  return cross > 0 ? Direction::Left : Direction::Right;
}

std::optional<Direction> RelativeDirection::two_way() const {
  if (std::abs(cross) < kCollinearEpsilon) return std::nullopt;
  return cross > 0 ? Direction::Left : Direction::Right;
}

Direction RelativeDirection::quadrant() const {
  if (std::abs(cross) < kCollinearEpsilon) return dot > 0 ? Direction::Front : Direction::Back;
  const bool left = cross > 0;
  if (dot >= 0) return left ? Direction::FrontLeft : Direction::FrontRight;
  return left ? Direction::BackLeft : Direction::BackRight;
}

RelativeDirection relative_direction(const schema::TraceDocument& doc, std::string_view standing_at,
                                     std::string_view facing, std::string_view query) {
  const auto& s = resolve_entity(doc, standing_at).estimated_pos;
  const auto& f = resolve_entity(doc, facing).estimated_pos;
  const auto& q = resolve_entity(doc, query).estimated_pos;
  const double hx = f.x - s.x, hy = f.y - s.y;
  if (std::hypot(hx, hy) < kCollinearEpsilon) {
    throw OracleError(OracleErrorKind::DegenerateHeading, "facing point coincides with standing point");
  }
  const double vx = q.x - s.x, vy = q.y - s.y;
  return RelativeDirection{hx * vy - hy * vx, hx * vx + hy * vy};
}

std::vector<std::string> appearance_order(const schema::TraceDocument& doc,
                                          std::span<const std::string> categories) {
  struct Key {
    double time;
    std::size_t registry_index;
    std::size_t input_index;
  };
  std::vector<Key> keys;
  for (std::size_t i = 0; i < categories.size(); ++i) {
    auto hits = category_matches(doc, strip_article(categories[i]));
    if (hits.empty()) hits.push_back(static_cast<std::size_t>(&resolve_entity(doc, categories[i]) -
                                                              doc.entities.data()));
    Key k{doc.entities[hits[0]].first_seen_at, hits[0], i};
    for (std::size_t h : hits) {
      if (doc.entities[h].first_seen_at < k.time) k = Key{doc.entities[h].first_seen_at, h, i};
    }
    keys.push_back(k);
  }
  std::stable_sort(keys.begin(), keys.end(), [](const Key& a, const Key& b) {
    if (a.time != b.time) return a.time < b.time;
    return a.registry_index < b.registry_index;
  });
  std::vector<std::string> out;
  for (const auto& k : keys) out.push_back(categories[k.input_index]);
  return out;
}

Pose camera_pose_at(const schema::TraceDocument& doc, double t) {
  const auto& traj = doc.trajectory;
  if (traj.empty()) throw OracleError(OracleErrorKind::EmptyTrajectory, "trajectory is empty");
  std::size_t at = 0;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    if (traj[i].time <= t) at = i;
  }
  return Pose{traj[at].pos, traj[at].facing, at};
}

// ---------------------------------------------------------------------------

std::string OracleAnswer::display() const {
  if (option) return *option;
  if (!value) return "";
  switch (unit) {
    case Unit::Count: return fmt(*value);
    case Unit::None: return fmt(*value);
    default: return fmt(*value) + " " + std::string(unit_suffix(unit));
  }
}

std::string OracleAnswer::answer_text() const {
  if (option_index) return std::string(1, static_cast<char>('A' + *option_index));
  if (option) return *option;
  if (value) return fmt(*value);
  return "";
}

namespace {

OracleAnswer numeric(double v, Unit u, std::string trace) {
  OracleAnswer a;
  a.value = v;
  a.unit = u;
  a.trace = std::move(trace);
  return a;
}

OracleAnswer pick(const OracleQuery& q, std::size_t index, std::string trace) {
  OracleAnswer a;
  a.option_index = index;
  a.option = q.options.at(index);
  a.trace = std::move(trace);
  return a;
}

// Splits an ordering option such as "door, bed, trash bin" into normalized categories.
std::vector<std::string> ordering_of(std::string_view option) {
  std::vector<std::string> out;
  for (auto& part : text::split(option, ',')) {
    std::string n = normalize_category(strip_article(part));
    if (!n.empty()) out.push_back(n);
  }
  return out;
}

OracleAnswer answer_rel_dir(const schema::TraceDocument& doc, const OracleQuery& q) {
  const auto rd = relative_direction(doc, need(q, 0, "a standing entity"),
                                     need(q, 1, "a facing entity"), need(q, 2, "a query entity"));
  bool quadrants = false, with_back = false;
  for (const auto& o : q.options) {
    auto d = parse_direction(o);
    if (!d) continue;
    if (*d == Direction::FrontLeft || *d == Direction::FrontRight || *d == Direction::BackLeft ||
        *d == Direction::BackRight) {
      quadrants = true;
    }
    if (*d == Direction::Back) with_back = true;
  }
  std::optional<Direction> label;
  if (quadrants) {
    label = rd.quadrant();
  } else if (with_back || q.options.empty()) {
    label = rd.three_way();
  } else {
    label = rd.two_way();
  }
  std::string trace = "cross=" + fmt(rd.cross) + " dot=" + fmt(rd.dot);
  if (label) trace += " -> " + std::string(to_string(*label));
  if (q.options.empty()) {
    OracleAnswer a;
    if (label) a.option = std::string(to_string(*label));
    a.trace = trace;
    return a;
  }
  for (std::size_t i = 0; i < q.options.size(); ++i) {
    if (label && parse_direction(q.options[i]) == label) return pick(q, i, trace);
  }
  OracleAnswer a;
  a.trace = trace + " (no matching option)";
  return a;
}

OracleAnswer answer_order(const schema::TraceDocument& doc, const OracleQuery& q) {
  if (q.subjects.empty()) throw OracleError(OracleErrorKind::MissingParameter, "order needs categories");
  const auto order = appearance_order(doc, q.subjects);
  const std::string joined = text::join(order, ", ");
  std::vector<std::string> want;
  for (const auto& c : order) want.push_back(normalize_category(strip_article(c)));
  for (std::size_t i = 0; i < q.options.size(); ++i) {
    if (ordering_of(q.options[i]) == want) return pick(q, i, "order: " + joined);
  }
  OracleAnswer a;
  a.option = joined;
  a.trace = "order: " + joined + (q.options.empty() ? "" : " (no matching option)");
  return a;
}

}  // namespace

OracleAnswer answer(const schema::TraceDocument& doc, const OracleQuery& q) {
  switch (q.task) {
    case TaskKind::ObjCount: {
      const auto n = count_objects(doc, need(q, 0, "a category"));
      return numeric(static_cast<double>(n), Unit::Count,
                     "count(" + normalize_category(q.subjects[0]) + ") = " + std::to_string(n));
    }
    case TaskKind::AbsDist: {
      const auto& a = resolve_entity(doc, need(q, 0, "two entities"));
      const auto& b = resolve_entity(doc, need(q, 1, "two entities"));
      const double d = dist(a.estimated_pos, b.estimated_pos);
      return numeric(d, Unit::Meters,
                     "|" + a.id + " " + fmt(a.estimated_pos) + " - " + b.id + " " +
                         fmt(b.estimated_pos) + "| = " + fmt(d));
    }
    case TaskKind::ObjSize: {
      const double cm = object_size_cm(doc, need(q, 0, "an entity"));
      return numeric(cm, Unit::Centimeters,
                     "max(approx_size of " + resolve_entity(doc, q.subjects[0]).id + ") * 100 = " + fmt(cm));
    }
    case TaskKind::RoomSize: {
      const double area = room_size(doc);
      return numeric(area, Unit::SquareMeters, "bounding box area = " + fmt(area));
    }
    case TaskKind::RelDist: {
      const auto choice = relative_distance(doc, need(q, 0, "a target"), q.options);
      std::string trace;
      for (std::size_t i = 0; i < q.options.size(); ++i) {
        if (i) trace += ", ";
        trace += q.options[i] + "=" + fmt(choice.distances[i]);
      }
      return pick(q, choice.index, trace);
    }
    case TaskKind::RelDir: return answer_rel_dir(doc, q);
    case TaskKind::Route: {
      const auto choice = route_eval(doc, need(q, 0, "a start"), need(q, 1, "an initial facing"), q.options);
      std::string trace;
      for (std::size_t i = 0; i < choice.scores.size(); ++i) {
        if (i) trace += ", ";
        trace += std::string(1, static_cast<char>('A' + i)) + "=" +
                 (std::isfinite(choice.scores[i].angular_error) ? fmt(choice.scores[i].angular_error)
                                                                : std::string("inf"));
      }
      return pick(q, choice.index, "angular error: " + trace);
    }
    case TaskKind::Order: return answer_order(doc, q);
    case TaskKind::Other: break;
  }
  throw OracleError(OracleErrorKind::MissingParameter, "task has no oracle");
}

}  // namespace tracekit::oracle
