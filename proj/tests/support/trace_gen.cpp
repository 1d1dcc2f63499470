#include "trace_gen.hpp"

#include "tracekit/core/text.hpp"

#include <cmath>

namespace tracekit::testing {

namespace fs = std::filesystem;

fs::path fixture_dir() { return fs::path(TRACEKIT_SOURCE_DIR) / "tests" / "fixtures"; }
fs::path golden_dir() { return fs::path(TRACEKIT_SOURCE_DIR) / "goldens"; }
fs::path config_dir() { return fs::path(TRACEKIT_SOURCE_DIR) / "config"; }

std::size_t uniform(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

double uniform_real(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

bool coin(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng); }

namespace {

const char* const kPieces[] = {"a", "b", "z", "Q", "0", "7", " ", " ", ":", "#", "'", "\"", "\\", "{", "}",
                               "[", "]", ",", "&", "*", "!", "|", ">", "%", "@", "`", "-", "?", "\t",
                               "\n", "\x01", "\x7f", "\xc3\xa9", "\xe2\x86\x92", "null", "true", "~", "1e3"};

double random_coord(Rng& rng) {
  switch (uniform(rng, 0, 4)) {
    case 0: return static_cast<double>(static_cast<long>(uniform(rng, 0, 40)) - 20);
    case 1: return std::round(uniform_real(rng, -15, 15) * 10) / 10;
    case 2: return uniform_real(rng, -1e-6, 1e-6);
    default: return uniform_real(rng, -25, 25);
  }
}

double random_positive(Rng& rng) {
  return coin(rng, 0.3) ? std::round(uniform_real(rng, 0.1, 3.0) * 10) / 10 : uniform_real(rng, 1e-3, 4.0);
}

}  // namespace

std::string random_text(Rng& rng, std::size_t max_len, bool nonblank) {
  std::string out;
  const std::size_t n = uniform(rng, nonblank ? 1 : 0, max_len);
  for (std::size_t i = 0; i < n; ++i) out += kPieces[uniform(rng, 0, std::size(kPieces) - 1)];
  if (nonblank && text::trim(out).empty()) out += "x";
  return out;
}

std::string facing_label(Rng& rng, schema::Octant o) {
  static const char* const kWords[] = {"North", "North East", "East", "South East",
                                       "South", "South-West", "West", "north_west"};
  static const char* const kAxes[] = {"(+Y)", "(+X,+Y)", "(+X)", "(+X,-Y)", "(-Y)", "(-X,-Y)", "(-X)", "(-X,+Y)"};
  const auto i = static_cast<std::size_t>(o);
  const std::string code(schema::octant_code(o));
  switch (uniform(rng, 0, 4)) {
    case 0: return code;
    case 1: return code + " " + kAxes[i];
    case 2: return std::string(kWords[i]) + " " + kAxes[i];
    case 3: return text::to_lower(kWords[i]);
    default: return kWords[i];
  }
}

schema::TraceDocument random_document(Rng& rng) {
  schema::TraceDocument d;
  d.meta.room_topology = random_text(rng, 12, true);
  d.meta.grid_alignment = random_text(rng, 12, true);
  d.meta.initial_camera_heading = random_text(rng, 6, true);
  const std::size_t steps = uniform(rng, 0, 6);
  double t = 0.0;
  for (std::size_t i = 0; i < steps; ++i) {
    schema::TrajectoryStep s;
    s.step = static_cast<std::int64_t>(i);
    t += coin(rng, 0.2) ? 0.0 : uniform_real(rng, 0.0, 5.0);
    s.time = coin(rng, 0.5) ? std::round(t) : t;
    if (i > 0) s.pos = {random_coord(rng), random_coord(rng)};
    const auto o = schema::kOctants[uniform(rng, 0, 7)];
    s.facing = schema::Facing{o, facing_label(rng, o)};
    s.action = random_text(rng, 10, false);
    d.trajectory.push_back(std::move(s));
  }
  const std::size_t n = uniform(rng, 0, 8);
  for (std::size_t i = 0; i < n; ++i) {
    schema::Entity e;
    e.id = random_text(rng, 4, true) + "_" + std::to_string(i);
    e.category = random_text(rng, 6, true);
    e.first_seen_at = coin(rng, 0.5) ? static_cast<double>(uniform(rng, 0, 30)) : uniform_real(rng, 0, 30);
    if (coin(rng, 0.3)) e.state = random_text(rng, 5, false);
    e.estimated_pos = {random_coord(rng), random_coord(rng)};
    if (coin(rng, 0.8)) e.approx_size = schema::Size3{random_positive(rng), random_positive(rng), random_positive(rng)};
    if (coin(rng, 0.3)) e.orientation = random_text(rng, 5, false);
    e.visual_signature = random_text(rng, 8, false);
    e.spatial_relation = random_text(rng, 8, false);
    d.entities.push_back(std::move(e));
  }
  return d;
}

schema::TraceDocument random_scene(Rng& rng, std::size_t max_entities) {
  static const char* const kCategories[] = {"chair", "table", "bed", "sofa", "lamp", "door", "tv", "plant"};
  schema::TraceDocument d;
  d.meta = {"room", "walls", "N"};
  const std::size_t steps = uniform(rng, 1, 4);
  for (std::size_t i = 0; i < steps; ++i) {
    schema::TrajectoryStep s;
    s.step = static_cast<std::int64_t>(i);
    s.time = static_cast<double>(2 * i);
    if (i > 0) s.pos = {uniform_real(rng, -5, 5), uniform_real(rng, -5, 5)};
    s.facing = schema::Facing::of(schema::kOctants[uniform(rng, 0, 7)]);
    s.action = "move";
    d.trajectory.push_back(s);
  }
  const std::size_t n = uniform(rng, 2, std::max<std::size_t>(2, max_entities));
  for (std::size_t i = 0; i < n; ++i) {
    schema::Entity e;
    const std::string cat = kCategories[uniform(rng, 0, std::size(kCategories) - 1)];
    e.id = cat + "_" + (i < 10 ? "0" : "") + std::to_string(i);
    e.category = cat;
    e.first_seen_at = static_cast<double>(uniform(rng, 0, 2 * (steps - 1)));
    e.estimated_pos = {uniform_real(rng, -6, 6), uniform_real(rng, -6, 6)};
    e.approx_size = schema::Size3{uniform_real(rng, 0.1, 2.5), uniform_real(rng, 0.1, 2.5), uniform_real(rng, 0.1, 2.5)};
    e.visual_signature = "thing";
    e.spatial_relation = "somewhere";
    d.entities.push_back(std::move(e));
  }
  return d;
}

schema::TraceDocument clean_document() {
  schema::TraceDocument d = bedroom_example();
  for (auto& e : d.entities) {
    if (e.first_seen_at > d.trajectory.back().time) e.first_seen_at = d.trajectory.back().time;
  }
  return d;
}

schema::TraceDocument bedroom_example() {
  return schema::parse_trace(text::read_file((fixture_dir() / "traces" / "bedroom_example.yaml").string())).document;
}

std::string mutate(Rng& rng, std::string s) {
  static const char* const kTokens[] = {":", "-", "[", "]", "{", "}", "\"", "'", "\n", "  ", "&a", "*a", "!!map",
                                        "---", "...", "?", "|", ">", "\t", "\xff", "1e999", "nan", "- -"};
  const std::size_t edits = uniform(rng, 1, 6);
  for (std::size_t k = 0; k < edits; ++k) {
    const std::size_t pos = s.empty() ? 0 : uniform(rng, 0, s.size() - 1);
    switch (uniform(rng, 0, 4)) {
      case 0:
        if (!s.empty()) s.erase(pos, uniform(rng, 1, 8));
        break;
      case 1: s.insert(pos, std::string(kTokens[uniform(rng, 0, std::size(kTokens) - 1)])); break;
      case 2:
        if (!s.empty()) s[pos] = static_cast<char>(uniform(rng, 0, 255));
        break;
      case 3:
        if (!s.empty()) s = s.substr(0, pos);
        break;
      default: {
        const std::size_t len = uniform(rng, 1, 20);
        if (pos + len <= s.size()) s.insert(uniform(rng, 0, s.size()), s.substr(pos, len));
      }
    }
  }
  return s;
}

}  // namespace tracekit::testing
