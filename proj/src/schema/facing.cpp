#include "tracekit/schema/trace.hpp"

#include "tracekit/core/text.hpp"

#include <cctype>
#include <cmath>
#include <utility>

namespace tracekit::schema {

std::string_view octant_code(Octant o) {
  switch (o) {
    case Octant::N: return "N";
    case Octant::NE: return "NE";
    case Octant::E: return "E";
    case Octant::SE: return "SE";
    case Octant::S: return "S";
    case Octant::SW: return "SW";
    case Octant::W: return "W";
    case Octant::NW: return "NW";
  }
  return "N";
}

namespace {

std::optional<Octant> lookup(std::string_view word) {
  static const std::pair<std::string_view, Octant> kNames[] = {
      {"N", Octant::N},          {"NORTH", Octant::N},        {"NE", Octant::NE},
      {"NORTHEAST", Octant::NE}, {"E", Octant::E},            {"EAST", Octant::E},
      {"SE", Octant::SE},        {"SOUTHEAST", Octant::SE},   {"S", Octant::S},
      {"SOUTH", Octant::S},      {"SW", Octant::SW},          {"SOUTHWEST", Octant::SW},
      {"W", Octant::W},          {"WEST", Octant::W},         {"NW", Octant::NW},
      {"NORTHWEST", Octant::NW},
  };
  for (const auto& [name, o] : kNames) {
    if (word == name) return o;
  }
  return std::nullopt;
}

}  // namespace

std::optional<Octant> parse_facing_token(std::string_view label) {
  label = text::trim(label);
  // Leading run of letters, allowing "North East" / "north-east" / "North_East".
  std::vector<std::string> words;
  std::string current;
  for (char c : label) {
    const auto uc = static_cast<unsigned char>(c);
    if (std::isalpha(uc)) {
      current.push_back(static_cast<char>(std::toupper(uc)));
    } else if (c == ' ' || c == '-' || c == '_') {
      if (!current.empty()) words.push_back(std::move(current));
      current.clear();
    } else {
      break;
    }
  }
  if (!current.empty()) words.push_back(std::move(current));
  if (words.empty()) return std::nullopt;

  if (words.size() >= 2) {
    if (auto joined = lookup(words[0] + words[1])) return joined;
  }
  return lookup(words[0]);
}

Vec2 octant_vector(Octant o) {
  const double d = std::sqrt(0.5);
  switch (o) {
    case Octant::N: return {0.0, 1.0};
    case Octant::NE: return {d, d};
    case Octant::E: return {1.0, 0.0};
    case Octant::SE: return {d, -d};
    case Octant::S: return {0.0, -1.0};
    case Octant::SW: return {-d, -d};
    case Octant::W: return {-1.0, 0.0};
    case Octant::NW: return {-d, d};
  }
  return {0.0, 1.0};
}

Vec2 facing_to_vector(const Facing& f) { return octant_vector(f.octant); }

}  // namespace tracekit::schema
