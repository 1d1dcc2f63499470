#include "tracekit/oracle/spatial_oracle.hpp"

#include "tracekit/core/text.hpp"

#include <cmath>
#include <numbers>
#include <regex>

namespace tracekit::oracle {

namespace {

constexpr double kPi = std::numbers::pi;

double wrap(double a) {
  a = std::fmod(a + kPi, 2.0 * kPi);
  if (a < 0) a += 2.0 * kPi;
  return a - kPi;
}

double bearing(const schema::Vec2& from, const schema::Vec2& to) {
  return std::atan2(to.y - from.y, to.x - from.x);
}

std::vector<std::string> phrases(std::string_view candidate) {
  // Numbered steps ("1. Go ...") and " then "/" and " joiners become separators.
  static const std::regex kNumbering(R"((^|\s)\d+[.)]\s)");
  static const std::regex kJoiners(R"(\s+(then|and)\s+)", std::regex::icase);
  std::string s = std::regex_replace(std::string(candidate), kNumbering, "$1,");
  s = std::regex_replace(s, kJoiners, ",");
  for (char& c : s) {
    if (c == ';' || c == '\n' || c == '.') c = ',';
  }
  std::vector<std::string> out;
  for (auto& p : text::split(s, ',')) {
    std::string t(text::trim(p));
    if (!t.empty()) out.push_back(text::to_lower(t));
  }
  return out;
}

}  // namespace

std::vector<RouteAction> parse_route_actions(std::string_view candidate) {
  static const std::regex kTurn(R"(^(?:turn\s+)?(left|right|back|around)$)");
  static const std::regex kGo(
      R"(^(?:go|walk|move|head)\s+(?:forward|straight|ahead)?\s*(?:until|to|towards|toward)\s+(?:you\s+reach\s+)?(?:the\s+)?(.+)$)");
  std::vector<RouteAction> out;
  for (const auto& p : phrases(candidate)) {
    std::smatch m;
    if (std::regex_match(p, m, kTurn)) {
      const std::string dir = m[1];
      if (dir == "left") {
        out.push_back({RouteActionKind::TurnLeft, {}});
      } else if (dir == "right") {
        out.push_back({RouteActionKind::TurnRight, {}});
      } else {
        out.push_back({RouteActionKind::TurnBack, {}});
      }
    } else if (std::regex_match(p, m, kGo)) {
      out.push_back({RouteActionKind::GoForward, std::string(text::trim(m[1].str()))});
    } else if (p.find("reached") != std::string::npos && p.find("destination") != std::string::npos) {
      continue;
    } else {
      throw OracleError(OracleErrorKind::UnparsableCandidate, "unrecognised route phrase '" + p + "'");
    }
  }
  if (out.empty()) throw OracleError(OracleErrorKind::UnparsableCandidate, "empty route");
  return out;
}

RouteChoice route_eval(const schema::TraceDocument& doc, std::string_view start,
                       std::string_view initial_facing, std::span<const std::string> candidates) {
  if (candidates.empty()) throw OracleError(OracleErrorKind::MissingParameter, "no route candidates");
  const schema::Vec2 start_pos = resolve_entity(doc, start).estimated_pos;
  const schema::Vec2 facing_pos = resolve_entity(doc, initial_facing).estimated_pos;
  if (std::hypot(facing_pos.x - start_pos.x, facing_pos.y - start_pos.y) < kCollinearEpsilon) {
    throw OracleError(OracleErrorKind::DegenerateHeading, "initial facing coincides with start");
  }

  RouteChoice out;
  for (const auto& candidate : candidates) {
    CandidateScore score;
    try {
      schema::Vec2 pos = start_pos;
      double heading = bearing(start_pos, facing_pos);
      double error = 0.0;
      for (const auto& action : parse_route_actions(candidate)) {
        switch (action.kind) {
          case RouteActionKind::TurnLeft: heading += kPi / 2; break;
          case RouteActionKind::TurnRight: heading -= kPi / 2; break;
          case RouteActionKind::TurnBack: heading += kPi; break;
          case RouteActionKind::GoForward: {
            const schema::Vec2 next = resolve_entity(doc, action.target).estimated_pos;
            if (std::hypot(next.x - pos.x, next.y - pos.y) < kCollinearEpsilon) break;
            const double b = bearing(pos, next);
            error += std::abs(wrap(b - heading));
            heading = b;
            pos = next;
            break;
          }
        }
      }
      score.angular_error = error;
    } catch (const OracleError& e) {
      score.problem = e.kind() == OracleErrorKind::UnparsableCandidate
                          ? std::string(e.what())
                          : "UnparsableCandidate: " + std::string(e.what());
    }
    out.scores.push_back(std::move(score));
  }
  // Ties (within rounding of the angle arithmetic) go to the earlier candidate.
  for (std::size_t i = 1; i < out.scores.size(); ++i) {
    if (out.scores[i].angular_error < out.scores[out.index].angular_error - 1e-12) out.index = i;
  }
  return out;
}

}  // namespace tracekit::oracle
