#pragma once

// Deterministic answers to the VSI task families, computed from a TRACE document.
// Entity references resolve as: exact id, then unique normalized category.

#include "tracekit/core/task.hpp"
#include "tracekit/schema/trace.hpp"

#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tracekit::oracle {

enum class OracleErrorKind {
  UnknownEntity,
  AmbiguousCategory,
  NoSize,
  EmptyScene,
  DegenerateHeading,
  EmptyTrajectory,
  UnparsableCandidate,
  MissingParameter,
};

std::string_view to_string(OracleErrorKind k);

class OracleError : public std::runtime_error {
 public:
  OracleError(OracleErrorKind kind, const std::string& detail);
  OracleErrorKind kind() const noexcept { return kind_; }

 private:
  OracleErrorKind kind_;
};

// Case-folded, trimmed, '_'/'-' as spaces, a single trailing plural 's' dropped.
std::string normalize_category(std::string_view category);

const schema::Entity& resolve_entity(const schema::TraceDocument& doc, std::string_view ref);

std::size_t count_objects(const schema::TraceDocument& doc, std::string_view category);

double abs_distance(const schema::TraceDocument& doc, std::string_view a, std::string_view b);

// Longest approx_size dimension in centimeters.
double object_size_cm(const schema::TraceDocument& doc, std::string_view entity);

// Axis-aligned bounding-box area over entity and trajectory positions, in square meters.
double room_size(const schema::TraceDocument& doc);

struct DistanceChoice {
  std::size_t index = 0;           // into the option list
  std::vector<double> distances;   // per option, meters
};

// Option closest to `target`; ties go to the earlier option.
DistanceChoice relative_distance(const schema::TraceDocument& doc, std::string_view target,
                                 std::span<const std::string> options);

enum class Direction { Front, Back, Left, Right, FrontLeft, FrontRight, BackLeft, BackRight };

std::string_view to_string(Direction d);
std::optional<Direction> parse_direction(std::string_view label);

struct RelativeDirection {
  double cross = 0.0;  // > 0: query is counterclockwise (left) of the heading
  double dot = 0.0;    // < 0: query is in the back half-plane

  // left | right | back, or front when the query lies straight ahead.
  Direction three_way() const;
  // left | right; straight ahead/behind resolve to nullopt.
  std::optional<Direction> two_way() const;
  // front-left | front-right | back-left | back-right, or front | back when collinear.
  Direction quadrant() const;
};

inline constexpr double kCollinearEpsilon = 1e-9;

RelativeDirection relative_direction(const schema::TraceDocument& doc, std::string_view standing_at,
                                     std::string_view facing, std::string_view query);

// Categories sorted by earliest first_seen_at among their instances; ties keep registry order.
std::vector<std::string> appearance_order(const schema::TraceDocument& doc,
                                          std::span<const std::string> categories);

struct Pose {
  schema::Vec2 pos;
  schema::Facing facing;
  std::size_t step_index = 0;
};

// Latest step with time <= t; times before the first step return the first step.
Pose camera_pose_at(const schema::TraceDocument& doc, double t);

// ---------------------------------------------------------------------------
// Route evaluation

enum class RouteActionKind { TurnLeft, TurnRight, TurnBack, GoForward };

struct RouteAction {
  RouteActionKind kind;
  std::string target;  // GoForward only
};

// Parses "Turn left, go forward until the sofa, turn right, ..." style sequences.
// Throws OracleError(UnparsableCandidate) on phrases it does not recognise.
std::vector<RouteAction> parse_route_actions(std::string_view candidate);

struct CandidateScore {
  double angular_error = std::numeric_limits<double>::infinity();  // radians
  std::optional<std::string> problem;                                // why it could not be scored
};

struct RouteChoice {
  std::size_t index = 0;
  std::vector<CandidateScore> scores;
};

RouteChoice route_eval(const schema::TraceDocument& doc, std::string_view start,
                       std::string_view initial_facing, std::span<const std::string> candidates);

// ---------------------------------------------------------------------------
// Query dispatch

struct OracleQuery {
  TaskKind task = TaskKind::ObjCount;
  std::vector<std::string> subjects;  // entity refs or categories, task-specific order
  std::vector<std::string> options;   // option texts for multiple-choice tasks
};

struct OracleAnswer {
  std::optional<double> value;
  Unit unit = Unit::None;
  std::optional<std::size_t> option_index;
  std::optional<std::string> option;
  std::string trace;  // human-readable derivation

  // "0.8062 m", "11.2 m^2", "3", or the option text.
  std::string display() const;
  // Backtick answer text a model would give: option letter or bare number.
  std::string answer_text() const;
};

OracleAnswer answer(const schema::TraceDocument& doc, const OracleQuery& query);

// Builds a query from VSI-style question text. Returns nullopt for unrecognised phrasings.
std::optional<OracleQuery> query_from_question(TaskKind task, std::string_view question,
                                               std::span<const std::string> options);

}  // namespace tracekit::oracle
