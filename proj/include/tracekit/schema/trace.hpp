#pragma once

// TRACE documents: the three-section allocentric scene description
// (Meta_Context, Trajectory, Entity_Registry) emitted by a model as YAML.

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tracekit::schema {

struct Vec2 {
  double x = 0.0;  // meters
  double y = 0.0;  // meters
  bool operator==(const Vec2&) const = default;
};

struct Size3 {
  double width = 0.0;
  double height = 0.0;
  double depth = 0.0;
  bool operator==(const Size3&) const = default;
};

// Eight discrete headings; +Y is north, +X is east.
enum class Octant : std::uint8_t { N, NE, E, SE, S, SW, W, NW };

inline constexpr std::array<Octant, 8> kOctants = {Octant::N, Octant::NE, Octant::E, Octant::SE,
                                                   Octant::S, Octant::SW, Octant::W, Octant::NW};

std::string_view octant_code(Octant o);

// Resolves the leading heading token of labels such as "NW (-X,+Y)", "North (+Y)" or
// "north-east". Returns nullopt when the token is not one of the eight headings.
std::optional<Octant> parse_facing_token(std::string_view label);

struct Facing {
  Octant octant = Octant::N;
  std::string raw_label;  // label as written, including any axis annotation

  static Facing of(Octant o) { return Facing{o, std::string(octant_code(o))}; }
  bool operator==(const Facing&) const = default;
};

Vec2 octant_vector(Octant o);
// Unit vector for the facing's octant.
Vec2 facing_to_vector(const Facing& f);

struct MetaContext {
  std::string room_topology;
  std::string grid_alignment;
  std::string initial_camera_heading;
  bool operator==(const MetaContext&) const = default;
};

struct TrajectoryStep {
  std::int64_t step = 0;
  double time = 0.0;  // seconds
  Vec2 pos;
  Facing facing;
  std::string action;
  bool operator==(const TrajectoryStep&) const = default;
};

struct Entity {
  std::string id;
  std::string category;
  double first_seen_at = 0.0;  // seconds
  std::optional<std::string> state;
  Vec2 estimated_pos;
  std::optional<Size3> approx_size;
  std::optional<std::string> orientation;
  std::string visual_signature;
  std::string spatial_relation;
  bool operator==(const Entity&) const = default;
};

struct TraceDocument {
  MetaContext meta;
  std::vector<TrajectoryStep> trajectory;
  std::vector<Entity> entities;
  bool operator==(const TraceDocument&) const = default;
};

// ---------------------------------------------------------------------------
// Parsing

enum class ParseErrorKind {
  MissingSection,     // a required top-level section is absent
  MalformedItem,      // a section or list entry is missing a required key or has the wrong shape
  BadNumber,          // unparsable coordinate, size, step or time
  BadFacing,          // facing token outside the eight-heading vocabulary
  MalformedDocument,  // not YAML, or not a mapping at the top level
};

std::string_view to_string(ParseErrorKind k);

class ParseError : public std::runtime_error {
 public:
  ParseError(ParseErrorKind kind, std::string section, std::optional<std::size_t> index,
             std::string detail);

  ParseErrorKind kind() const noexcept { return kind_; }
  const std::string& section() const noexcept { return section_; }
  std::optional<std::size_t> index() const noexcept { return index_; }
  // "Entity_Registry[0]", "Trajectory" or "" for document-level errors.
  std::string location() const;

 private:
  ParseErrorKind kind_;
  std::string section_;
  std::optional<std::size_t> index_;
};

struct ParseWarning {
  std::string section;
  std::optional<std::size_t> index;
  std::string key;
  std::string message;
};

struct ParseResult {
  TraceDocument document;
  std::vector<ParseWarning> warnings;
};

// Throws ParseError. Never aborts on arbitrary input.
ParseResult parse_trace(std::string_view text);

// Canonical YAML emitter; parse_trace(serialize_trace(d)).document == d for valid d.
std::string serialize_trace(const TraceDocument& doc);

// ---------------------------------------------------------------------------
// Validation

enum class Severity { Error, Warning };

enum class Rule {
  DuplicateId,          // error
  NonPositiveSize,      // error
  FacingVocabulary,     // error
  OriginNotZero,        // warning
  NonMonotoneTime,      // error
  GroupedEntity,        // warning
  SeenAfterTrajectory,  // warning
  NonFiniteValue,       // error
  StepSequence,         // warning
  IdFormat,             // warning
};

std::string_view rule_name(Rule r);
std::string_view to_string(Severity s);

struct Violation {
  Severity severity;
  Rule rule;
  std::string location;
  std::string message;
};

std::vector<Violation> validate_trace(const TraceDocument& doc);

std::size_t count_errors(const std::vector<Violation>& violations);
std::size_t count_warnings(const std::vector<Violation>& violations);

// ---------------------------------------------------------------------------
// Model-output helpers

// Text of the TRACE region of a chat reply: after the representation header (or inside the
// first fenced block) and before the final "Answer:" line, with code fences removed.
std::optional<std::string> extract_trace_block(std::string_view model_output);

enum class Ablation { DropTrajectory, DropEntities };

TraceDocument ablate_document(TraceDocument doc, Ablation mode);

}  // namespace tracekit::schema
