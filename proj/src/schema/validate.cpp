#include "tracekit/schema/trace.hpp"

#include <algorithm>
#include <cmath>
#include <regex>
#include <unordered_map>

namespace tracekit::schema {

std::string_view rule_name(Rule r) {
  switch (r) {
    case Rule::DuplicateId: return "duplicate_id";
    case Rule::NonPositiveSize: return "non_positive_size";
    case Rule::FacingVocabulary: return "facing_vocabulary";
    case Rule::OriginNotZero: return "origin_not_zero";
    case Rule::NonMonotoneTime: return "non_monotone_time";
    case Rule::GroupedEntity: return "grouped_entity";
    case Rule::SeenAfterTrajectory: return "seen_after_trajectory";
    case Rule::NonFiniteValue: return "non_finite_value";
    case Rule::StepSequence: return "step_sequence";
    case Rule::IdFormat: return "id_format";
  }
  return "unknown";
}

std::string_view to_string(Severity s) { return s == Severity::Error ? "error" : "warning"; }

namespace {

std::string at(const char* section, std::size_t index) {
  return std::string(section) + "[" + std::to_string(index) + "]";
}

bool finite(const Vec2& v) { return std::isfinite(v.x) && std::isfinite(v.y); }

// Count phrases that indicate several objects folded into one registry entry.
bool looks_grouped(const std::string& category) {
  static const std::regex kGrouped(
      R"((\bx\s*\d+\b)|(\b\d+\s*x\b)|(^\s*\d+\s+\S)|(\(\s*\d+\s*\))|)"
      R"((\b(two|three|four|five|six|seven|eight|nine|ten|twelve|several|multiple|many|)"
      R"(pair of|set of|group of|stack of|row of|rows of)\b))",
      std::regex::icase | std::regex::ECMAScript);
  return std::regex_search(category, kGrouped);
}

bool well_formed_id(const std::string& id) {
  static const std::regex kId(R"(^[a-z][a-z0-9_]*_[0-9]{2,}$)");
  return std::regex_match(id, kId);
}

}  // namespace

std::vector<Violation> validate_trace(const TraceDocument& doc) {
  std::vector<Violation> out;
  auto add = [&out](Severity sev, Rule rule, std::string loc, std::string msg) {
    out.push_back(Violation{sev, rule, std::move(loc), std::move(msg)});
  };

  const auto& traj = doc.trajectory;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const auto& s = traj[i];
    const std::string loc = at("Trajectory", i);
    if (!finite(s.pos) || !std::isfinite(s.time)) {
      add(Severity::Error, Rule::NonFiniteValue, loc, "position or time is not finite");
    }
    auto token = parse_facing_token(s.facing.raw_label);
    if (!token || *token != s.facing.octant) {
      add(Severity::Error, Rule::FacingVocabulary, loc,
          "facing '" + s.facing.raw_label + "' is not a valid heading for " +
              std::string(octant_code(s.facing.octant)));
    }
    const bool step_ok =
        i == 0 ? s.step == 0 : s.step > traj[i - 1].step;
    if (!step_ok) {
      add(Severity::Warning, Rule::StepSequence, loc,
          "step " + std::to_string(s.step) + " breaks the 0,1,2,... sequence");
    }
    if (i > 0 && s.time < traj[i - 1].time) {
      add(Severity::Error, Rule::NonMonotoneTime, loc, "time decreases from previous step");
    }
  }
  if (!traj.empty() && !(traj.front().pos.x == 0.0 && traj.front().pos.y == 0.0)) {
    add(Severity::Warning, Rule::OriginNotZero, at("Trajectory", 0),
        "the camera starting position should be [0.0, 0.0]");
  }

  double last_time = 0.0;
  for (const auto& s : traj) last_time = std::max(last_time, s.time);

  std::unordered_map<std::string, std::size_t> first_index;
  for (std::size_t i = 0; i < doc.entities.size(); ++i) {
    const auto& e = doc.entities[i];
    const std::string loc = at("Entity_Registry", i);
    auto [it, inserted] = first_index.emplace(e.id, i);
    if (!inserted) {
      add(Severity::Error, Rule::DuplicateId, loc,
          "id '" + e.id + "' already used by " + at("Entity_Registry", it->second));
    }
    if (!well_formed_id(e.id)) {
      add(Severity::Warning, Rule::IdFormat, loc,
          "id '" + e.id + "' should look like <name>_<NN>");
    }
    bool size_finite = true;
    if (e.approx_size) {
      const auto& z = *e.approx_size;
      size_finite = std::isfinite(z.width) && std::isfinite(z.height) && std::isfinite(z.depth);
      if (size_finite && (z.width <= 0.0 || z.height <= 0.0 || z.depth <= 0.0)) {
        add(Severity::Error, Rule::NonPositiveSize, loc, "approx_size components must be > 0");
      }
    }
    if (!finite(e.estimated_pos) || !std::isfinite(e.first_seen_at) || !size_finite) {
      add(Severity::Error, Rule::NonFiniteValue, loc, "position, size or time is not finite");
    }
    if (looks_grouped(e.category)) {
      add(Severity::Warning, Rule::GroupedEntity, loc,
          "category '" + e.category + "' looks like a grouped entry");
    }
    if (!traj.empty() && e.first_seen_at > last_time) {
      add(Severity::Warning, Rule::SeenAfterTrajectory, loc,
          "first_seen_at is after the last trajectory step");
    }
  }
  return out;
}

std::size_t count_errors(const std::vector<Violation>& violations) {
  return static_cast<std::size_t>(std::count_if(
      violations.begin(), violations.end(), [](const Violation& v) { return v.severity == Severity::Error; }));
}

std::size_t count_warnings(const std::vector<Violation>& violations) {
  return violations.size() - count_errors(violations);
}

TraceDocument ablate_document(TraceDocument doc, Ablation mode) {
  if (mode == Ablation::DropTrajectory) {
    doc.trajectory.clear();
  } else {
    doc.entities.clear();
  }
  return doc;
}

}  // namespace tracekit::schema
