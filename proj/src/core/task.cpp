#include "tracekit/core/task.hpp"

#include "tracekit/core/text.hpp"

#include <utility>

namespace tracekit {

std::string_view to_string(AnswerType t) { return t == AnswerType::NA ? "NA" : "MCA"; }

std::optional<AnswerType> parse_answer_type(std::string_view s) {
  s = text::trim(s);
  if (text::iequals(s, "NA")) return AnswerType::NA;
  if (text::iequals(s, "MCA") || text::iequals(s, "MCQ")) return AnswerType::MCA;
  return std::nullopt;
}

std::string_view task_name(TaskKind k) {
  switch (k) {
    case TaskKind::ObjCount: return "obj_count";
    case TaskKind::AbsDist: return "abs_dist";
    case TaskKind::ObjSize: return "obj_size";
    case TaskKind::RoomSize: return "room_size";
    case TaskKind::RelDist: return "rel_dist";
    case TaskKind::RelDir: return "rel_dir";
    case TaskKind::Route: return "route";
    case TaskKind::Order: return "order";
    case TaskKind::Other: return "other";
  }
  return "other";
}

std::string_view task_column(TaskKind k) {
  switch (k) {
    case TaskKind::ObjCount: return "Obj. Cnt.";
    case TaskKind::AbsDist: return "Abs. Dist.";
    case TaskKind::ObjSize: return "Obj. Size";
    case TaskKind::RoomSize: return "Room Size";
    case TaskKind::RelDist: return "Rel. Dist.";
    case TaskKind::RelDir: return "Rel. Dir.";
    case TaskKind::Route: return "Route";
    case TaskKind::Order: return "Order";
    case TaskKind::Other: return "Other";
  }
  return "Other";
}

TaskKind parse_task_kind(std::string_view s) {
  static const std::pair<std::string_view, TaskKind> kAliases[] = {
      {"obj_count", TaskKind::ObjCount},
      {"object_counting", TaskKind::ObjCount},
      {"count", TaskKind::ObjCount},
      {"abs_dist", TaskKind::AbsDist},
      {"object_abs_distance", TaskKind::AbsDist},
      {"obj_size", TaskKind::ObjSize},
      {"object_size_estimation", TaskKind::ObjSize},
      {"room_size", TaskKind::RoomSize},
      {"room_size_estimation", TaskKind::RoomSize},
      {"rel_dist", TaskKind::RelDist},
      {"object_rel_distance", TaskKind::RelDist},
      {"rel_dir", TaskKind::RelDir},
      {"object_rel_direction", TaskKind::RelDir},
      {"object_rel_direction_easy", TaskKind::RelDir},
      {"object_rel_direction_medium", TaskKind::RelDir},
      {"object_rel_direction_hard", TaskKind::RelDir},
      {"route", TaskKind::Route},
      {"route_planning", TaskKind::Route},
      {"order", TaskKind::Order},
      {"obj_appearance_order", TaskKind::Order},
      {"appearance_order", TaskKind::Order},
  };
  const std::string lowered = text::to_lower(text::trim(s));
  for (const auto& [alias, kind] : kAliases) {
    if (lowered == alias) return kind;
  }
  return TaskKind::Other;
}

std::string_view unit_suffix(Unit u) {
  switch (u) {
    case Unit::None: return "";
    case Unit::Count: return "";
    case Unit::Meters: return "m";
    case Unit::Centimeters: return "cm";
    case Unit::SquareMeters: return "m^2";
  }
  return "";
}

Unit task_unit(TaskKind k) {
  switch (k) {
    case TaskKind::ObjCount: return Unit::Count;
    case TaskKind::AbsDist: return Unit::Meters;
    case TaskKind::ObjSize: return Unit::Centimeters;
    case TaskKind::RoomSize: return Unit::SquareMeters;
    default: return Unit::None;
  }
}

Task Task::from_string(std::string_view s) {
  Task t;
  t.kind = parse_task_kind(s);
  t.name = t.kind == TaskKind::Other ? std::string(text::trim(s)) : std::string(task_name(t.kind));
  return t;
}

std::string_view to_string(Benchmark b) { return b == Benchmark::VSI ? "VSI" : "OST"; }

std::optional<Benchmark> parse_benchmark(std::string_view s) {
  s = text::trim(s);
  if (text::iequals(s, "VSI") || text::iequals(s, "VSI-Bench")) return Benchmark::VSI;
  if (text::iequals(s, "OST") || text::iequals(s, "OST-Bench")) return Benchmark::OST;
  return std::nullopt;
}

}  // namespace tracekit
