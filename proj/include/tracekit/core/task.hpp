#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace tracekit {

enum class AnswerType { NA, MCA };

std::string_view to_string(AnswerType t);
std::optional<AnswerType> parse_answer_type(std::string_view s);

// The eight VSI task families. `Other` covers OST sub-tasks, which are carried by name only.
enum class TaskKind { ObjCount, AbsDist, ObjSize, RoomSize, RelDist, RelDir, Route, Order, Other };

inline constexpr std::array<TaskKind, 8> kVsiTasks = {
    TaskKind::ObjCount, TaskKind::AbsDist, TaskKind::ObjSize, TaskKind::RoomSize,
    TaskKind::RelDist,  TaskKind::RelDir,  TaskKind::Route,   TaskKind::Order};

// Canonical short names: obj_count, abs_dist, obj_size, room_size, rel_dist, rel_dir, route, order.
std::string_view task_name(TaskKind k);
// Column header used in report tables ("Obj. Cnt.", "Abs. Dist.", ...).
std::string_view task_column(TaskKind k);
// Accepts canonical names and the upstream VSI-Bench question_type strings.
TaskKind parse_task_kind(std::string_view s);

enum class Unit { None, Count, Meters, Centimeters, SquareMeters };

std::string_view unit_suffix(Unit u);
Unit task_unit(TaskKind k);

struct Task {
  TaskKind kind = TaskKind::Other;
  std::string name;  // canonical name for VSI kinds, upstream label otherwise

  static Task from_string(std::string_view s);
  bool operator==(const Task&) const = default;
};

enum class Benchmark { VSI, OST };

std::string_view to_string(Benchmark b);
std::optional<Benchmark> parse_benchmark(std::string_view s);

}  // namespace tracekit
