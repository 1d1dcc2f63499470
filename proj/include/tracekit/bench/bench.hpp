#pragma once

// Benchmark records loaded from JSONL, OST dialogue grouping, subset sampling,
// source stratification and frame sampling.

#include "tracekit/core/media.hpp"
#include "tracekit/core/task.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tracekit::bench {

enum class BenchErrorKind { SchemaError, MissingMedia, TooFewScenes, Io };

std::string_view to_string(BenchErrorKind k);

class BenchError : public std::runtime_error {
 public:
  BenchError(BenchErrorKind kind, std::optional<std::size_t> line, const std::string& detail);
  BenchErrorKind kind() const noexcept { return kind_; }
  std::optional<std::size_t> line() const noexcept { return line_; }

 private:
  BenchErrorKind kind_;
  std::optional<std::size_t> line_;
};

inline constexpr std::string_view kUnknownSource = "unknown";
inline constexpr std::string_view kOstSource = "OST-scene";

struct QARecord {
  std::string id;
  Benchmark benchmark = Benchmark::VSI;
  std::string scene_id;
  std::string source;  // ARKitScenes | ScanNet | ScanNetPP | OST-scene | unknown
  std::vector<MediaRef> media;
  Task task;
  AnswerType answer_type = AnswerType::NA;
  std::string question;
  std::vector<std::string> options;  // option texts; labels are A, B, C, ...
  std::string ground_truth;          // option letter for MCA, numeral for NA
  std::optional<int> turn_index;

  // Index of the ground-truth option (MCA) or the numeric ground truth (NA).
  std::optional<std::size_t> gt_option() const;
  std::optional<double> gt_value() const;
};

// Throws BenchError(SchemaError) describing the first broken invariant.
void check_record(const QARecord& r);

// Prefix rules mapping scene ids to sources; the longest matching prefix wins.
class SourceRules {
 public:
  SourceRules() = default;
  // key=value lines, '#' comments; keys are scene-id prefixes.
  static SourceRules parse(std::string_view text);
  static SourceRules load(const std::string& path);
  static SourceRules defaults();

  void add(std::string prefix, std::string source);
  // Source for `scene_id`, or "unknown".
  std::string classify(std::string_view scene_id) const;

 private:
  std::vector<std::pair<std::string, std::string>> rules_;
};

std::string stratify_source(const QARecord& r, const SourceRules& rules);

struct LoadOptions {
  std::filesystem::path media_root;  // base for relative media paths and scene frame folders
  std::size_t frames = 16;           // k for frame_manifest when media is a directory
  SourceRules sources = SourceRules::defaults();
};

struct LoadResult {
  std::vector<QARecord> records;
  std::vector<std::string> warnings;  // MissingMedia and similar, with line numbers
};

// Parses one JSONL record. `line` is used in error messages.
QARecord parse_record(std::string_view json_line, std::size_t line, const LoadOptions& opts,
                      std::vector<std::string>* warnings);

LoadResult load_vsi(const std::string& path, const LoadOptions& opts = {});

struct DialogueTurn {
  int turn_index = 0;
  QARecord record;
};

struct DialogueScene {
  std::string scene_id;
  std::vector<DialogueTurn> turns;  // contiguous from 0
};

struct OstLoadResult {
  std::vector<DialogueScene> scenes;
  std::vector<std::string> warnings;
};

OstLoadResult load_ost(const std::string& path, const LoadOptions& opts = {});

inline constexpr std::size_t kOstSubsetSize = 200;
inline constexpr std::uint64_t kDefaultSeed = 0;

// Lexicographically sorted scene ids, then `n` draws without replacement from
// std::mt19937_64(seed) (partial Fisher-Yates, rejection-sampled bounded draws).
// Returns the chosen ids sorted.
std::vector<std::string> sample_scene_ids(std::vector<std::string> scene_ids, std::uint64_t seed,
                                          std::size_t n = kOstSubsetSize);

std::vector<DialogueScene> sample_ost_subset(const std::vector<DialogueScene>& scenes, std::uint64_t seed,
                                             std::size_t n = kOstSubsetSize);

// Uniform temporal sampling: indices round(i*(N-1)/(k-1)); k == 1 gives N/2; k >= N gives all.
std::vector<std::size_t> frame_indices(std::size_t n, std::size_t k);

// Image files of `media_root/scene_id` sorted by name, sampled by frame_indices.
std::vector<MediaRef> frame_manifest(const std::filesystem::path& media_root, std::string_view scene_id,
                                     std::size_t k);

// Lines of the form `vsi=a, b, c` in a categories file.
std::vector<std::string> load_categories(const std::string& path, std::string_view benchmark);

}  // namespace tracekit::bench
