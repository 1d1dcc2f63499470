#pragma once

// Prompt assembly for the six prompting strategies and the four inference modes.
// Output is byte-deterministic; the committed goldens under goldens/prompts pin it.

#include "tracekit/core/media.hpp"
#include "tracekit/core/task.hpp"

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tracekit::prompt {

enum class Strategy { Direct, CoT, ToT, LtM, CognitiveMap, Trace };

inline constexpr Strategy kStrategies[] = {Strategy::Direct, Strategy::CoT,          Strategy::ToT,
                                           Strategy::LtM,    Strategy::CognitiveMap, Strategy::Trace};

// direct, cot, tot, ltm, cm, trace
std::string_view to_string(Strategy s);
std::optional<Strategy> parse_strategy(std::string_view s);

enum class Ablation { Full, NoTrajectory, NoEntityRegistry };

// full, no_trajectory, no_entity_registry
std::string_view to_string(Ablation a);
std::optional<Ablation> parse_ablation(std::string_view s);

struct StrategySpec {
  Strategy strategy = Strategy::Direct;
  Ablation ablation = Ablation::Full;  // meaningful only for Trace
  bool operator==(const StrategySpec&) const = default;
};

enum class Mode { OneStage, TwoStageS1, TwoStageS2, TextOnlyParser };

// one_stage, two_stage_s1, two_stage_s2, text_only_parser
std::string_view to_string(Mode m);

enum class PromptErrorKind { MissingCategories, MissingOptions, MissingContext, InvalidAblation };

class PromptError : public std::runtime_error {
 public:
  PromptError(PromptErrorKind kind, const std::string& detail);
  PromptErrorKind kind() const noexcept { return kind_; }

 private:
  PromptErrorKind kind_;
};

std::string_view post_prompt(AnswerType t);

std::string build_system_prompt(const StrategySpec& spec, AnswerType t,
                                std::span<const std::string> categories = {});

// "A. first\nB. second" (no trailing newline).
std::string format_options(std::span<const std::string> options);

// Strategy template plus the question block; MCA adds the options block.
std::string build_user_prompt(Strategy s, std::string_view question,
                              std::span<const std::string> options = {});

// Generation-only instruction for the first pass of the two-stage mode.
std::string_view stage_one_instruction();

// Text-description system prompt used when the parser sees no media.
std::string build_text_only_system_prompt(AnswerType t);

// Header block carrying a generated representation into a later call.
std::string context_block(std::string_view context);

using tracekit::MediaRef;

struct PromptBundle {
  std::string system_text;
  std::string user_text;
  std::vector<MediaRef> media;
  Mode mode = Mode::OneStage;
};

struct PromptRequest {
  StrategySpec strategy;
  AnswerType answer_type = AnswerType::NA;
  std::string question;
  std::vector<std::string> options;
  std::vector<std::string> categories;  // CognitiveMap only
};

// two_stage_s2 and text_only_parser require `context`; text_only_parser attaches no media.
PromptBundle build_bundle(const PromptRequest& req, Mode mode, std::span<const MediaRef> media,
                          std::optional<std::string_view> context = std::nullopt);

struct ContentPart {
  enum class Kind { Text, Image, Video };
  Kind kind = Kind::Text;
  std::string value;  // text, or media path
};

struct Message {
  std::string role;
  std::vector<ContentPart> content;
};

// [system, user]; the user message lists media parts first, then its text.
std::vector<Message> build_messages(const PromptBundle& bundle);

std::size_t media_part_count(const std::vector<Message>& messages);

// Text of the golden file layout: system text, a separator line, user text.
std::string golden_text(const PromptBundle& bundle);

}  // namespace tracekit::prompt
