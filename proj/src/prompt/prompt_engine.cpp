#include "tracekit/prompt/prompt_engine.hpp"

#include "templates.hpp"

#include "tracekit/core/text.hpp"

namespace tracekit::prompt {

namespace t = templates;

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::Direct: return "direct";
    case Strategy::CoT: return "cot";
    case Strategy::ToT: return "tot";
    case Strategy::LtM: return "ltm";
    case Strategy::CognitiveMap: return "cm";
    case Strategy::Trace: return "trace";
  }
  return "direct";
}

std::optional<Strategy> parse_strategy(std::string_view s) {
  const std::string v = text::to_lower(text::trim(s));
  for (Strategy k : kStrategies) {
    if (v == to_string(k)) return k;
  }
  if (v == "cognitive_map" || v == "cognitivemap") return Strategy::CognitiveMap;
  if (v == "least_to_most") return Strategy::LtM;
  if (v == "chain_of_thought") return Strategy::CoT;
  if (v == "tree_of_thoughts") return Strategy::ToT;
  return std::nullopt;
}

std::string_view to_string(Ablation a) {
  switch (a) {
    case Ablation::Full: return "full";
    case Ablation::NoTrajectory: return "no_trajectory";
    case Ablation::NoEntityRegistry: return "no_entity_registry";
  }
  return "full";
}

std::optional<Ablation> parse_ablation(std::string_view s) {
  const std::string v = text::to_lower(text::trim(s));
  for (Ablation a : {Ablation::Full, Ablation::NoTrajectory, Ablation::NoEntityRegistry}) {
    if (v == to_string(a)) return a;
  }
  return std::nullopt;
}

std::string_view to_string(Mode m) {
  switch (m) {
    case Mode::OneStage: return "one_stage";
    case Mode::TwoStageS1: return "two_stage_s1";
    case Mode::TwoStageS2: return "two_stage_s2";
    case Mode::TextOnlyParser: return "text_only_parser";
  }
  return "one_stage";
}

namespace {

std::string_view error_name(PromptErrorKind k) {
  switch (k) {
    case PromptErrorKind::MissingCategories: return "MissingCategories";
    case PromptErrorKind::MissingOptions: return "MissingOptions";
    case PromptErrorKind::MissingContext: return "MissingContext";
    case PromptErrorKind::InvalidAblation: return "InvalidAblation";
  }
  return "PromptError";
}

std::string substitute(std::string_view tmpl, std::string_view slot, std::string_view value) {
  std::string out(tmpl);
  for (std::size_t at = out.find(slot); at != std::string::npos; at = out.find(slot, at + value.size())) {
    out.replace(at, slot.size(), value);
  }
  return out;
}

std::string with_post_prompt(std::string_view tmpl, AnswerType t) {
  return substitute(tmpl, t::kPostPromptSlot, post_prompt(t));
}

std::string trace_system(Ablation a) {
  std::string out;
  out += t::kTraceHead;
  out += t::kTraceCoordinates;
  out += t::kTraceMeta;
  if (a != Ablation::NoTrajectory) out += t::kTraceTrajectoryRules;
  if (a != Ablation::NoEntityRegistry) out += t::kTraceEntityRules;
  out += t::kTraceFormatHeader;
  out += t::kTraceYamlMeta;
  if (a != Ablation::NoTrajectory) out += t::kTraceYamlTrajectory;
  if (a != Ablation::NoEntityRegistry) out += t::kTraceYamlEntities;
  out += t::kTraceTail;
  return out;
}

std::string_view user_template(Strategy s) {
  switch (s) {
    case Strategy::Direct: return t::kUserDirect;
    case Strategy::CoT: return t::kUserCoT;
    case Strategy::ToT: return t::kUserToT;
    case Strategy::LtM: return t::kUserLtM;
    case Strategy::CognitiveMap: return t::kUserCognitiveMap;
    case Strategy::Trace: return t::kUserTrace;
  }
  return t::kUserDirect;
}

std::string question_block(std::string_view question, std::span<const std::string> options) {
  std::string out = "\n\nQuestion:\n";
  out += question;
  if (!options.empty()) {
    out += "\n\nOptions:\n";
    out += format_options(options);
  }
  out += "\n";
  return out;
}

}  // namespace

PromptError::PromptError(PromptErrorKind kind, const std::string& detail)
    : std::runtime_error(std::string(error_name(kind)) + ": " + detail), kind_(kind) {}

std::string_view post_prompt(AnswerType t) {
  return t == AnswerType::MCA ? t::kPostPromptMCA : t::kPostPromptNA;
}

std::string build_system_prompt(const StrategySpec& spec, AnswerType t,
                                std::span<const std::string> categories) {
  if (spec.ablation != Ablation::Full && spec.strategy != Strategy::Trace) {
    throw PromptError(PromptErrorKind::InvalidAblation, "ablations apply to the trace strategy only");
  }
  switch (spec.strategy) {
    case Strategy::CognitiveMap: {
      if (categories.empty()) {
        throw PromptError(PromptErrorKind::MissingCategories, "cognitive map needs categories of interest");
      }
      const std::string joined = text::join({categories.begin(), categories.end()}, ", ");
      return with_post_prompt(substitute(t::kCognitiveMapSystem, t::kCategoriesSlot, joined), t);
    }
    case Strategy::Trace: return with_post_prompt(trace_system(spec.ablation), t);
    default: return with_post_prompt(t::kBaseSystem, t);
  }
}

std::string format_options(std::span<const std::string> options) {
  std::string out;
  for (std::size_t i = 0; i < options.size(); ++i) {
    if (i) out += '\n';
    out += static_cast<char>('A' + i);
    out += ". ";
    out += options[i];
  }
  return out;
}

std::string build_user_prompt(Strategy s, std::string_view question, std::span<const std::string> options) {
  return std::string(user_template(s)) + question_block(question, options);
}

std::string_view stage_one_instruction() { return t::kStageOne; }

std::string build_text_only_system_prompt(AnswerType t) { return with_post_prompt(t::kTextOnlySystem, t); }

std::string context_block(std::string_view context) {
  std::string out = "Structured Textual Allocentric Representation:\n";
  out += context;
  out += "\n\n";
  return out;
}

PromptBundle build_bundle(const PromptRequest& req, Mode mode, std::span<const MediaRef> media,
                          std::optional<std::string_view> context) {
  if (req.answer_type == AnswerType::MCA && req.options.empty() && mode != Mode::TwoStageS1) {
    throw PromptError(PromptErrorKind::MissingOptions, "multiple-choice question without options");
  }
  if ((mode == Mode::TwoStageS2 || mode == Mode::TextOnlyParser) && !context) {
    throw PromptError(PromptErrorKind::MissingContext, std::string(to_string(mode)) + " needs a context");
  }
  const std::span<const std::string> options =
      req.answer_type == AnswerType::MCA ? std::span<const std::string>(req.options)
                                         : std::span<const std::string>();
  PromptBundle b;
  b.mode = mode;
  switch (mode) {
    case Mode::OneStage:
      b.system_text = build_system_prompt(req.strategy, req.answer_type, req.categories);
      b.user_text = build_user_prompt(req.strategy.strategy, req.question, options);
      b.media.assign(media.begin(), media.end());
      break;
    case Mode::TwoStageS1:
      b.system_text = build_system_prompt(StrategySpec{Strategy::Trace, req.strategy.strategy == Strategy::Trace
                                                                            ? req.strategy.ablation
                                                                            : Ablation::Full},
                                          req.answer_type);
      b.user_text = std::string(stage_one_instruction());
      b.media.assign(media.begin(), media.end());
      break;
    case Mode::TwoStageS2:
      b.system_text = build_system_prompt(StrategySpec{}, req.answer_type);
      b.user_text = context_block(*context) + build_user_prompt(Strategy::Direct, req.question, options);
      b.media.assign(media.begin(), media.end());
      break;
    case Mode::TextOnlyParser:
      b.system_text = build_text_only_system_prompt(req.answer_type);
      b.user_text = context_block(*context) + build_user_prompt(Strategy::Direct, req.question, options);
      break;
  }
  return b;
}

std::vector<Message> build_messages(const PromptBundle& bundle) {
  Message system{"system", {ContentPart{ContentPart::Kind::Text, bundle.system_text}}};
  Message user{"user", {}};
  for (const auto& m : bundle.media) {
    user.content.push_back(
        ContentPart{m.is_video ? ContentPart::Kind::Video : ContentPart::Kind::Image, m.path});
  }
  user.content.push_back(ContentPart{ContentPart::Kind::Text, bundle.user_text});
  return {std::move(system), std::move(user)};
}

std::size_t media_part_count(const std::vector<Message>& messages) {
  std::size_t n = 0;
  for (const auto& m : messages) {
    for (const auto& p : m.content) n += p.kind != ContentPart::Kind::Text;
  }
  return n;
}

std::string golden_text(const PromptBundle& bundle) {
  return bundle.system_text + "\n----- USER -----\n" + bundle.user_text;
}

}  // namespace tracekit::prompt
