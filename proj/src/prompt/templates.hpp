#pragma once

#include <string_view>

namespace tracekit::prompt::templates {

inline constexpr std::string_view kPostPromptNA =
    "Please answer the question using a single word or phrase enclosed in backticks.";
inline constexpr std::string_view kPostPromptMCA =
    "Answer with the option's letter from the given choices only, enclosed in backticks.";

// Placeholders substituted at assembly time.
inline constexpr std::string_view kPostPromptSlot = "{POST_PROMPT}";
inline constexpr std::string_view kCategoriesSlot = "{categories_of_interest}";

extern const std::string_view kBaseSystem;
extern const std::string_view kTextOnlySystem;
extern const std::string_view kCognitiveMapSystem;

// The TRACE system prompt is stored in pieces so ablations can drop whole sections.
extern const std::string_view kTraceHead;
extern const std::string_view kTraceCoordinates;
extern const std::string_view kTraceMeta;
extern const std::string_view kTraceTrajectoryRules;
extern const std::string_view kTraceEntityRules;
extern const std::string_view kTraceFormatHeader;
extern const std::string_view kTraceYamlMeta;
extern const std::string_view kTraceYamlTrajectory;
extern const std::string_view kTraceYamlEntities;
extern const std::string_view kTraceTail;

extern const std::string_view kUserDirect;
extern const std::string_view kUserCoT;
extern const std::string_view kUserToT;
extern const std::string_view kUserLtM;
extern const std::string_view kUserCognitiveMap;
extern const std::string_view kUserTrace;

extern const std::string_view kStageOne;

}  // namespace tracekit::prompt::templates
