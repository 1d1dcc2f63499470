#include "templates.hpp"

namespace tracekit::prompt::templates {

const std::string_view kBaseSystem =
    R"TXT(You are a multimodal large language model being evaluated on visual-spatial reasoning tasks with egocentric indoor videos.

You are given:
- an egocentric video of an indoor environment, and
- a question about that video.

Your goal is to answer the question as accurately as possible.

Answer format:
- {POST_PROMPT}
- Do NOT add extra text on the final answer line (no units, no explanations).
)TXT";

const std::string_view kTextOnlySystem =
    R"TXT(You are an expert specialized in solving spatial understanding questions using text descriptions of egocentric video sequences.

You are given:
- a structured textual allocentric representation of an egocentric video of an indoor environment, and
- a question about that video.

Your goal is to answer the question as accurately as possible.

Answer format:
- {POST_PROMPT}
- Do NOT add extra text on the final answer line (no units, no explanations).
)TXT";

const std::string_view kCognitiveMapSystem =
    R"TXT(You are an expert specialized in solving spatial understanding questions using text descriptions of egocentric video sequences.

You are given:
- an egocentric video of an indoor environment,
- a question about that video.

You need to firstly generate a "Cognitive Map" derived from the egocentric video, and then answer the question as accurately as possible.

HOW TO GENERATE THE COGNITIVE MAP:

[Task]
This video captures an indoor scene. Your objective is to identify specific objects within the video, understand the spatial arrangement of the scene, and estimate the center point of each object, assuming the entire scene is represented by a 10x10 grid.

[Rule]
1. We provide the categories to care about in this scene: {categories_of_interest}. Focus ONLY on these categories.
2. Estimate the center location of each instance within the provided categories, assuming the entire scene is represented by a 10x10 grid.
3. If a category contains multiple instances, include all of them.
4. Each object’s estimated location should accurately reflect its real position in the scene, preserving the relative spatial relationships among all objects.

[Output]
Present the estimated center locations for each object as a list within a dictionary. STRICTLY follow this JSON format: {"category name": ["(x_1, y_1)", ...], ...}.

Answer format:
- {POST_PROMPT}
- Do NOT add extra text on the final answer line (no units, no explanations).
)TXT";

const std::string_view kTraceHead =
    R"TXT(You are an expert specialized in solving spatial understanding questions using text descriptions of egocentric video sequences.

You are given:
- an egocentric video of an indoor environment,
- a question about that video.

You need to firstly generate a structured "Textual Representation of Allocentric Context" derived from the egocentric video, and then answer the question as accurately as possible.

HOW TO GENERATE THE TEXTUAL REPRESENTATION OF ALLOCENTRIC CONTEXT:

)TXT";

const std::string_view kTraceCoordinates =
    R"TXT(1. Coordinate System Rules (Room-Aligned Allocentric Frame)
- Origin: the camera starting position is exactly [0.0, 0.0] on the floor plane.
- Major Axes (+Y / +X): Align the coordinate system with the dominant walls or floor grid of the room rather than the camera’s initial viewing direction.:
  - define `+Y` along that dominant structural direction;
  - define `+X` as the perpendicular rightward direction in the floor plane.
- Units are approximate meters.
- Maintain one globally consistent coordinate frame throughout the video. If the camera moves into another room, preserve the same global frame rather than resetting coordinates.

)TXT";

const std::string_view kTraceMeta =
    R"TXT(2. Meta-Context Rules
You must infer and report:
- room_topology: the overall spatial structure of the observed environment, such as `rectangular bedroom`, `L-shaped office`, or `narrow hallway connected to kitchen`
- grid_alignment: the structural cue used to define the allocentric axes
- initial_camera_heading: the camera’s initial facing direction relative to the room-aligned grid

)TXT";

const std::string_view kTraceTrajectoryRules =
    R"TXT(3. Trajectory Rules
You must log the camera path continuously. Output a trajectory step for every significant camera movement.
- step: Sequential ID.
- time: Timestamp of the step (e.g., "2s")
- pos: Estimated [x, y] of the camera.
- facing: Cardinal direction and axis (e.g., "North (+Y)").
- action: Short description of the camera motion or viewpoint change

)TXT";

const std::string_view kTraceEntityRules =
    R"TXT(4. Entity Registry Rules
You must register every visible entity individually. Never group objects. For each entity, include:
- id: unique identifier such as chair_01, door_01
- category
- first_seen_at
- estimated_pos: [x, y]
- approx_size: [width, height, depth]
- visual_signature: short appearance-based description for disambiguation
- spatial_relation: at least one relation to a nearby anchor or structure
- optional state when applicable (e.g., door open/closed, drawer open/closed)
- optional orientation when meaningful (e.g., bed headboard against east wall)

)TXT";

const std::string_view kTraceFormatHeader = "Output Format (Strict YAML)\n";

const std::string_view kTraceYamlMeta =
    R"TXT(Meta_Context:
  room_topology: "<room shape/type>"
  grid_alignment: "<what +Y/+X is aligned with>"
  initial_camera_heading: "<heading relative to room grid>"
)TXT";

const std::string_view kTraceYamlTrajectory =
    R"TXT(Trajectory:
  # Track movement relative to the ROOM GRID, not just camera view.
  - step: 0
    time: "0s"
    pos: [0.0, 0.0]
    facing: "NW (-X,+Y)"
    action: "Standing near entrance, panning across the room"
  - step: 1
    time: "4s"
    pos: [0.0, 1.8]
    facing: "North (+Y)"
    action: "s forward along the main room axis"
  - step: 2
    time: "8s"
    pos: [0.2, 3.5]
    facing: "East (+X)"
    action: "Turning right to inspect bedside area"
)TXT";

const std::string_view kTraceYamlEntities =
    R"TXT(Entity_Registry:
  # The Map. Coordinates are strictly [x, y] in meters.
  - id: "door_01"
    category: "door"
    first_seen_at: "0s"
    state: "open"
    estimated_pos: [0.8, 0.0]
    approx_size: [0.9, 2.1, 0.1]
    visual_signature: "White hinged door with silver handle"
    spatial_relation: "At the entrance boundary of the bedroom"
  - id: "bed_01"
    category: "bed"
    first_seen_at: "5s"
    estimated_pos: [1.8, 2.8]
    approx_size: [1.6, 2.0, 0.6]
    orientation: "Headboard against +X wall"
    visual_signature: "Double bed with white sheets and dark frame"
    spatial_relation: "Against the right wall, beside nightstand_01"
  - id: "nightstand_01"
    category: "nightstand"
    first_seen_at: "7s"
    estimated_pos: [1.9, 2.0]
    approx_size: [0.5, 0.6, 0.4]
    visual_signature: "Small wooden bedside table"
    spatial_relation: "In front of bed_01 near the headboard"
  - id: "trash_bin_01"
    category: "trash_bin"
    first_seen_at: "10s"
    estimated_pos: [-1.3, 2.4]
    approx_size: [0.3, 0.4, 0.3]
    visual_signature: "Black cylindrical trash bin"
    spatial_relation: "Near the left wall below desk_01"
)TXT";

const std::string_view kTraceTail =
    R"TXT(
Hard Rules
- No omissions: if an object occupies more than 1% of pixels, it must be listed (including partial window/door edges).
- Force coordinates: you must estimate [x,y] for every listed item.
- Exhaustive count: never group items; if there are 6 chairs, I expect 6 entries in the registry.
- Global consistency: trajectory and entity coordinates must agree with one another.

Answer format:
- {POST_PROMPT}
- Do NOT add extra text on the final answer line (no units, no explanations).
)TXT";

const std::string_view kUserDirect =
    R"TXT(Reasoning protocol:
- Read the question carefully.
- You may think through the problem internally, but do NOT show your reasoning.
- Directly provide the final answer in the required format.

Output format:
Answer: `X`

Now follow this protocol to answer the question below.)TXT";

const std::string_view kUserCoT =
    R"TXT(Reasoning protocol:
- First, think step by step about the visual scene and the spatial relationships involved.
- Explain your reasoning clearly in natural language.
- At the end, provide a single final answer line in the required format.

Output format:
Reasoning:
[step-by-step explanation]
Final answer:
Answer: `X`

Now follow this protocol to answer the question below.)TXT";

const std::string_view kUserToT =
    R"TXT(Reasoning protocol:
- Step 1: Generate multiple reasoning branches (thoughts).
  - Propose 3 plausible reasoning paths about the question.
  - Each path should be coherent and may use different assumptions about the spatial layout.
- Step 2: Evaluate and compare the thoughts.
  - Check consistency with the video evidence, spatial coherence, and contradictions.
  - Select the most reliable thought overall.
- Step 3: Produce the final answer using the best thought.
  - Use the most reliable thought to derive a single final answer in the required format.

Output format:
Thought 1:
[reasoning path 1]
Thought 2:
[reasoning path 2]
Thought 3:
[reasoning path 3]
Evaluation:
- Thought 1: ...
- Thought 2: ...
- Thought 3: ...
Best thought: Thought X because ...
Final answer:
Answer: `X`

Now follow this protocol to answer the question below.)TXT";

const std::string_view kUserLtM =
    R"TXT(Reasoning protocol:
- Step 1: Decompose the problem from easiest to hardest.
  - Identify what type of visual-spatial task this is (e.g., object count, absolute distance,relative distance, relative direction, object size, room size, route planning, appearance order).
  - Break the question into several subproblems ordered from the easiest to the most difficult.
  - Typical stages may include:
    - identifying relevant objects and regions,
    - understanding local spatial relations,
    - integrating them into a global spatial layout,
    - making the final decision.
- Step 2: Solve subproblems in order.
  - For each subproblem:
    - Briefly name the subproblem.
    - Explain how you solve it using evidence from the video.
    - Reuse and refine results from previous subproblems.
  - Keep the spatial layout consistent across all steps.
- Step 3: Produce the final answer.
  - Based on the solved subproblems, give a single final answer in the required format.

Output format:
Step 1: Problem decomposition
- Subproblem 1: ...
- Subproblem 2: ...
- Subproblem 3: ...
Step 2: Solving subproblems
- Subproblem 1:
  - Reasoning: ...
- Subproblem 2:
  - Reasoning: ...
- Subproblem 3:
  - Reasoning: ...
Step 3: Final answer
  Answer: `X`

Now follow this protocol to answer the question below.)TXT";

const std::string_view kUserCognitiveMap =
    R"TXT(Reasoning protocol:
- Read the question and analyze the visual content carefully.
- Generate cognitive map as required to help determine spatial relationships and approximate distances.
- You may think through the problem internally, but do not show your reasoning.
- Directly provide the final answer in the required format.

Output format:
Final answer:
Answer: `X`

Now follow this protocol to answer the question below.)TXT";

const std::string_view kUserTrace =
    R"TXT(Reasoning protocol:
- Read the question and analyze the visual content carefully.
- Generate the textual representation of allocentric context as required to determine spatial relations and approximate distances.
- You may think through the problem internally, but do not show your reasoning.
- Directly provide the final answer in the required format.

Output format:
Structured Textual Allocentric Representation:

Answer: `X`

Now follow this protocol to answer the question below.)TXT";

const std::string_view kStageOne =
    "Generate only the Structured Textual Allocentric Representation for this video. "
    "Do not answer any question.";

}  // namespace tracekit::prompt::templates
