// Copyright 2026 The refvos Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <map>
#include <string>
#include <vector>

#include "refvos/camera.hpp"
#include "refvos/chat_client.hpp"
#include "refvos/priors.hpp"
#include "refvos/trajectory.hpp"

namespace refvos {

struct MotionVerdict {
  std::vector<int> ranked_ids;
  bool ambiguous = false;
  std::string rationale;
};

// `t=<frame+1>: [xmin, ymin, xmax, ymax]` per keyframe state, ascending,
// coordinates rounded half away from zero, joined by "; ".
std::string serialize_trajectory(const Trajectory& track);

// Debug record: "track <id> <category> frames <birth>-<last>: <serialization>".
std::string format_trajectory_record(const Trajectory& track);

// Context handed to the reasoner. Null pointers mean the prior is withheld.
struct MotionContext {
  const CameraMotionModel* camera = nullptr;
  const std::vector<OcclusionEvent>* occlusions = nullptr;
  double image_diagonal = 0.0;
};

// `camera t=a..b: dx=..., dy=..., scale=..., rot=...deg`, 1-based frames.
std::string describe_camera_interval(const IntervalEstimate& interval);

// Throws InputError for empty candidates or empty motion query.
std::string build_motion_prompt(const std::vector<const Trajectory*>& candidates,
                                const std::string& motion_query, const MotionContext& context,
                                int cardinality);

// Ids in first-occurrence order restricted to `candidate_ids`, plus the
// AMBIGUOUS flag (default false). Throws ParseError when no valid id remains.
MotionVerdict parse_motion_response(const std::string& text,
                                    const std::vector<int>& candidate_ids, int cardinality);

struct FallbackScores {
  std::map<int, double> composite;
  std::vector<std::string> terms;  // applicable term names
};

// Deterministic keyword reasoner over compensated kinematics; the withheld
// priors in `context` are simply unavailable to it.
MotionVerdict fallback_motion_reason(const std::vector<const Trajectory*>& candidates,
                                     const std::string& motion_query,
                                     const MotionContext& context, int cardinality,
                                     FallbackScores* scores = nullptr);

struct CoarseFilterResult {
  std::vector<int> kept_ids;  // C', best first
  MotionVerdict verdict;
  bool reasoned = false;      // false when the motion query was empty
  bool used_fallback = false;
  int endpoint_attempts = 0;
  std::string prompt;
  std::vector<std::string> raw_responses;
  std::vector<std::string> errors;
};

// C' = top K ids of the verdict, or K+2 when ambiguous, clipped to the
// candidate count. Empty motion query keeps all candidates.
CoarseFilterResult coarse_filter(const std::vector<const Trajectory*>& candidates,
                                 const std::string& motion_query,
                                 const MotionContext& context, int cardinality,
                                 const ReasonerConfig& config, ChatEndpoint* endpoint);

}  // namespace refvos
