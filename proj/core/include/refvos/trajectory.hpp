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
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "refvos/geometry.hpp"
#include "refvos/perception.hpp"

namespace refvos {

// Detection a keyframe state was taken or propagated from; lets later stages
// look up bundle propagations for intermediate frames.
struct PropagationSource {
  int frame = 0;
  std::string instance_key;

  friend bool operator==(const PropagationSource&, const PropagationSource&) = default;
};

struct KeyframeState {
  Box2D box;
  BinaryMask mask;
  double score = 0.0;
  std::optional<PropagationSource> source;
};

struct Trajectory {
  int id = 0;
  std::string category;
  int birth_frame = 0;
  int last_frame = 0;
  std::map<int, KeyframeState> keyframe_states;
  // Filled by densify_track; one entry per video frame.
  std::vector<BinaryMask> dense_masks;
  std::vector<std::optional<Box2D>> dense_boxes;
  // Lifecycle: consecutive keyframes without a match, and whether matching
  // stopped.
  int missed = 0;
  bool frozen = false;
};

struct AssociationParams {
  double iou_threshold = 0.6;
  double dist_threshold = 50.0;
  int window = 3;
  // Tracks unmatched for this many consecutive keyframes stop matching.
  int max_missed = 2;
};

struct MatchDecision {
  bool matched = false;
  double avg_iou = 0.0;
  double avg_centroid_dist = 0.0;
  int window = 0;
};

// matched <=> avg_iou >= iou_threshold && avg_dist <= dist_threshold.
bool association_accepts(double avg_iou, double avg_dist, const AssociationParams& p);

// Centroid velocity (px/frame) between the last two keyframe states; zero for
// a single-state track.
BoxVelocity track_velocity(const Trajectory& track);

// Propagates the legacy track from its latest state and the candidate from
// `candidate.frame_index` onto the `window` frames starting at the candidate
// keyframe, then averages box IoU and centroid distance over the paired
// frames. Throws LookupError when propagation fails.
MatchDecision predictive_association(const Trajectory& legacy,
                                     const DetectionRecord& candidate,
                                     const AssociationParams& params,
                                     const PerceptionBundle& bundle);

struct AssociationEvent {
  int keyframe = 0;
  int track_id = 0;
  std::string instance_key;
  MatchDecision decision;
};

struct AssociationResult {
  std::vector<int> extended;  // track ids
  std::vector<int> spawned;   // new track ids
  std::vector<AssociationEvent> evaluated;
};

// One lifecycle step at `keyframe`: scores every (alive track, same-category
// detection) pair, commits matches greedily by descending avg_iou (ties to the
// smaller track id), spawns tracks for unmatched detections.
AssociationResult associate_keyframe(std::vector<Trajectory>& tracks,
                                     const std::vector<const DetectionRecord*>& detections,
                                     int keyframe, const AssociationParams& params,
                                     const PerceptionBundle& bundle, int& next_id);

// Backfills keyframes before the track's birth from bundle backward
// propagations, else constant velocity run backwards; stops at frame 0 or at
// the first empty mask.
Trajectory retroactive_fill(Trajectory track, const PerceptionBundle& bundle,
                            const KeyframeSchedule& schedule);

// Per-frame masks: keyframe states verbatim, bundle propagations in between
// when present, otherwise linear box interpolation with mask translation.
// Frames outside [birth, last] are empty.
Trajectory densify_track(Trajectory track, const KeyframeSchedule& schedule,
                         const PerceptionBundle& bundle);

struct TrackingResult {
  std::vector<Trajectory> tracks;
  std::vector<AssociationEvent> events;
};

// Runs association over every keyframe, then retroactive fill and
// densification. Only detections whose normalized category is in
// `categories` take part (all when empty).
TrackingResult build_trajectories(const PerceptionBundle& bundle,
                                  const AssociationParams& params,
                                  const std::set<std::string>& categories = {});

}  // namespace refvos
