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

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "refvos/geometry.hpp"
#include "refvos/image.hpp"

namespace refvos {

inline constexpr double kBoxScoreThreshold = 0.3;
inline constexpr double kDetectionNmsIou = 0.4;

struct DetectionRecord {
  int frame_index = 0;
  std::string instance_key;
  std::string category;
  double score = 0.0;
  Box2D box;
  BinaryMask mask;
};

struct PropagationKey {
  int source_frame = 0;
  std::string instance_key;
  int target_frame = 0;

  friend auto operator<=>(const PropagationKey&, const PropagationKey&) = default;
};

struct PropagatedState {
  Box2D box;
  BinaryMask mask;
};

struct PropagatedFrame {
  int frame = 0;
  Box2D box;
  BinaryMask mask;
};

struct VideoInfo {
  std::string id;
  int width = 0;
  int height = 0;
  int frame_count = 0;
  int keyframe_interval = 15;
  // Relative to the bundle directory; empty for in-memory bundles.
  std::vector<std::string> frame_paths;
};

struct KeyframeSchedule {
  int interval = 15;
  std::vector<int> indices;

  bool contains(int frame) const;
};

// Multiples of `interval` below frame_count plus the last frame.
KeyframeSchedule sample_keyframes(int frame_count, int interval);

class PerceptionBundle {
 public:
  VideoInfo video;
  std::filesystem::path root;
  // Sorted by (frame_index, instance_key).
  std::vector<DetectionRecord> detections;
  std::map<PropagationKey, PropagatedState> propagations;
  std::map<std::string, std::vector<double>> embeddings;
  // Decoded frames for bundles built in memory; when empty, frames are read
  // from `root / video.frame_paths[i]` on demand.
  std::vector<Image> frames;

  KeyframeSchedule schedule() const {
    return sample_keyframes(video.frame_count, video.keyframe_interval);
  }
  std::vector<const DetectionRecord*> detections_at(int frame) const;
  const DetectionRecord* find_detection(int frame, const std::string& key) const;
  const PropagatedState* find_propagation(int source, const std::string& key,
                                          int target) const;
  bool has_frames() const;
  Image load_frame(int index) const;
};

// Validates schema invariants, drops detections below the score threshold and
// suppresses same-frame same-category duplicates (IoU > 0.4, higher score
// kept). Throws ValidationError naming the offending field.
PerceptionBundle finalize_bundle(PerceptionBundle bundle);

// Reads video.json, detections.json and the optional propagations.json and
// embeddings.json, then finalizes. Throws IoError or ValidationError.
PerceptionBundle load_bundle(const std::filesystem::path& dir);

// Writes the bundle layout. In-memory frames are written to frames/%06d.png.
void save_bundle(const PerceptionBundle& bundle, const std::filesystem::path& dir);

std::string frame_file_name(int index);

// Constant-velocity fallback parameters; zero for a newborn instance.
struct BoxVelocity {
  double vx = 0.0;
  double vy = 0.0;
};

// States for `target_frames`, taken from bundle propagations where present and
// otherwise extrapolated from the source detection at constant velocity (box
// moved by v * dt, mask translated by the rounded box delta). Throws
// LookupError for an unknown instance.
std::vector<PropagatedFrame> propagate(const PerceptionBundle& bundle,
                                       int source_frame,
                                       const std::string& instance_key,
                                       const std::vector<int>& target_frames,
                                       BoxVelocity velocity = {});

// Frames source+1 .. source+horizon, clipped to the video length.
std::vector<PropagatedFrame> propagate_forward(const PerceptionBundle& bundle,
                                               int source_frame,
                                               const std::string& instance_key,
                                               int horizon,
                                               BoxVelocity velocity = {});

}  // namespace refvos
