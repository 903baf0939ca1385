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
#include "refvos/trajectory.hpp"

namespace refvos {

struct OcclusionEvent {
  int frame = 0;
  int front_id = 0;
  int back_id = 0;
  std::size_t overlap_px = 0;

  friend bool operator==(const OcclusionEvent&, const OcclusionEvent&) = default;
};

// Pairs whose masks (each dilated by 1 px) intersect at `keyframe`. The track
// with the larger whole-mask pixel count is in front; ties put the smaller id
// in front. Tracks without a mask at the keyframe are skipped.
std::vector<OcclusionEvent> infer_occlusions(const std::vector<Trajectory>& tracks,
                                             int keyframe);
std::vector<OcclusionEvent> infer_occlusions(const std::vector<Trajectory>& tracks,
                                             const KeyframeSchedule& schedule);

// Keyframe boxes mapped into frame-0 coordinates. Throws ModelError when the
// camera does not cover a keyframe or a transform is singular.
std::map<int, Box2D> compensate_trajectory(const Trajectory& track,
                                           const CameraMotionModel& camera);

struct KinematicSummary {
  double mean_speed = 0.0;     // px/frame along the compensated centroid path
  double path_length = 0.0;    // px
  Point2D net_displacement;    // last minus first compensated centroid
  std::string direction;       // octant name, "none" when displacement is ~0
  double stationarity = 1.0;   // 1 / (1 + path / (diag * 0.01))
  bool low_confidence = false; // fewer than two keyframe states
};

// Octant of a displacement in image coordinates (y grows downwards):
// right, up-right, up, up-left, left, down-left, down, down-right.
std::string direction_octant(const Point2D& displacement);

KinematicSummary kinematic_summary(const Trajectory& track, const CameraMotionModel& camera,
                                   double image_diagonal);

}  // namespace refvos
