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

#include "refvos/priors.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "refvos/error.hpp"

namespace refvos {

namespace {

const BinaryMask* mask_at(const Trajectory& t, int keyframe) {
  if (auto it = t.keyframe_states.find(keyframe); it != t.keyframe_states.end())
    return &it->second.mask;
  if (keyframe >= 0 && static_cast<std::size_t>(keyframe) < t.dense_masks.size() &&
      !t.dense_masks[keyframe].empty())
    return &t.dense_masks[keyframe];
  return nullptr;
}

}  // namespace

std::vector<OcclusionEvent> infer_occlusions(const std::vector<Trajectory>& tracks,
                                             int keyframe) {
  struct Entry {
    int id;
    std::size_t count;
    BinaryMask dilated;
  };
  std::vector<Entry> entries;
  for (const auto& t : tracks) {
    const BinaryMask* m = mask_at(t, keyframe);
    if (m == nullptr || m->empty()) continue;
    entries.push_back({t.id, m->count(), m->dilated(1)});
  }
  std::vector<OcclusionEvent> events;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    for (std::size_t j = i + 1; j < entries.size(); ++j) {
      const std::size_t overlap = entries[i].dilated.intersection_count(entries[j].dilated);
      if (overlap == 0) continue;
      const Entry* front = &entries[i];
      const Entry* back = &entries[j];
      if (back->count > front->count || (back->count == front->count && back->id < front->id))
        std::swap(front, back);
      events.push_back({keyframe, front->id, back->id, overlap});
    }
  }
  return events;
}

std::vector<OcclusionEvent> infer_occlusions(const std::vector<Trajectory>& tracks,
                                             const KeyframeSchedule& schedule) {
  std::vector<OcclusionEvent> all;
  for (int k : schedule.indices) {
    auto ev = infer_occlusions(tracks, k);
    all.insert(all.end(), ev.begin(), ev.end());
  }
  return all;
}

std::map<int, Box2D> compensate_trajectory(const Trajectory& track,
                                           const CameraMotionModel& camera) {
  std::map<int, Box2D> out;
  for (const auto& [k, st] : track.keyframe_states)
    out[k] = compensate_box(st.box, camera.cumulative_at(k));
  return out;
}

std::string direction_octant(const Point2D& d) {
  static const std::array<const char*, 8> names = {
      "right", "up-right", "up", "up-left", "left", "down-left", "down", "down-right"};
  if (std::hypot(d.x, d.y) < 1e-9) return "none";
  const double angle = std::atan2(-d.y, d.x);  // counter-clockwise, y up
  int sector = static_cast<int>(std::lround(angle / (std::numbers::pi / 4.0)));
  sector = ((sector % 8) + 8) % 8;
  return names[sector];
}

KinematicSummary kinematic_summary(const Trajectory& track, const CameraMotionModel& camera,
                                   double image_diagonal) {
  KinematicSummary s;
  s.direction = "none";
  if (track.keyframe_states.size() < 2) {
    s.low_confidence = true;
    return s;
  }
  const std::map<int, Box2D> boxes = compensate_trajectory(track, camera);
  Point2D first{}, prev{};
  int first_frame = 0, last_frame = 0;
  bool started = false;
  for (const auto& [k, box] : boxes) {
    const Point2D c = box_centroid(box);
    if (!started) {
      first = c;
      first_frame = k;
      started = true;
    } else {
      s.path_length += distance(prev, c);
    }
    prev = c;
    last_frame = k;
  }
  s.net_displacement = {prev.x - first.x, prev.y - first.y};
  s.mean_speed = s.path_length / std::max(1, last_frame - first_frame);
  s.direction = direction_octant(s.net_displacement);
  s.stationarity = 1.0 / (1.0 + s.path_length / (image_diagonal * 0.01));
  return s;
}

}  // namespace refvos
