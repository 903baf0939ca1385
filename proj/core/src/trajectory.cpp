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

#include "refvos/trajectory.hpp"

#include <algorithm>
#include <cmath>

#include "refvos/error.hpp"
#include "refvos/query.hpp"

namespace refvos {

bool association_accepts(double avg_iou, double avg_dist, const AssociationParams& p) {
  return avg_iou >= p.iou_threshold && avg_dist <= p.dist_threshold;
}

BoxVelocity track_velocity(const Trajectory& track) {
  if (track.keyframe_states.size() < 2) return {};
  auto last = track.keyframe_states.rbegin();
  auto prev = std::next(last);
  const double gap = last->first - prev->first;
  const Point2D a = box_centroid(prev->second.box);
  const Point2D b = box_centroid(last->second.box);
  return {(b.x - a.x) / gap, (b.y - a.y) / gap};
}

namespace {

std::vector<int> window_frames(int start, int window, int frame_count) {
  std::vector<int> out;
  for (int f = start; f < start + window && f < frame_count; ++f) out.push_back(f);
  return out;
}

// Path of a track state onto `frames`, falling back to moving the stored box
// when the state has no detection behind it.
std::vector<Box2D> state_path(const KeyframeState& state, int state_frame,
                              const std::vector<int>& frames, BoxVelocity v,
                              const PerceptionBundle& bundle) {
  if (state.source && state.source->frame == state_frame) {
    std::vector<Box2D> out;
    for (const auto& pf :
         propagate(bundle, state_frame, state.source->instance_key, frames, v))
      out.push_back(pf.box);
    return out;
  }
  // Backfilled state: bundle entries from its source detection, otherwise
  // extrapolate from the stored box.
  std::vector<Box2D> out;
  for (int f : frames) {
    const PropagatedState* prop =
        state.source ? bundle.find_propagation(state.source->frame,
                                               state.source->instance_key, f)
                     : nullptr;
    const double dt = f - state_frame;
    out.push_back(prop ? prop->box : state.box.translated(v.vx * dt, v.vy * dt));
  }
  return out;
}

}  // namespace

MatchDecision predictive_association(const Trajectory& legacy,
                                     const DetectionRecord& candidate,
                                     const AssociationParams& params,
                                     const PerceptionBundle& bundle) {
  if (legacy.keyframe_states.empty()) throw InputError("legacy track has no states");
  const auto& [t, state] = *legacy.keyframe_states.rbegin();
  if (candidate.frame_index <= t)
    throw InputError("candidate keyframe must follow the legacy state");

  const std::vector<int> frames =
      window_frames(candidate.frame_index, params.window, bundle.video.frame_count);
  const std::vector<Box2D> legacy_path =
      state_path(state, t, frames, track_velocity(legacy), bundle);
  const std::vector<PropagatedFrame> cand_path =
      propagate(bundle, candidate.frame_index, candidate.instance_key, frames);

  MatchDecision d;
  d.window = static_cast<int>(frames.size());
  if (frames.empty()) return d;
  double iou_sum = 0.0, dist_sum = 0.0;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    iou_sum += box_iou(legacy_path[i], cand_path[i].box);
    dist_sum += distance(box_centroid(legacy_path[i]), box_centroid(cand_path[i].box));
  }
  d.avg_iou = iou_sum / frames.size();
  d.avg_centroid_dist = dist_sum / frames.size();
  d.matched = association_accepts(d.avg_iou, d.avg_centroid_dist, params);
  return d;
}

AssociationResult associate_keyframe(std::vector<Trajectory>& tracks,
                                     const std::vector<const DetectionRecord*>& detections,
                                     int keyframe, const AssociationParams& params,
                                     const PerceptionBundle& bundle, int& next_id) {
  AssociationResult result;
  struct Pair {
    std::size_t track;
    std::size_t det;
    double iou;
  };
  std::vector<Pair> pairs;
  for (std::size_t ti = 0; ti < tracks.size(); ++ti) {
    const Trajectory& tr = tracks[ti];
    if (tr.frozen || tr.keyframe_states.empty() || tr.last_frame >= keyframe) continue;
    const std::string cat = normalize_entity(tr.category);
    for (std::size_t di = 0; di < detections.size(); ++di) {
      if (normalize_entity(detections[di]->category) != cat) continue;
      MatchDecision d;
      try {
        d = predictive_association(tr, *detections[di], params, bundle);
      } catch (const Error&) {
        d = MatchDecision{};
      }
      result.evaluated.push_back({keyframe, tr.id, detections[di]->instance_key, d});
      if (d.matched) pairs.push_back({ti, di, d.avg_iou});
    }
  }
  std::stable_sort(pairs.begin(), pairs.end(), [&](const Pair& a, const Pair& b) {
    if (a.iou != b.iou) return a.iou > b.iou;
    if (tracks[a.track].id != tracks[b.track].id) return tracks[a.track].id < tracks[b.track].id;
    return a.det < b.det;
  });

  std::vector<bool> track_used(tracks.size(), false), det_used(detections.size(), false);
  for (const Pair& p : pairs) {
    if (track_used[p.track] || det_used[p.det]) continue;
    track_used[p.track] = det_used[p.det] = true;
    Trajectory& tr = tracks[p.track];
    const DetectionRecord& d = *detections[p.det];
    tr.keyframe_states[keyframe] =
        KeyframeState{d.box, d.mask, d.score, PropagationSource{keyframe, d.instance_key}};
    tr.last_frame = keyframe;
    tr.missed = 0;
    result.extended.push_back(tr.id);
  }

  for (std::size_t ti = 0; ti < tracks.size(); ++ti) {
    Trajectory& tr = tracks[ti];
    if (track_used[ti] || tr.frozen || tr.last_frame >= keyframe) continue;
    if (++tr.missed >= params.max_missed) tr.frozen = true;
  }

  for (std::size_t di = 0; di < detections.size(); ++di) {
    if (det_used[di]) continue;
    const DetectionRecord& d = *detections[di];
    Trajectory tr;
    tr.id = next_id++;
    tr.category = d.category;
    tr.birth_frame = tr.last_frame = keyframe;
    tr.keyframe_states[keyframe] =
        KeyframeState{d.box, d.mask, d.score, PropagationSource{keyframe, d.instance_key}};
    result.spawned.push_back(tr.id);
    tracks.push_back(std::move(tr));
  }
  return result;
}

namespace {

// Velocity between the first two states, used for backward extrapolation.
BoxVelocity leading_velocity(const Trajectory& track) {
  if (track.keyframe_states.size() < 2) return {};
  auto a = track.keyframe_states.begin();
  auto b = std::next(a);
  const double gap = b->first - a->first;
  const Point2D ca = box_centroid(a->second.box), cb = box_centroid(b->second.box);
  return {(cb.x - ca.x) / gap, (cb.y - ca.y) / gap};
}

}  // namespace

Trajectory retroactive_fill(Trajectory track, const PerceptionBundle& bundle,
                            const KeyframeSchedule& schedule) {
  if (track.keyframe_states.empty() || track.birth_frame <= 0) return track;
  const int t = track.keyframe_states.begin()->first;
  const KeyframeState first = track.keyframe_states.begin()->second;
  const BoxVelocity v = leading_velocity(track);
  const int w = bundle.video.width, h = bundle.video.height;

  for (auto it = std::lower_bound(schedule.indices.begin(), schedule.indices.end(), t);
       it != schedule.indices.begin();) {
    const int k = *--it;
    KeyframeState st;
    st.score = first.score;
    st.source = first.source;
    const PropagatedState* prop =
        first.source ? bundle.find_propagation(first.source->frame,
                                               first.source->instance_key, k)
                     : nullptr;
    if (prop) {
      st.box = prop->box;
      st.mask = prop->mask;
    } else {
      const double dt = k - t;
      const double dx = v.vx * dt, dy = v.vy * dt;
      st.box = clip_box(first.box.translated(dx, dy), w, h);
      st.mask = translate_mask(first.mask, static_cast<int>(round_half_away(dx)),
                               static_cast<int>(round_half_away(dy)));
    }
    if (st.mask.empty()) break;
    track.keyframe_states[k] = std::move(st);
    track.birth_frame = k;
  }
  return track;
}

Trajectory densify_track(Trajectory track, const KeyframeSchedule& /*schedule*/,
                         const PerceptionBundle& bundle) {
  const int T = bundle.video.frame_count;
  const int w = bundle.video.width, h = bundle.video.height;
  track.dense_masks.assign(T, BinaryMask(w, h));
  track.dense_boxes.assign(T, std::nullopt);
  if (track.keyframe_states.empty()) return track;
  const auto& states = track.keyframe_states;

  auto from_source = [&](const KeyframeState& st, int f) -> const PropagatedState* {
    if (!st.source) return nullptr;
    return bundle.find_propagation(st.source->frame, st.source->instance_key, f);
  };

  for (int f = std::max(0, track.birth_frame); f <= track.last_frame && f < T; ++f) {
    if (auto it = states.find(f); it != states.end()) {
      track.dense_masks[f] = it->second.mask;
      track.dense_boxes[f] = it->second.box;
      continue;
    }
    auto hi = states.upper_bound(f);
    if (hi == states.begin() || hi == states.end()) continue;
    auto lo = std::prev(hi);
    const PropagatedState* prop = from_source(lo->second, f);
    if (!prop) prop = from_source(hi->second, f);
    if (prop) {
      track.dense_masks[f] = prop->mask;
      track.dense_boxes[f] = prop->box;
      continue;
    }
    const double alpha = double(f - lo->first) / double(hi->first - lo->first);
    const Box2D& a = lo->second.box;
    const Box2D& b = hi->second.box;
    const Box2D box{a.xmin + alpha * (b.xmin - a.xmin), a.ymin + alpha * (b.ymin - a.ymin),
                    a.xmax + alpha * (b.xmax - a.xmax), a.ymax + alpha * (b.ymax - a.ymax)};
    const Point2D ca = box_centroid(a), cb = box_centroid(box);
    track.dense_masks[f] =
        translate_mask(lo->second.mask, static_cast<int>(round_half_away(cb.x - ca.x)),
                       static_cast<int>(round_half_away(cb.y - ca.y)));
    track.dense_boxes[f] = box;
  }
  return track;
}

TrackingResult build_trajectories(const PerceptionBundle& bundle,
                                  const AssociationParams& params,
                                  const std::set<std::string>& categories) {
  TrackingResult result;
  const KeyframeSchedule schedule = bundle.schedule();
  int next_id = 1;
  for (int k : schedule.indices) {
    std::vector<const DetectionRecord*> dets;
    for (const DetectionRecord* d : bundle.detections_at(k)) {
      if (categories.empty() || categories.count(normalize_entity(d->category)))
        dets.push_back(d);
    }
    AssociationResult step =
        associate_keyframe(result.tracks, dets, k, params, bundle, next_id);
    result.events.insert(result.events.end(), step.evaluated.begin(), step.evaluated.end());
  }
  for (Trajectory& tr : result.tracks) {
    tr = retroactive_fill(std::move(tr), bundle, schedule);
    tr = densify_track(std::move(tr), schedule, bundle);
  }
  return result;
}

}  // namespace refvos
