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

#include "refvos/perception.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "json_io.hpp"
#include "refvos/error.hpp"

namespace refvos {

using detail::json;

bool KeyframeSchedule::contains(int frame) const {
  return std::binary_search(indices.begin(), indices.end(), frame);
}

KeyframeSchedule sample_keyframes(int frame_count, int interval) {
  if (frame_count < 1) throw InputError("frame_count must be >= 1");
  if (interval < 1) throw InputError("keyframe interval must be >= 1");
  KeyframeSchedule s;
  s.interval = interval;
  for (int f = 0; f < frame_count; f += interval) s.indices.push_back(f);
  if (s.indices.back() != frame_count - 1) s.indices.push_back(frame_count - 1);
  return s;
}

std::vector<const DetectionRecord*> PerceptionBundle::detections_at(int frame) const {
  std::vector<const DetectionRecord*> out;
  auto it = std::lower_bound(
      detections.begin(), detections.end(), frame,
      [](const DetectionRecord& d, int f) { return d.frame_index < f; });
  for (; it != detections.end() && it->frame_index == frame; ++it) out.push_back(&*it);
  return out;
}

const DetectionRecord* PerceptionBundle::find_detection(int frame,
                                                        const std::string& key) const {
  for (const DetectionRecord* d : detections_at(frame))
    if (d->instance_key == key) return d;
  return nullptr;
}

const PropagatedState* PerceptionBundle::find_propagation(int source,
                                                          const std::string& key,
                                                          int target) const {
  auto it = propagations.find(PropagationKey{source, key, target});
  return it == propagations.end() ? nullptr : &it->second;
}

bool PerceptionBundle::has_frames() const {
  return !frames.empty() ||
         (!video.frame_paths.empty() &&
          static_cast<int>(video.frame_paths.size()) == video.frame_count);
}

Image PerceptionBundle::load_frame(int index) const {
  if (index < 0 || index >= video.frame_count)
    throw LookupError("frame index out of range: " + std::to_string(index));
  if (!frames.empty()) return frames.at(static_cast<std::size_t>(index));
  if (static_cast<std::size_t>(index) >= video.frame_paths.size())
    throw IoError("bundle has no frame images");
  return read_png(root / video.frame_paths[static_cast<std::size_t>(index)]);
}

std::string frame_file_name(int index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%06d.png", index);
  return buf;
}

namespace {

void validate_mask_shape(const BinaryMask& m, const VideoInfo& v,
                         const std::string& path) {
  if (m.width() != v.width || m.height() != v.height)
    throw ValidationError(path, "mask size differs from video resolution");
}

void validate_mask_in_box(const BinaryMask& m, const Box2D& box,
                          const std::string& path) {
  const auto bb = m.bounding_box();
  if (!bb) return;
  constexpr double kSlack = 2.0;
  if (bb->xmin < box.xmin - kSlack || bb->ymin < box.ymin - kSlack ||
      bb->xmax > box.xmax + kSlack || bb->ymax > box.ymax + kSlack)
    throw ValidationError(path, "mask extends beyond box dilated by 2 px");
}

std::vector<DetectionRecord> suppress_duplicates(std::vector<DetectionRecord> dets) {
  std::stable_sort(dets.begin(), dets.end(), [](const auto& a, const auto& b) {
    if (a.frame_index != b.frame_index) return a.frame_index < b.frame_index;
    if (a.category != b.category) return a.category < b.category;
    if (a.score != b.score) return a.score > b.score;
    return a.instance_key < b.instance_key;
  });
  std::vector<DetectionRecord> kept;
  std::size_t group_start = 0;
  for (auto& d : dets) {
    // The first detection of a (frame, category) group is never suppressed, so
    // kept.back() always belongs to the current group once it has started.
    if (kept.empty() || kept.back().frame_index != d.frame_index ||
        kept.back().category != d.category) {
      group_start = kept.size();
    }
    bool suppressed = false;
    for (std::size_t k = group_start; k < kept.size(); ++k) {
      if (box_iou(kept[k].box, d.box) > kDetectionNmsIou) {
        suppressed = true;
        break;
      }
    }
    if (!suppressed) kept.push_back(std::move(d));
  }
  std::stable_sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    if (a.frame_index != b.frame_index) return a.frame_index < b.frame_index;
    return a.instance_key < b.instance_key;
  });
  return kept;
}

}  // namespace

PerceptionBundle finalize_bundle(PerceptionBundle b) {
  const VideoInfo& v = b.video;
  if (v.width <= 0 || v.height <= 0) throw ValidationError("video", "non-positive resolution");
  if (v.frame_count < 1) throw ValidationError("video.frame_count", "must be >= 1");
  if (v.keyframe_interval < 1)
    throw ValidationError("video.keyframe_interval", "must be >= 1");
  if (!b.frames.empty() && static_cast<int>(b.frames.size()) != v.frame_count)
    throw ValidationError("frames", "frame count mismatch");
  const KeyframeSchedule schedule = b.schedule();

  std::vector<DetectionRecord> kept;
  for (std::size_t i = 0; i < b.detections.size(); ++i) {
    DetectionRecord& d = b.detections[i];
    const std::string path = "detections[" + std::to_string(i) + "]";
    if (!schedule.contains(d.frame_index))
      throw ValidationError(path + ".frame_index", "not a keyframe index");
    if (!(d.score >= 0.0 && d.score <= 1.0))
      throw ValidationError(path + ".score", "score outside [0,1]");
    if (!d.box.valid()) throw ValidationError(path + ".box", "invalid box");
    if (d.instance_key.empty()) throw ValidationError(path + ".instance_key", "empty");
    validate_mask_shape(d.mask, v, path + ".mask");
    validate_mask_in_box(d.mask, d.box, path + ".mask");
    if (d.score < kBoxScoreThreshold) continue;
    kept.push_back(std::move(d));
  }
  b.detections = suppress_duplicates(std::move(kept));

  for (const auto& [key, state] : b.propagations) {
    const std::string path = "propagations[" + std::to_string(key.source_frame) + "/" +
                             key.instance_key + "/" + std::to_string(key.target_frame) + "]";
    if (key.target_frame == key.source_frame)
      throw ValidationError(path, "target frame equals source frame");
    if (key.target_frame < 0 || key.target_frame >= v.frame_count)
      throw ValidationError(path, "target frame outside video");
    if (!state.box.valid()) throw ValidationError(path + ".box", "invalid box");
    validate_mask_shape(state.mask, v, path + ".mask");
  }
  for (const auto& [key, vec] : b.embeddings) {
    if (vec.empty()) throw ValidationError("embeddings[" + key + "]", "empty vector");
    for (double x : vec)
      if (!std::isfinite(x))
        throw ValidationError("embeddings[" + key + "]", "non-finite component");
  }
  return b;
}

PerceptionBundle load_bundle(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw IoError("bundle directory not found: " + dir.string());
  PerceptionBundle b;
  b.root = dir;

  const json vj = detail::read_json_file(dir / "video.json");
  b.video.id = detail::field<std::string>(vj, "id", "video");
  b.video.width = detail::field<int>(vj, "width", "video");
  b.video.height = detail::field<int>(vj, "height", "video");
  b.video.frame_count = detail::field<int>(vj, "frame_count", "video");
  if (vj.contains("keyframe_interval"))
    b.video.keyframe_interval = detail::field<int>(vj, "keyframe_interval", "video");
  if (vj.contains("frames")) {
    b.video.frame_paths = detail::field<std::vector<std::string>>(vj, "frames", "video");
    if (static_cast<int>(b.video.frame_paths.size()) != b.video.frame_count)
      throw ValidationError("video.frames", "length differs from frame_count");
    for (const auto& p : b.video.frame_paths)
      if (!fs::exists(dir / p)) throw IoError("missing frame file " + (dir / p).string());
  } else if (fs::is_directory(dir / "frames")) {
    for (int i = 0; i < b.video.frame_count; ++i) {
      const std::string rel = "frames/" + frame_file_name(i);
      if (!fs::exists(dir / rel)) throw IoError("missing frame file " + (dir / rel).string());
      b.video.frame_paths.push_back(rel);
    }
  }

  const json dj = detail::read_json_file(dir / "detections.json");
  if (!dj.is_array()) throw ValidationError("detections", "must be a list");
  for (std::size_t i = 0; i < dj.size(); ++i) {
    const std::string path = "detections[" + std::to_string(i) + "]";
    const json& e = dj[i];
    DetectionRecord d;
    d.frame_index = detail::field<int>(e, "frame_index", path);
    d.instance_key = detail::field<std::string>(e, "instance_key", path);
    d.category = detail::field<std::string>(e, "category", path);
    d.score = detail::field<double>(e, "score", path);
    if (!e.contains("box")) throw ValidationError(path + ".box", "missing field");
    d.box = detail::box_from_json(e["box"], path + ".box");
    if (!e.contains("mask")) throw ValidationError(path + ".mask", "missing field");
    d.mask = detail::mask_from_json(e["mask"], path + ".mask");
    b.detections.push_back(std::move(d));
  }

  if (fs::exists(dir / "propagations.json")) {
    const json pj = detail::read_json_file(dir / "propagations.json");
    if (!pj.is_array()) throw ValidationError("propagations", "must be a list");
    for (std::size_t i = 0; i < pj.size(); ++i) {
      const std::string path = "propagations[" + std::to_string(i) + "]";
      const json& e = pj[i];
      PropagationKey key{detail::field<int>(e, "source_frame", path),
                         detail::field<std::string>(e, "instance_key", path),
                         detail::field<int>(e, "target_frame", path)};
      if (!e.contains("box") || !e.contains("mask"))
        throw ValidationError(path, "box and mask required");
      PropagatedState st{detail::box_from_json(e["box"], path + ".box"),
                         detail::mask_from_json(e["mask"], path + ".mask")};
      b.propagations.insert_or_assign(std::move(key), std::move(st));
    }
  }

  if (fs::exists(dir / "embeddings.json")) {
    const json ej = detail::read_json_file(dir / "embeddings.json");
    if (!ej.is_array()) throw ValidationError("embeddings", "must be a list");
    for (std::size_t i = 0; i < ej.size(); ++i) {
      const std::string path = "embeddings[" + std::to_string(i) + "]";
      b.embeddings.insert_or_assign(
          detail::field<std::string>(ej[i], "key", path),
          detail::field<std::vector<double>>(ej[i], "vector", path));
    }
  }
  return finalize_bundle(std::move(b));
}

void save_bundle(const PerceptionBundle& b, const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

  json vj = {{"id", b.video.id},
             {"width", b.video.width},
             {"height", b.video.height},
             {"frame_count", b.video.frame_count},
             {"keyframe_interval", b.video.keyframe_interval}};
  if (!b.frames.empty()) {
    fs::create_directories(dir / "frames", ec);
    if (ec) throw IoError("cannot create frames dir: " + ec.message());
    json paths = json::array();
    for (std::size_t i = 0; i < b.frames.size(); ++i) {
      const std::string rel = "frames/" + frame_file_name(static_cast<int>(i));
      write_png(dir / rel, b.frames[i]);
      paths.push_back(rel);
    }
    vj["frames"] = paths;
  } else if (!b.video.frame_paths.empty()) {
    vj["frames"] = b.video.frame_paths;
  }
  detail::write_text_file(dir / "video.json", vj.dump(2) + "\n");

  json dj = json::array();
  for (const auto& d : b.detections) {
    dj.push_back({{"frame_index", d.frame_index},
                  {"instance_key", d.instance_key},
                  {"category", d.category},
                  {"score", d.score},
                  {"box", detail::box_to_json(d.box)},
                  {"mask", detail::mask_to_json(d.mask)}});
  }
  detail::write_text_file(dir / "detections.json", dj.dump(1) + "\n");

  if (!b.propagations.empty()) {
    json pj = json::array();
    for (const auto& [k, st] : b.propagations) {
      pj.push_back({{"source_frame", k.source_frame},
                    {"instance_key", k.instance_key},
                    {"target_frame", k.target_frame},
                    {"box", detail::box_to_json(st.box)},
                    {"mask", detail::mask_to_json(st.mask)}});
    }
    detail::write_text_file(dir / "propagations.json", pj.dump(1) + "\n");
  }
  if (!b.embeddings.empty()) {
    json ej = json::array();
    for (const auto& [k, v] : b.embeddings) ej.push_back({{"key", k}, {"vector", v}});
    detail::write_text_file(dir / "embeddings.json", ej.dump(1) + "\n");
  }
}

std::vector<PropagatedFrame> propagate(const PerceptionBundle& bundle,
                                       int source_frame,
                                       const std::string& instance_key,
                                       const std::vector<int>& target_frames,
                                       BoxVelocity velocity) {
  const DetectionRecord* src = bundle.find_detection(source_frame, instance_key);
  std::vector<PropagatedFrame> out;
  out.reserve(target_frames.size());
  for (int f : target_frames) {
    if (const PropagatedState* st = bundle.find_propagation(source_frame, instance_key, f)) {
      out.push_back({f, st->box, st->mask});
      continue;
    }
    if (src == nullptr) {
      throw LookupError("unknown instance '" + instance_key + "' at frame " +
                        std::to_string(source_frame));
    }
    const double dt = f - source_frame;
    const double dx = velocity.vx * dt, dy = velocity.vy * dt;
    out.push_back({f, src->box.translated(dx, dy),
                   translate_mask(src->mask, static_cast<int>(round_half_away(dx)),
                                  static_cast<int>(round_half_away(dy)))});
  }
  return out;
}

std::vector<PropagatedFrame> propagate_forward(const PerceptionBundle& bundle,
                                               int source_frame,
                                               const std::string& instance_key,
                                               int horizon, BoxVelocity velocity) {
  if (horizon < 1) throw InputError("horizon must be >= 1");
  if (bundle.find_detection(source_frame, instance_key) == nullptr)
    throw LookupError("unknown instance '" + instance_key + "' at frame " +
                      std::to_string(source_frame));
  std::vector<int> targets;
  for (int f = source_frame + 1;
       f <= source_frame + horizon && f < bundle.video.frame_count; ++f)
    targets.push_back(f);
  return propagate(bundle, source_frame, instance_key, targets, velocity);
}

}  // namespace refvos
