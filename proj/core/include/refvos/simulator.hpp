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

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "refvos/camera.hpp"
#include "refvos/geometry.hpp"
#include "refvos/perception.hpp"
#include "refvos/priors.hpp"
#include "refvos/query.hpp"

namespace refvos {

struct Waypoint {
  int frame = 0;
  double x = 0.0;  // object centre in frame-0 (world) coordinates
  double y = 0.0;
};

struct ObjectScript {
  int id = 0;
  std::string category;
  std::string shape = "ellipse";  // "ellipse" or "rect"
  double width = 16.0;
  double height = 16.0;
  // Larger depth is nearer the camera and wins contested pixels.
  int depth = 0;
  std::array<int, 3> color{200, 80, 60};
  // Linear interpolation between waypoints, clamped at both ends.
  std::vector<Waypoint> waypoints;
  std::vector<std::string> attributes;
  std::string posture;
  int appear_frame = 0;
  int vanish_frame = -1;  // last visible frame, -1 for the whole video
};

// The frame-t image of a frame-0 point p is zoom_t * (p - centre) + centre +
// t * pan, with zoom_t = 1 + t * zoom_rate. `pan` is therefore the apparent
// per-frame shift of static scene content.
struct CameraScript {
  double pan_x = 0.0;
  double pan_y = 0.0;
  double zoom_rate = 0.0;
};

struct ExpressionTemplate {
  std::string entity;
  std::vector<std::string> attributes;
  std::vector<std::string> posture_words;
  std::vector<std::string> motion_words;
  // "by", "near", "next to", "in front of", "behind" or empty.
  std::string relation;
  std::string context_entity;
  int cardinality = 1;
  std::vector<int> target_ids;
};

struct Perturbation {
  double box_jitter = 0.0;  // sigma in px, clamped to +-2 px
  double dropout = 0.0;     // probability of dropping a keyframe detection
};

struct SceneSpec {
  std::string name = "scene";
  int width = 160;
  int height = 120;
  int frame_count = 46;
  int keyframe_interval = 15;
  std::vector<ObjectScript> objects;
  CameraScript camera;
  ExpressionTemplate expression;
  Perturbation perturbation;
  int embedding_dim = 32;
  double embedding_noise = 0.08;
  std::vector<std::string> tags;

  // Throws ValidationError naming the offending field.
  void validate() const;
};

SceneSpec scene_spec_from_json_text(const std::string& text);
std::string scene_spec_to_json_text(const SceneSpec& spec);
SceneSpec load_scene_spec(const std::filesystem::path& path);

struct GroundTruth {
  // Visible masks and their boxes per object and frame.
  std::map<int, std::vector<BinaryMask>> object_masks;
  std::map<int, std::vector<std::optional<Box2D>>> object_boxes;
  // Frame-0 to frame-t transforms.
  std::vector<AffineTransform> camera;
  // Overlapping visible pairs per frame ordered by depth.
  std::vector<OcclusionEvent> occlusions;
  std::vector<int> target_ids;
  MaskSequence target;
  // Pipeline track id -> scripted object id, as seen by the exporter.
  std::map<int, int> track_to_object;
};

struct GeneratedScene {
  SceneSpec spec;
  PerceptionBundle bundle;  // frames held in memory
  GroundTruth truth;
  std::string query;
  StructuredQuery expected_query;
};

// Surface text "the <attributes> <entity> <posture> <motion> <relation> the
// <context>" (number word and plural entity when K > 1) together with the
// StructuredQuery the heuristic parser must recover from it.
std::pair<std::string, StructuredQuery> scripted_expression(const SceneSpec& spec);

// Deterministic in (spec, seed).
GeneratedScene generate_scene(const SceneSpec& spec, std::uint64_t seed);

// Bundle directory plus ground_truth.json.
void save_scene(const GeneratedScene& scene, const std::filesystem::path& dir);

struct LoadedGroundTruth {
  std::string query;
  MaskSequence target;
  std::vector<int> target_ids;
  std::vector<std::string> tags;
};
LoadedGroundTruth load_ground_truth(const std::filesystem::path& file);

// Embedding fixture vectors: each descriptor word has a seeded unit
// prototype; a text or crop embedding sums the prototypes of its words.
std::vector<double> descriptor_prototype(const std::string& word, int dim);

// The seeded scenario mix used by the end-to-end and ablation suites.
std::vector<SceneSpec> standard_suite(int count, std::uint64_t seed);

}  // namespace refvos
