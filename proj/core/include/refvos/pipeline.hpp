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

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "refvos/camera.hpp"
#include "refvos/chat_client.hpp"
#include "refvos/geometry.hpp"
#include "refvos/metrics.hpp"
#include "refvos/perception.hpp"
#include "refvos/pose_verifier.hpp"
#include "refvos/priors.hpp"
#include "refvos/query.hpp"
#include "refvos/trajectory.hpp"

namespace refvos {

struct AblationFlags {
  bool use_cmr = true;  // coarse motion reasoning
  bool use_fpv = true;  // fine pose verification
  bool use_cmm = true;  // camera motion model handed to the reasoner
  bool use_or = true;   // occlusion relations handed to the reasoner

  friend bool operator==(const AblationFlags&, const AblationFlags&) = default;
};

struct PipelineConfig {
  int tau = 15;
  double iou_threshold = 0.6;
  double dist_threshold = 50.0;
  int window = 3;
  int k = kDiscriminativeKeyframes;
  // Boundary tolerance for evaluation; negative selects ceil(0.8% diagonal).
  int boundary_radius = -1;
  ReasonerConfig reasoner;
  AblationFlags flags;
  std::uint64_t seed = 0;

  // Throws ValidationError naming the field.
  void validate() const;
  AssociationParams association() const;
};

// Flat JSON object whose keys mirror the fields above (reasoner keys are
// inlined). Unknown keys are rejected.
PipelineConfig config_from_json_text(const std::string& text);
std::string config_to_json_text(const PipelineConfig& config);
PipelineConfig load_config(const std::filesystem::path& path);

// One record of the run trace; `payload` is a serialized JSON object.
struct TraceEvent {
  std::string stage;
  std::string payload;
};

// Query-independent perception state of one video, reusable across
// expressions and ablation variants.
struct PerceptionContext {
  KeyframeSchedule schedule;
  TrackingResult tracking;
  std::optional<CameraMotionModel> camera;
  std::vector<OcclusionEvent> occlusions;
  double image_diagonal = 0.0;
  std::vector<TraceEvent> trace;
};

// Tracks all detections, estimates the camera model when frames are
// available and the flags ask for it, and infers occlusions.
PerceptionContext build_perception_context(const PerceptionBundle& bundle,
                                           const PipelineConfig& config);

struct RunResult {
  std::string video_id;
  std::string query;
  StructuredQuery structured;
  MaskSequence masks;
  std::map<int, std::vector<BinaryMask>> per_id_masks;
  std::vector<int> selected_ids;
  std::size_t candidate_count = 0;  // |C|
  std::size_t filtered_count = 0;   // |C'|
  bool fpv_activated = false;
  bool zero_candidates = false;
  bool low_confidence = false;
  // "pose", "motion", "random" or "none".
  std::string selection;
  std::vector<TraceEvent> trace;
};

struct PipelineServices {
  // Used for decomposition and motion reasoning unless the config is offline.
  ChatEndpoint* endpoint = nullptr;
  // Defaults to the bundle's embeddings.
  const EmbeddingBackend* embeddings = nullptr;
  // Reused instead of recomputing tracks, camera and occlusions.
  const PerceptionContext* context = nullptr;
};

RunResult run_pipeline(const PerceptionBundle& bundle, const std::string& query,
                       const PipelineConfig& config, const PipelineServices& services = {});

EvalReport evaluate_run(const RunResult& result, const MaskSequence& ground_truth,
                        int boundary_radius = -1);

struct AblationScene {
  std::string name;
  PerceptionBundle bundle;
  std::string query;
  MaskSequence ground_truth;
  std::vector<std::string> tags;
};

struct AblationCell {
  std::string reasoning;  // baseline, +CMR, +FPV, full
  std::string context;    // trajectory-only, +CMM, +OR, full
  double mean_jf = 0.0;
  std::vector<double> per_scene_jf;
  // Mean J&F over scenes carrying each tag.
  std::map<std::string, double> tag_mean;
};

struct AblationReport {
  std::vector<std::string> scenes;
  std::vector<AblationCell> cells;

  // Throws LookupError for an unknown pair.
  const AblationCell& cell(const std::string& reasoning, const std::string& context) const;
  std::string format() const;
};

// Reasoning variants run with full context; context variants run with full
// reasoning. The offline reasoner is forced.
AblationReport run_ablation_suite(const std::vector<AblationScene>& scenes,
                                  const PipelineConfig& config);

// Writes one PNG per frame with selected masks tinted and labelled by id.
// Throws IoError when the directory cannot be written.
void render_overlays(const RunResult& result, const PerceptionBundle& bundle,
                     const std::filesystem::path& out_dir);

// results.json: per-frame RLE union, per-id masks, selected ids, stage sizes.
std::string results_json_text(const RunResult& result);
// One JSON object per line: seq, stage, then the stage payload.
std::string trace_jsonl_text(const RunResult& result);
void write_run_outputs(const RunResult& result, const std::filesystem::path& dir);
// Reads the union mask sequence back from results.json.
MaskSequence read_result_masks(const std::filesystem::path& results_json);

}  // namespace refvos
