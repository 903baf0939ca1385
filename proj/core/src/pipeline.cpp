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

#include "refvos/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "refvos/error.hpp"
#include "refvos/motion_reasoner.hpp"
#include "text_util.hpp"

namespace refvos {

using ojson = nlohmann::ordered_json;

void PipelineConfig::validate() const {
  if (tau < 1) throw ValidationError("config.tau", "must be >= 1");
  if (!(iou_threshold >= 0.0 && iou_threshold <= 1.0))
    throw ValidationError("config.theta_iou", "must lie in [0, 1]");
  if (!(dist_threshold >= 0.0)) throw ValidationError("config.theta_dist", "must be >= 0");
  if (window < 1) throw ValidationError("config.window", "must be >= 1");
  if (k < 1) throw ValidationError("config.k", "must be >= 1");
  try {
    reasoner.validate();
  } catch (const ValidationError& e) {
    throw ValidationError("config." + e.field_path(),
                          std::string(e.what()).substr(e.field_path().size() + 2));
  }
}

AssociationParams PipelineConfig::association() const {
  AssociationParams p;
  p.iou_threshold = iou_threshold;
  p.dist_threshold = dist_threshold;
  p.window = window;
  return p;
}

std::string config_to_json_text(const PipelineConfig& c) {
  const ojson j = {{"tau", c.tau},
                   {"theta_iou", c.iou_threshold},
                   {"theta_dist", c.dist_threshold},
                   {"window", c.window},
                   {"k", c.k},
                   {"theta_b", c.boundary_radius},
                   {"seed", c.seed},
                   {"use_cmr", c.flags.use_cmr},
                   {"use_fpv", c.flags.use_fpv},
                   {"use_cmm", c.flags.use_cmm},
                   {"use_or", c.flags.use_or},
                   {"endpoint_url", c.reasoner.endpoint_url},
                   {"model", c.reasoner.model},
                   {"temperature", c.reasoner.temperature},
                   {"top_p", c.reasoner.top_p},
                   {"top_k", c.reasoner.top_k},
                   {"send_top_k", c.reasoner.send_top_k},
                   {"retry_budget", c.reasoner.retry_budget},
                   {"offline", c.reasoner.offline},
                   {"api_key_env", c.reasoner.api_key_env},
                   {"timeout_seconds", c.reasoner.timeout_seconds}};
  return j.dump(2) + "\n";
}

PipelineConfig config_from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("config", std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ValidationError("config", "must be an object");
  PipelineConfig c;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& key = it.key();
    const nlohmann::json& v = it.value();
    try {
      if (key == "tau") c.tau = v.get<int>();
      else if (key == "theta_iou") c.iou_threshold = v.get<double>();
      else if (key == "theta_dist") c.dist_threshold = v.get<double>();
      else if (key == "window") c.window = v.get<int>();
      else if (key == "k") c.k = v.get<int>();
      else if (key == "theta_b") c.boundary_radius = v.get<int>();
      else if (key == "seed") c.seed = v.get<std::uint64_t>();
      else if (key == "use_cmr") c.flags.use_cmr = v.get<bool>();
      else if (key == "use_fpv") c.flags.use_fpv = v.get<bool>();
      else if (key == "use_cmm") c.flags.use_cmm = v.get<bool>();
      else if (key == "use_or") c.flags.use_or = v.get<bool>();
      else if (key == "endpoint_url") c.reasoner.endpoint_url = v.get<std::string>();
      else if (key == "model") c.reasoner.model = v.get<std::string>();
      else if (key == "temperature") c.reasoner.temperature = v.get<double>();
      else if (key == "top_p") c.reasoner.top_p = v.get<double>();
      else if (key == "top_k") c.reasoner.top_k = v.get<int>();
      else if (key == "send_top_k") c.reasoner.send_top_k = v.get<bool>();
      else if (key == "retry_budget") c.reasoner.retry_budget = v.get<int>();
      else if (key == "offline") c.reasoner.offline = v.get<bool>();
      else if (key == "api_key_env") c.reasoner.api_key_env = v.get<std::string>();
      else if (key == "timeout_seconds") c.reasoner.timeout_seconds = v.get<int>();
      else throw ValidationError("config." + key, "unknown key");
    } catch (const nlohmann::json::exception&) {
      throw ValidationError("config." + key, "wrong type");
    }
  }
  c.validate();
  return c;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return config_from_json_text(ss.str());
}

namespace {

void trace(std::vector<TraceEvent>& out, const std::string& stage, const ojson& payload) {
  out.push_back({stage, payload.dump()});
}

ojson query_json(const StructuredQuery& q) {
  return {{"candidate_entities", q.candidate_entities},
          {"context_entities", q.context_entities},
          {"motion", q.motion_descriptor},
          {"posture", q.posture_descriptor},
          {"cardinality", q.cardinality}};
}

bool category_matches(const std::string& category, const std::vector<std::string>& entities) {
  const std::vector<std::string> cw = detail::words(normalize_entity(category));
  if (cw.empty()) return false;
  for (const auto& e : entities) {
    const std::vector<std::string> ew = detail::words(normalize_entity(e));
    if (!ew.empty() && (ew == cw || ew.back() == cw.back())) return true;
  }
  return false;
}

std::vector<int> take(const std::vector<int>& ranked, std::size_t n) {
  return {ranked.begin(), ranked.begin() + static_cast<long>(std::min(n, ranked.size()))};
}

}  // namespace

PerceptionContext build_perception_context(const PerceptionBundle& bundle,
                                           const PipelineConfig& config) {
  PerceptionContext ctx;
  ctx.schedule = bundle.schedule();
  ctx.image_diagonal = std::hypot(bundle.video.width, bundle.video.height);
  ojson sched = {{"interval", ctx.schedule.interval}, {"keyframes", ctx.schedule.indices}};
  if (config.tau != bundle.video.keyframe_interval)
    sched["note"] = "bundle keyframe interval " + std::to_string(bundle.video.keyframe_interval) +
                    " overrides configured tau " + std::to_string(config.tau);
  trace(ctx.trace, "schedule", sched);

  ctx.tracking = build_trajectories(bundle, config.association());
  ojson tracks = ojson::array();
  for (const auto& t : ctx.tracking.tracks)
    tracks.push_back({{"id", t.id},
                      {"category", t.category},
                      {"birth", t.birth_frame},
                      {"last", t.last_frame},
                      {"keyframes", t.keyframe_states.size()}});
  int matched = 0;
  for (const auto& e : ctx.tracking.events) matched += e.decision.matched ? 1 : 0;
  trace(ctx.trace, "tracking",
        {{"tracks", tracks},
         {"pairs_evaluated", ctx.tracking.events.size()},
         {"pairs_accepted", matched}});

  if (config.flags.use_cmm) {
    ojson cam;
    if (bundle.has_frames()) {
      CameraParams params;
      params.ransac.seed = config.seed;
      ctx.camera = build_camera_model(bundle, ctx.schedule, params);
      ojson intervals = ojson::array();
      for (const auto& [key, e] : ctx.camera->intervals) {
        ojson rec = {{"from", e.from},     {"to", e.to},
                     {"dx", e.transform.tx}, {"dy", e.transform.ty},
                     {"inliers", e.inliers}, {"rms", e.rms_residual},
                     {"direct", e.direct},   {"failed", e.failed}};
        if (!e.note.empty()) rec["note"] = e.note;
        intervals.push_back(rec);
      }
      cam = {{"estimated", true}, {"intervals", intervals}};
    } else {
      ctx.camera = CameraMotionModel::identity(ctx.schedule);
      cam = {{"estimated", false}, {"note", "bundle has no frames; identity camera"}};
    }
    trace(ctx.trace, "camera", cam);
  }

  ctx.occlusions = infer_occlusions(ctx.tracking.tracks, ctx.schedule);
  ojson occ = ojson::array();
  for (const auto& e : ctx.occlusions)
    occ.push_back({{"frame", e.frame}, {"front", e.front_id}, {"back", e.back_id},
                   {"overlap_px", e.overlap_px}});
  trace(ctx.trace, "occlusion", {{"events", occ}});
  return ctx;
}

RunResult run_pipeline(const PerceptionBundle& bundle, const std::string& query,
                       const PipelineConfig& config, const PipelineServices& services) {
  config.validate();
  RunResult r;
  r.video_id = bundle.video.id;
  r.query = query;
  r.masks = MaskSequence::empty_like(bundle.video.id,
                                     static_cast<std::size_t>(bundle.video.frame_count),
                                     bundle.video.width, bundle.video.height);
  ChatEndpoint* endpoint = config.reasoner.offline ? nullptr : services.endpoint;

  trace(r.trace, "config",
        {{"flags",
          {{"use_cmr", config.flags.use_cmr},
           {"use_fpv", config.flags.use_fpv},
           {"use_cmm", config.flags.use_cmm},
           {"use_or", config.flags.use_or}}},
         {"offline", endpoint == nullptr},
         {"seed", config.seed}});

  // M1: query decomposition.
  const DecompositionOutcome dec =
      decompose_query(query, endpoint, std::max(1, config.reasoner.retry_budget));
  r.structured = dec.query;
  const StructuredQuery& q = r.structured;
  const int K = std::max(1, q.cardinality);
  trace(r.trace, "decompose",
        {{"query", query},
         {"structured", query_json(q)},
         {"fallback", dec.used_fallback},
         {"attempts", dec.endpoint_attempts},
         {"errors", dec.errors}});

  // M2: grounding and tracking.
  PerceptionContext local;
  const PerceptionContext* ctx = services.context;
  if (ctx == nullptr) {
    local = build_perception_context(bundle, config);
    ctx = &local;
  }
  r.trace.insert(r.trace.end(), ctx->trace.begin(), ctx->trace.end());

  std::vector<const Trajectory*> candidates;
  for (const auto& t : ctx->tracking.tracks)
    if (category_matches(t.category, q.candidate_entities)) candidates.push_back(&t);
  std::vector<int> candidate_ids;
  for (const Trajectory* t : candidates) candidate_ids.push_back(t->id);
  r.candidate_count = candidates.size();
  trace(r.trace, "candidates", {{"ids", candidate_ids}});

  if (candidates.empty()) {
    r.zero_candidates = true;
    r.selection = "none";
    trace(r.trace, "select", {{"ids", ojson::array()}, {"source", r.selection},
                              {"zero_candidates", true}});
    return r;
  }

  // M3a: coarse-grained motion reasoning.
  std::vector<const Trajectory*> filtered = candidates;
  bool have_motion_ranking = false;
  if (config.flags.use_cmr && !detail::trim(q.motion_descriptor).empty()) {
    MotionContext mctx;
    if (config.flags.use_cmm && ctx->camera) mctx.camera = &*ctx->camera;
    if (config.flags.use_or) mctx.occlusions = &ctx->occlusions;
    mctx.image_diagonal = ctx->image_diagonal;
    const CoarseFilterResult cf =
        coarse_filter(candidates, q.motion_descriptor, mctx, K, config.reasoner, endpoint);
    filtered.clear();
    for (int id : cf.kept_ids)
      for (const Trajectory* t : candidates)
        if (t->id == id) filtered.push_back(t);
    have_motion_ranking = cf.reasoned;
    trace(r.trace, "motion",
          {{"prompt", cf.prompt},
           {"responses", cf.raw_responses},
           {"errors", cf.errors},
           {"fallback", cf.used_fallback},
           {"attempts", cf.endpoint_attempts},
           {"ranking", cf.verdict.ranked_ids},
           {"ambiguous", cf.verdict.ambiguous},
           {"rationale", cf.verdict.rationale},
           {"kept", cf.kept_ids}});
  } else {
    trace(r.trace, "motion",
          {{"skipped", config.flags.use_cmr ? "empty motion descriptor" : "disabled"}});
  }
  r.filtered_count = filtered.size();

  // M3b: conditional pose verification.
  std::vector<int> pose_ranking;
  if (config.flags.use_fpv && should_activate(filtered.size(), K, q.posture_descriptor)) {
    const BundleEmbeddingBackend bundle_backend(bundle);
    const EmbeddingBackend& backend =
        services.embeddings ? *services.embeddings : static_cast<const EmbeddingBackend&>(bundle_backend);
    try {
      const PoseRanking pr = rank_by_similarity(filtered, q.posture_descriptor, config.k, backend);
      pose_ranking = pr.ranked_ids;
      r.fpv_activated = true;
      ojson sims = ojson::object();
      for (int id : pr.ranked_ids) sims[std::to_string(id)] = pr.similarity.at(id);
      trace(r.trace, "pose",
            {{"frames", pr.frames},
             {"fewer_keyframes", pr.fewer_keyframes},
             {"similarity", sims},
             {"ranking", pr.ranked_ids}});
      r.low_confidence = r.low_confidence || pr.fewer_keyframes;
    } catch (const Error& e) {
      trace(r.trace, "pose", {{"error", e.what()}});
    }
  } else {
    std::string why = "disabled";
    if (config.flags.use_fpv) {
      if (filtered.size() <= static_cast<std::size_t>(K)) {
        why = "candidates within cardinality";
      } else {
        why = "empty posture descriptor";
        r.low_confidence = true;
      }
    }
    trace(r.trace, "pose", {{"skipped", why}});
  }

  // Final selection.
  std::vector<int> filtered_ids;
  for (const Trajectory* t : filtered) filtered_ids.push_back(t->id);
  const std::size_t want = static_cast<std::size_t>(K);
  if (!pose_ranking.empty()) {
    r.selected_ids = take(pose_ranking, want);
    r.selection = "pose";
  } else if (have_motion_ranking) {
    r.selected_ids = take(filtered_ids, want);
    r.selection = "motion";
  } else {
    std::vector<int> pool = filtered_ids;
    std::mt19937_64 rng(config.seed);
    std::shuffle(pool.begin(), pool.end(), rng);
    r.selected_ids = take(pool, want);
    r.selection = "random";
  }
  trace(r.trace, "select",
        {{"ids", r.selected_ids},
         {"source", r.selection},
         {"candidates", r.candidate_count},
         {"filtered", r.filtered_count},
         {"low_confidence", r.low_confidence}});

  for (int id : r.selected_ids) {
    for (const auto& t : ctx->tracking.tracks) {
      if (t.id != id) continue;
      r.per_id_masks[id] = t.dense_masks;
      for (std::size_t f = 0; f < r.masks.frames.size() && f < t.dense_masks.size(); ++f)
        r.masks.frames[f] = r.masks.frames[f].united(t.dense_masks[f]);
    }
  }
  return r;
}

EvalReport evaluate_run(const RunResult& result, const MaskSequence& ground_truth,
                        int boundary_radius) {
  return evaluate(result.masks, ground_truth, boundary_radius);
}

const AblationCell& AblationReport::cell(const std::string& reasoning,
                                         const std::string& context) const {
  for (const auto& c : cells)
    if (c.reasoning == reasoning && c.context == context) return c;
  throw LookupError("no ablation cell " + reasoning + " / " + context);
}

std::string AblationReport::format() const {
  std::set<std::string> tags;
  for (const auto& c : cells)
    for (const auto& [t, v] : c.tag_mean) tags.insert(t);
  std::ostringstream out;
  out << "reasoning\tcontext\tmean_jf";
  for (const auto& t : tags) out << "\t" << t;
  out << "\n";
  char buf[32];
  for (const auto& c : cells) {
    std::snprintf(buf, sizeof buf, "%.4f", c.mean_jf);
    out << c.reasoning << "\t" << c.context << "\t" << buf;
    for (const auto& t : tags) {
      auto it = c.tag_mean.find(t);
      if (it == c.tag_mean.end()) {
        out << "\t-";
      } else {
        std::snprintf(buf, sizeof buf, "%.4f", it->second);
        out << "\t" << buf;
      }
    }
    out << "\n";
  }
  return out.str();
}

AblationReport run_ablation_suite(const std::vector<AblationScene>& scenes,
                                  const PipelineConfig& config) {
  if (scenes.empty()) throw InputError("ablation needs at least one scene");
  struct Variant {
    const char* reasoning;
    const char* context;
    AblationFlags flags;
  };
  const std::vector<Variant> variants = {
      {"baseline", "full", {false, false, true, true}},
      {"+CMR", "full", {true, false, true, true}},
      {"+FPV", "full", {false, true, true, true}},
      {"full", "full", {true, true, true, true}},
      {"full", "trajectory-only", {true, true, false, false}},
      {"full", "+CMM", {true, true, true, false}},
      {"full", "+OR", {true, true, false, true}},
  };

  AblationReport report;
  for (const auto& v : variants) report.cells.push_back({v.reasoning, v.context, 0.0, {}, {}});
  std::map<std::string, int> tag_count;
  std::vector<std::map<std::string, double>> tag_sum(variants.size());

  PipelineConfig base = config;
  base.reasoner.offline = true;
  base.flags = AblationFlags{};
  for (const auto& scene : scenes) {
    report.scenes.push_back(scene.name);
    const PerceptionContext ctx = build_perception_context(scene.bundle, base);
    PipelineServices services;
    services.context = &ctx;
    for (const auto& t : scene.tags) ++tag_count[t];
    for (std::size_t i = 0; i < variants.size(); ++i) {
      PipelineConfig c = base;
      c.flags = variants[i].flags;
      const RunResult r = run_pipeline(scene.bundle, scene.query, c, services);
      const double jf = evaluate_run(r, scene.ground_truth, c.boundary_radius).jf_mean;
      report.cells[i].per_scene_jf.push_back(jf);
      for (const auto& t : scene.tags) tag_sum[i][t] += jf;
    }
  }
  for (std::size_t i = 0; i < variants.size(); ++i) {
    AblationCell& c = report.cells[i];
    double sum = 0.0;
    for (double v : c.per_scene_jf) sum += v;
    c.mean_jf = sum / static_cast<double>(c.per_scene_jf.size());
    for (const auto& [t, s] : tag_sum[i]) c.tag_mean[t] = s / tag_count[t];
  }
  return report;
}

}  // namespace refvos
