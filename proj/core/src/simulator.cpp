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

#include "refvos/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <set>

#include <nlohmann/json.hpp>

#include "json_io.hpp"
#include "refvos/error.hpp"
#include "refvos/pose_verifier.hpp"
#include "refvos/trajectory.hpp"
#include "text_util.hpp"

namespace refvos {

using nlohmann::json;

namespace {

// Window of raw frames the exporter propagates past each keyframe: one full
// interval plus the verification window.
constexpr int kVerificationWindow = 3;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

double lattice(long ix, long iy, std::uint64_t seed) {
  const std::uint64_t h =
      splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(ix) * 0x100000001b3ULL +
                                   static_cast<std::uint64_t>(iy)));
  return static_cast<double>(h >> 11) * (1.0 / 9007199254740992.0);
}

double value_noise(double x, double y, double cell, std::uint64_t seed) {
  const double gx = x / cell, gy = y / cell;
  const double fx0 = std::floor(gx), fy0 = std::floor(gy);
  const long ix = static_cast<long>(fx0), iy = static_cast<long>(fy0);
  double fx = gx - fx0, fy = gy - fy0;
  fx = fx * fx * (3.0 - 2.0 * fx);
  fy = fy * fy * (3.0 - 2.0 * fy);
  const double a = lattice(ix, iy, seed), b = lattice(ix + 1, iy, seed);
  const double c = lattice(ix, iy + 1, seed), d = lattice(ix + 1, iy + 1, seed);
  return (a + (b - a) * fx) * (1.0 - fy) + (c + (d - c) * fx) * fy;
}

// Three octaves in [0, 1].
double texture(double x, double y, std::uint64_t seed) {
  return 0.55 * value_noise(x, y, 9.0, seed) + 0.3 * value_noise(x, y, 4.5, seed + 1) +
         0.15 * value_noise(x, y, 2.2, seed + 2);
}

std::uint8_t clamp_byte(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

AffineTransform camera_at(const SceneSpec& spec, int t) {
  const double z = 1.0 + t * spec.camera.zoom_rate;
  const double cx = spec.width / 2.0, cy = spec.height / 2.0;
  return {z, 0.0, (1.0 - z) * cx + t * spec.camera.pan_x,
          0.0, z, (1.0 - z) * cy + t * spec.camera.pan_y};
}

Point2D world_centre(const ObjectScript& o, int t) {
  const auto& w = o.waypoints;
  if (t <= w.front().frame) return {w.front().x, w.front().y};
  if (t >= w.back().frame) return {w.back().x, w.back().y};
  for (std::size_t i = 1; i < w.size(); ++i) {
    if (t <= w[i].frame) {
      const double a = double(t - w[i - 1].frame) / double(w[i].frame - w[i - 1].frame);
      return {w[i - 1].x + a * (w[i].x - w[i - 1].x), w[i - 1].y + a * (w[i].y - w[i - 1].y)};
    }
  }
  return {w.back().x, w.back().y};
}

bool visible_at(const ObjectScript& o, int t) {
  return t >= o.appear_frame && (o.vanish_frame < 0 || t <= o.vanish_frame);
}

bool layered_before(const ObjectScript& a, const ObjectScript& b) {
  return a.depth != b.depth ? a.depth < b.depth : a.id < b.id;
}

std::string pluralize(const std::string& noun) {
  if (noun.empty()) return noun;
  const char last = noun.back();
  if (noun.ends_with("s") || noun.ends_with("x") || noun.ends_with("ch") ||
      noun.ends_with("sh"))
    return noun + "es";
  if (last == 'y' && noun.size() > 1 &&
      std::string("aeiou").find(noun[noun.size() - 2]) == std::string::npos)
    return noun.substr(0, noun.size() - 1) + "ies";
  return noun + "s";
}

const char* number_word(int k) {
  static const char* words[] = {"zero", "one", "two",   "three", "four", "five",
                                "six",  "seven", "eight", "nine",  "ten"};
  return k >= 0 && k <= 10 ? words[k] : nullptr;
}

std::vector<double> crop_vector(const ObjectScript& o, int dim, double noise,
                                std::mt19937_64& rng) {
  std::vector<double> v(dim, 0.0);
  auto add = [&](const std::string& word) {
    const std::vector<double> p = descriptor_prototype(word, dim);
    for (int i = 0; i < dim; ++i) v[i] += p[i];
  };
  add(normalize_entity(o.category));
  for (const auto& a : o.attributes) add(a);
  if (!o.posture.empty()) add(o.posture);
  std::normal_distribution<double> n(0.0, noise);
  if (noise > 0.0)
    for (double& x : v) x += n(rng);
  return v;
}

}  // namespace

std::vector<double> descriptor_prototype(const std::string& word, int dim) {
  std::mt19937_64 rng(fnv1a64(word));
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<double> v(dim);
  double norm = 0.0;
  for (double& x : v) {
    x = n(rng);
    norm += x * x;
  }
  norm = std::sqrt(norm);
  for (double& x : v) x /= norm;
  return v;
}

void SceneSpec::validate() const {
  if (width < 8 || height < 8) throw ValidationError("spec.width", "resolution too small");
  if (frame_count < 1) throw ValidationError("spec.frame_count", "must be positive");
  if (keyframe_interval < 1)
    throw ValidationError("spec.keyframe_interval", "must be positive");
  if (embedding_dim < 1) throw ValidationError("spec.embedding_dim", "must be positive");
  std::set<int> ids;
  for (std::size_t i = 0; i < objects.size(); ++i) {
    const ObjectScript& o = objects[i];
    const std::string path = "spec.objects[" + std::to_string(i) + "]";
    if (!ids.insert(o.id).second) throw ValidationError(path + ".id", "duplicate id");
    if (o.category.empty()) throw ValidationError(path + ".category", "empty");
    if (o.shape != "ellipse" && o.shape != "rect")
      throw ValidationError(path + ".shape", "must be ellipse or rect");
    if (!(o.width > 0 && o.height > 0)) throw ValidationError(path + ".width", "must be > 0");
    if (o.waypoints.empty()) throw ValidationError(path + ".waypoints", "empty");
    for (std::size_t w = 1; w < o.waypoints.size(); ++w)
      if (o.waypoints[w].frame <= o.waypoints[w - 1].frame)
        throw ValidationError(path + ".waypoints", "frames must increase");
  }
  for (int t : expression.target_ids)
    if (!ids.count(t)) throw ValidationError("spec.expression.target_ids", "unknown object");
  if (expression.cardinality < 1)
    throw ValidationError("spec.expression.cardinality", "must be >= 1");
  for (int t : {0, frame_count - 1}) {
    const double z = 1.0 + t * camera.zoom_rate;
    if (!(z > 1e-6)) throw ValidationError("spec.camera.zoom_rate", "camera not invertible");
  }
}

std::pair<std::string, StructuredQuery> scripted_expression(const SceneSpec& spec) {
  const ExpressionTemplate& e = spec.expression;
  std::vector<std::string> words;
  if (e.cardinality > 1) {
    const char* w = number_word(e.cardinality);
    words.push_back(w ? w : std::to_string(e.cardinality));
  } else {
    words.push_back("the");
  }
  for (const auto& a : e.attributes) words.push_back(a);
  words.push_back(e.cardinality > 1 ? pluralize(e.entity) : e.entity);
  for (const auto& p : e.posture_words) words.push_back(p);
  for (const auto& m : e.motion_words) words.push_back(m);
  const bool has_context = !e.relation.empty() && !e.context_entity.empty();
  if (has_context) {
    words.push_back(e.relation);
    words.push_back("the");
    words.push_back(e.context_entity);
  }

  StructuredQuery q;
  q.raw_query = detail::join(words, " ");
  q.candidate_entities = {normalize_entity(e.entity)};
  if (has_context) q.context_entities = {normalize_entity(e.context_entity)};
  std::vector<std::string> motion = e.motion_words;
  if (has_context && e.relation == "in front of") motion.push_back("in front");
  if (has_context && e.relation == "behind") motion.push_back("behind");
  q.motion_descriptor = detail::join(motion, " ");
  std::vector<std::string> posture = e.attributes;
  posture.insert(posture.end(), e.posture_words.begin(), e.posture_words.end());
  q.posture_descriptor = detail::join(posture, " ");
  q.cardinality = e.cardinality;
  return {q.raw_query, q};
}

GeneratedScene generate_scene(const SceneSpec& spec, std::uint64_t seed) {
  spec.validate();
  const int W = spec.width, H = spec.height, T = spec.frame_count;
  std::mt19937_64 rng(splitmix64(seed));
  const std::uint64_t bg_seed = splitmix64(seed ^ 0x5bd1e995ULL);

  GeneratedScene scene;
  scene.spec = spec;
  std::tie(scene.query, scene.expected_query) = scripted_expression(spec);

  std::vector<const ObjectScript*> layers;
  for (const auto& o : spec.objects) layers.push_back(&o);
  std::sort(layers.begin(), layers.end(),
            [](const ObjectScript* a, const ObjectScript* b) { return layered_before(*a, *b); });

  PerceptionBundle& bundle = scene.bundle;
  bundle.video.id = spec.name;
  bundle.video.width = W;
  bundle.video.height = H;
  bundle.video.frame_count = T;
  bundle.video.keyframe_interval = spec.keyframe_interval;

  GroundTruth& gt = scene.truth;
  gt.target_ids = spec.expression.target_ids;
  gt.target.video_id = spec.name;
  for (const auto& o : spec.objects) {
    gt.object_masks[o.id].assign(T, BinaryMask(W, H));
    gt.object_boxes[o.id].assign(T, std::nullopt);
  }

  for (int t = 0; t < T; ++t) {
    const AffineTransform A = camera_at(spec, t);
    const AffineTransform inv = A.inverse();
    const double z = A.a;
    gt.camera.push_back(A);

    Image frame(W, H, 3);
    for (int y = 0; y < H; ++y) {
      for (int x = 0; x < W; ++x) {
        const Point2D p = inv.apply({x + 0.5, y + 0.5});
        const double v = 40.0 + 175.0 * texture(p.x, p.y, bg_seed);
        frame.at(x, y, 0) = clamp_byte(v);
        frame.at(x, y, 1) = clamp_byte(0.85 * v + 20.0);
        frame.at(x, y, 2) = clamp_byte(0.7 * v + 30.0);
      }
    }

    std::map<int, BinaryMask> amodal;
    for (const ObjectScript* o : layers) {
      if (!visible_at(*o, t)) continue;
      const Point2D c = A.apply(world_centre(*o, t));
      const double hw = z * o->width / 2.0, hh = z * o->height / 2.0;
      const std::uint64_t tex_seed = splitmix64(seed + 7919ULL * (o->id + 1));
      BinaryMask m(W, H);
      const int x0 = std::max(0, static_cast<int>(std::floor(c.x - hw)));
      const int x1 = std::min(W - 1, static_cast<int>(std::ceil(c.x + hw)));
      const int y0 = std::max(0, static_cast<int>(std::floor(c.y - hh)));
      const int y1 = std::min(H - 1, static_cast<int>(std::ceil(c.y + hh)));
      for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
          const double dx = (x + 0.5 - c.x) / hw, dy = (y + 0.5 - c.y) / hh;
          const bool inside = o->shape == "rect" ? (std::abs(dx) <= 1.0 && std::abs(dy) <= 1.0)
                                                 : (dx * dx + dy * dy <= 1.0);
          if (!inside) continue;
          m.set(x, y);
          const double n = texture((x + 0.5 - c.x) / z, (y + 0.5 - c.y) / z, tex_seed);
          for (int ch = 0; ch < 3; ++ch)
            frame.at(x, y, ch) = clamp_byte(o->color[ch] * (0.45 + 0.55 * n));
        }
      }
      amodal.emplace(o->id, std::move(m));
    }

    // Visible mask: amodal minus everything layered in front.
    for (std::size_t i = 0; i < layers.size(); ++i) {
      auto it = amodal.find(layers[i]->id);
      if (it == amodal.end()) continue;
      BinaryMask vis = it->second;
      for (std::size_t j = i + 1; j < layers.size(); ++j) {
        auto jt = amodal.find(layers[j]->id);
        if (jt == amodal.end()) continue;
        for (int y = 0; y < H; ++y)
          for (int x = 0; x < W; ++x)
            if (jt->second.at(x, y)) vis.set(x, y, false);
      }
      gt.object_boxes[layers[i]->id][t] = vis.bounding_box();
      gt.object_masks[layers[i]->id][t] = std::move(vis);
    }
    for (std::size_t i = 0; i < layers.size(); ++i) {
      for (std::size_t j = i + 1; j < layers.size(); ++j) {
        auto a = amodal.find(layers[i]->id), b = amodal.find(layers[j]->id);
        if (a == amodal.end() || b == amodal.end()) continue;
        const std::size_t overlap = a->second.intersection_count(b->second);
        if (overlap == 0 || gt.object_masks[layers[i]->id][t].empty()) continue;
        gt.occlusions.push_back({t, layers[j]->id, layers[i]->id, overlap});
      }
    }

    BinaryMask target(W, H);
    for (int id : gt.target_ids) target = target.united(gt.object_masks[id][t]);
    gt.target.frames.push_back(std::move(target));
    bundle.frames.push_back(std::move(frame));
  }

  // Detections at keyframes, optionally jittered or dropped.
  const KeyframeSchedule schedule = sample_keyframes(T, spec.keyframe_interval);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> jitter(0.0, std::max(spec.perturbation.box_jitter, 0.0));
  std::map<int, int> first_detected;
  for (int k : schedule.indices) {
    for (const auto& o : spec.objects) {
      const BinaryMask& m = gt.object_masks[o.id][k];
      if (m.empty()) continue;
      if (spec.perturbation.dropout > 0.0 && unit(rng) < spec.perturbation.dropout) continue;
      Box2D box = *m.bounding_box();
      if (spec.perturbation.box_jitter > 0.0) {
        auto j = [&] { return std::clamp(jitter(rng), -2.0, 2.0); };
        box = {box.xmin + j(), box.ymin + j(), box.xmax + j(), box.ymax + j()};
        if (box.xmax < box.xmin) std::swap(box.xmax, box.xmin);
        if (box.ymax < box.ymin) std::swap(box.ymax, box.ymin);
      }
      DetectionRecord d;
      d.frame_index = k;
      char key[16];
      std::snprintf(key, sizeof key, "o%02d", o.id);
      d.instance_key = key;
      d.category = o.category;
      d.score = 0.85 + 0.1 * unit(rng);
      d.box = box;
      d.mask = m;
      first_detected.emplace(o.id, k);

      // Ground-truth propagation stands in for the video segmenter.
      auto emit = [&](int f) {
        const BinaryMask& pm = gt.object_masks[o.id][f];
        bundle.propagations[{k, d.instance_key, f}] = {pm.bounding_box().value_or(Box2D{}), pm};
      };
      for (int f = k + 1; f <= std::min(T - 1, k + spec.keyframe_interval + kVerificationWindow - 1);
           ++f)
        emit(f);
      if (first_detected[o.id] == k)
        for (int f = 0; f < k; ++f) emit(f);
      bundle.detections.push_back(std::move(d));
    }
  }
  bundle = finalize_bundle(std::move(bundle));

  // The exporter keys crop embeddings by the ids the tracker will assign.
  const TrackingResult tracking = build_trajectories(bundle, AssociationParams{});
  for (const Trajectory& tr : tracking.tracks) {
    std::map<int, std::size_t> votes;
    for (const auto& [k, st] : tr.keyframe_states)
      for (const auto& o : spec.objects)
        votes[o.id] += st.mask.intersection_count(gt.object_masks[o.id][k]);
    int best = -1;
    std::size_t best_votes = 0;
    for (const auto& [id, v] : votes)
      if (v > best_votes) best = id, best_votes = v;
    if (best < 0) continue;
    gt.track_to_object[tr.id] = best;
    const ObjectScript& o =
        *std::find_if(spec.objects.begin(), spec.objects.end(),
                      [&](const ObjectScript& s) { return s.id == best; });
    for (const auto& [k, st] : tr.keyframe_states)
      bundle.embeddings[crop_embedding_key(tr.id, k)] =
          crop_vector(o, spec.embedding_dim, spec.embedding_noise, rng);
  }
  const std::string& posture = scene.expected_query.posture_descriptor;
  if (!posture.empty()) {
    std::vector<double> text(spec.embedding_dim, 0.0);
    for (const auto& w : detail::words(posture)) {
      const std::vector<double> p = descriptor_prototype(w, spec.embedding_dim);
      for (int i = 0; i < spec.embedding_dim; ++i) text[i] += p[i];
    }
    bundle.embeddings[text_embedding_key(posture)] = text;
  }
  return scene;
}

// ---------------------------------------------------------------------------
// Spec and ground-truth files

namespace {

json object_to_json(const ObjectScript& o) {
  json wp = json::array();
  for (const auto& w : o.waypoints) wp.push_back({{"frame", w.frame}, {"x", w.x}, {"y", w.y}});
  return {{"id", o.id},
          {"category", o.category},
          {"shape", o.shape},
          {"width", o.width},
          {"height", o.height},
          {"depth", o.depth},
          {"color", o.color},
          {"waypoints", wp},
          {"attributes", o.attributes},
          {"posture", o.posture},
          {"appear_frame", o.appear_frame},
          {"vanish_frame", o.vanish_frame}};
}

ObjectScript object_from_json(const json& j) {
  ObjectScript o;
  o.id = j.at("id").get<int>();
  o.category = j.at("category").get<std::string>();
  o.shape = j.value("shape", o.shape);
  o.width = j.value("width", o.width);
  o.height = j.value("height", o.height);
  o.depth = j.value("depth", o.depth);
  o.color = j.value("color", o.color);
  for (const auto& w : j.at("waypoints"))
    o.waypoints.push_back({w.at("frame").get<int>(), w.at("x").get<double>(),
                           w.at("y").get<double>()});
  o.attributes = j.value("attributes", o.attributes);
  o.posture = j.value("posture", o.posture);
  o.appear_frame = j.value("appear_frame", o.appear_frame);
  o.vanish_frame = j.value("vanish_frame", o.vanish_frame);
  return o;
}

}  // namespace

std::string scene_spec_to_json_text(const SceneSpec& s) {
  json objects = json::array();
  for (const auto& o : s.objects) objects.push_back(object_to_json(o));
  const ExpressionTemplate& e = s.expression;
  json j = {{"name", s.name},
            {"width", s.width},
            {"height", s.height},
            {"frame_count", s.frame_count},
            {"keyframe_interval", s.keyframe_interval},
            {"objects", objects},
            {"camera",
             {{"pan_x", s.camera.pan_x}, {"pan_y", s.camera.pan_y},
              {"zoom_rate", s.camera.zoom_rate}}},
            {"expression",
             {{"entity", e.entity},
              {"attributes", e.attributes},
              {"posture_words", e.posture_words},
              {"motion_words", e.motion_words},
              {"relation", e.relation},
              {"context_entity", e.context_entity},
              {"cardinality", e.cardinality},
              {"target_ids", e.target_ids}}},
            {"perturbation",
             {{"box_jitter", s.perturbation.box_jitter}, {"dropout", s.perturbation.dropout}}},
            {"embedding_dim", s.embedding_dim},
            {"embedding_noise", s.embedding_noise},
            {"tags", s.tags}};
  return j.dump(2) + "\n";
}

SceneSpec scene_spec_from_json_text(const std::string& text) {
  SceneSpec s;
  try {
    const json j = json::parse(text);
    s.name = j.value("name", s.name);
    s.width = j.value("width", s.width);
    s.height = j.value("height", s.height);
    s.frame_count = j.value("frame_count", s.frame_count);
    s.keyframe_interval = j.value("keyframe_interval", s.keyframe_interval);
    for (const auto& o : j.value("objects", json::array())) s.objects.push_back(object_from_json(o));
    if (j.contains("camera")) {
      const json& c = j["camera"];
      s.camera.pan_x = c.value("pan_x", 0.0);
      s.camera.pan_y = c.value("pan_y", 0.0);
      s.camera.zoom_rate = c.value("zoom_rate", 0.0);
    }
    if (j.contains("expression")) {
      const json& e = j["expression"];
      ExpressionTemplate& x = s.expression;
      x.entity = e.value("entity", x.entity);
      x.attributes = e.value("attributes", x.attributes);
      x.posture_words = e.value("posture_words", x.posture_words);
      x.motion_words = e.value("motion_words", x.motion_words);
      x.relation = e.value("relation", x.relation);
      x.context_entity = e.value("context_entity", x.context_entity);
      x.cardinality = e.value("cardinality", x.cardinality);
      x.target_ids = e.value("target_ids", x.target_ids);
    }
    if (j.contains("perturbation")) {
      s.perturbation.box_jitter = j["perturbation"].value("box_jitter", 0.0);
      s.perturbation.dropout = j["perturbation"].value("dropout", 0.0);
    }
    s.embedding_dim = j.value("embedding_dim", s.embedding_dim);
    s.embedding_noise = j.value("embedding_noise", s.embedding_noise);
    s.tags = j.value("tags", s.tags);
  } catch (const json::exception& e) {
    throw ValidationError("spec", e.what());
  }
  s.validate();
  return s;
}

SceneSpec load_scene_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return scene_spec_from_json_text(ss.str());
}

void save_scene(const GeneratedScene& scene, const std::filesystem::path& dir) {
  save_bundle(scene.bundle, dir);
  const GroundTruth& gt = scene.truth;
  json target = json::array();
  for (const auto& m : gt.target.frames) target.push_back(detail::mask_to_json(m));
  json camera = json::array();
  for (const auto& a : gt.camera) camera.push_back({a.a, a.b, a.tx, a.c, a.d, a.ty});
  json occ = json::array();
  for (const auto& e : gt.occlusions)
    occ.push_back({{"frame", e.frame}, {"front", e.front_id}, {"back", e.back_id},
                   {"overlap_px", e.overlap_px}});
  json objects = json::array();
  for (const auto& [id, boxes] : gt.object_boxes) {
    json jb = json::array();
    for (const auto& b : boxes) jb.push_back(b ? detail::box_to_json(*b) : json(nullptr));
    objects.push_back({{"id", id}, {"boxes", jb}});
  }
  json tracks = json::object();
  for (const auto& [track, obj] : gt.track_to_object) tracks[std::to_string(track)] = obj;
  const StructuredQuery& q = scene.expected_query;
  json j = {{"video_id", scene.spec.name},
            {"query", scene.query},
            {"expected_query",
             {{"candidate_entities", q.candidate_entities},
              {"context_entities", q.context_entities},
              {"motion", q.motion_descriptor},
              {"posture", q.posture_descriptor},
              {"cardinality", q.cardinality}}},
            {"target_ids", gt.target_ids},
            {"tags", scene.spec.tags},
            {"target", target},
            {"camera", camera},
            {"occlusions", occ},
            {"objects", objects},
            {"track_to_object", tracks}};
  detail::write_text_file(dir / "ground_truth.json", j.dump(1) + "\n");
  detail::write_text_file(dir / "spec.json", scene_spec_to_json_text(scene.spec));
}

LoadedGroundTruth load_ground_truth(const std::filesystem::path& file) {
  const json j = detail::read_json_file(file);
  LoadedGroundTruth gt;
  gt.query = detail::field<std::string>(j, "query", "ground_truth");
  gt.target.video_id = j.value("video_id", std::string());
  gt.target_ids = j.value("target_ids", std::vector<int>{});
  gt.tags = j.value("tags", std::vector<std::string>{});
  const json& frames = j.at("target");
  for (std::size_t i = 0; i < frames.size(); ++i)
    gt.target.frames.push_back(
        detail::mask_from_json(frames[i], "ground_truth.target[" + std::to_string(i) + "]"));
  return gt;
}

// ---------------------------------------------------------------------------
// Standard scenario mix

namespace {

const std::vector<std::string> kEntities = {"cat", "dog", "horse", "bird", "person", "sheep"};
const std::vector<std::string> kContexts = {"box", "plate", "bench", "table"};
const std::vector<std::string> kContextAttributes = {"green", "red", "white", ""};
const std::vector<std::string> kPostures = {"standing", "sitting", "lying"};
const std::vector<std::string> kStillWords = {"stationary", "motionless", "still", "static"};
const std::vector<std::string> kMoveVerbs = {"moving", "walking", "running"};

class SuiteBuilder {
 public:
  SuiteBuilder(std::uint64_t seed) : rng_(seed) {}

  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng_); }
  int integer(int a, int b) { return std::uniform_int_distribution<int>(a, b)(rng_); }
  template <typename T>
  const T& pick(const std::vector<T>& v) {
    return v[static_cast<std::size_t>(integer(0, static_cast<int>(v.size()) - 1))];
  }
  std::mt19937_64& rng() { return rng_; }

  std::array<int, 3> colour() {
    return {integer(60, 240), integer(40, 230), integer(30, 220)};
  }

  // Object travelling at world velocity (vx, vy) whose image path stays inside
  // the frame under the scene's pan; `lane_y` fixes the frame-0 row.
  ObjectScript mover(const SceneSpec& s, const std::string& category, double size,
                     double lane_y, double vx, double vy) {
    ObjectScript o;
    o.category = category;
    o.width = size;
    o.height = size * uniform(0.8, 1.0);
    o.color = colour();
    o.shape = integer(0, 1) ? "ellipse" : "rect";
    const int T = s.frame_count;
    const double ux = (vx + s.camera.pan_x) * (T - 1);
    const double margin = o.width / 2.0 + 3.0;
    const double lo = margin - std::min(0.0, ux), hi = s.width - margin - std::max(0.0, ux);
    const double x0 = lo <= hi ? uniform(lo, hi) : s.width / 2.0 - ux / 2.0;
    const double uy = (vy + s.camera.pan_y) * (T - 1);
    const double y0 = lane_y - uy / 2.0;
    o.waypoints = {{0, x0, y0}, {T - 1, x0 + vx * (T - 1), y0 + vy * (T - 1)}};
    return o;
  }

  static std::vector<double> lanes(int n, int height) {
    std::vector<double> y;
    const double top = 18.0, bottom = height - 18.0;
    for (int i = 0; i < n; ++i)
      y.push_back(n == 1 ? height / 2.0 : top + (bottom - top) * i / double(n - 1));
    return y;
  }

  // Assigns ids 1..n in a shuffled order so the target's track id varies.
  void assign_ids(std::vector<ObjectScript>& objs, std::vector<int>& target_slots,
                  SceneSpec& s) {
    std::vector<int> ids(objs.size());
    for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<int>(i) + 1;
    std::shuffle(ids.begin(), ids.end(), rng_);
    for (std::size_t i = 0; i < objs.size(); ++i) objs[i].id = ids[i];
    s.expression.target_ids.clear();
    for (int slot : target_slots) s.expression.target_ids.push_back(objs[slot].id);
    std::sort(s.expression.target_ids.begin(), s.expression.target_ids.end());
    s.objects = objs;
  }

  void shuffle_lanes(std::vector<double>& lanes) { std::shuffle(lanes.begin(), lanes.end(), rng_); }

 private:
  std::mt19937_64 rng_;
};

SceneSpec direction_scene(SuiteBuilder& b, bool pan, int k) {
  SceneSpec s;
  const double dir = b.integer(0, 1) ? 1.0 : -1.0;  // +1 right, -1 left
  const std::string entity = b.pick(kEntities);
  if (pan) {
    // The camera drifts against the queried direction so raw image motion
    // points the wrong way for the target.
    s.camera.pan_x = -dir * b.uniform(1.5, 2.0);
    s.camera.pan_y = b.uniform(-0.2, 0.2);
    s.tags.push_back("pan");
  }
  s.tags.push_back("direction");
  const int n = k > 1 ? 4 : b.integer(2, 4);
  std::vector<double> lanes = SuiteBuilder::lanes(n, s.height);
  b.shuffle_lanes(lanes);
  std::vector<ObjectScript> objs;
  std::vector<int> targets;
  for (int i = 0; i < n; ++i) {
    double vx = 0.0, vy = 0.0;
    if (i < k) {
      vx = dir * b.uniform(0.6, 1.0);
      targets.push_back(i);
    } else {
      vx = (i - k) % 2 == 0 ? 0.0 : -dir * b.uniform(0.4, 0.8);
    }
    objs.push_back(b.mover(s, entity, b.uniform(12, 17), lanes[i], vx, vy));
  }
  b.assign_ids(objs, targets, s);
  s.expression.entity = entity;
  s.expression.motion_words = {b.pick(kMoveVerbs), dir > 0 ? "right" : "left"};
  s.expression.cardinality = k;
  return s;
}

SceneSpec stationary_scene(SuiteBuilder& b, bool pan) {
  SceneSpec s;
  const std::string entity = b.pick(kEntities);
  if (pan) {
    const double sign = b.integer(0, 1) ? 1.0 : -1.0;
    s.camera.pan_x = sign * b.uniform(1.2, 1.8);
    s.tags.push_back("pan");
  }
  s.tags.push_back("stationary");
  const int n = b.integer(2, 4);
  std::vector<double> lanes = SuiteBuilder::lanes(n + 1, s.height);
  b.shuffle_lanes(lanes);
  std::vector<ObjectScript> objs;
  for (int i = 0; i < n; ++i) {
    double vx = 0.0;
    if (i == 1) vx = pan ? -s.camera.pan_x : b.uniform(0.6, 1.0);  // keeps still on screen
    if (i >= 2) vx = (b.integer(0, 1) ? 1.0 : -1.0) * b.uniform(0.5, 0.9);
    objs.push_back(b.mover(s, entity, b.uniform(12, 17), lanes[i], vx, 0.0));
  }
  const bool context = b.integer(0, 1) == 1;
  if (context) {
    ObjectScript c = b.mover(s, b.pick(kContexts), 14, lanes[n], 0.0, 0.0);
    c.shape = "rect";
    objs.push_back(c);
    const std::string attr = b.pick(kContextAttributes);
    s.expression.relation = b.integer(0, 1) ? "by" : "near";
    s.expression.context_entity = attr.empty() ? c.category : attr + " " + c.category;
  }
  std::vector<int> targets = {0};
  b.assign_ids(objs, targets, s);
  s.expression.entity = entity;
  s.expression.motion_words = {b.pick(kStillWords)};
  return s;
}

SceneSpec ambiguous_scene(SuiteBuilder& b) {
  SceneSpec s;
  const std::string entity = b.pick(kEntities);
  const double dir = b.integer(0, 1) ? 1.0 : -1.0;
  s.camera.pan_x = (b.integer(0, 1) ? 1.0 : -1.0) * b.uniform(1.0, 1.6);
  s.tags = {"pan", "posture", "ambiguous"};
  const int n = b.integer(3, 4);
  std::vector<double> lanes = SuiteBuilder::lanes(n, s.height);
  b.shuffle_lanes(lanes);
  std::vector<std::string> postures = kPostures;
  std::shuffle(postures.begin(), postures.end(), b.rng());
  std::vector<ObjectScript> objs;
  const double speed = b.uniform(0.7, 0.9);
  for (int i = 0; i < n; ++i) {
    double vx = 0.0;
    if (i < 2) vx = dir * (speed + 0.05 * i);       // target and its twin
    else if (i == 2) vx = -dir * b.uniform(0.5, 0.8);
    ObjectScript o = b.mover(s, entity, b.uniform(12, 17), lanes[i], vx, 0.0);
    o.posture = i == 0 ? postures[0] : postures[1 + (i % 2)];
    objs.push_back(o);
  }
  std::vector<int> targets = {0};
  b.assign_ids(objs, targets, s);
  s.expression.entity = entity;
  s.expression.posture_words = {postures[0]};
  s.expression.motion_words = {"moving", dir > 0 ? "right" : "left"};
  return s;
}

SceneSpec speed_scene(SuiteBuilder& b) {
  SceneSpec s;
  const std::string entity = b.pick(kEntities);
  const double sign = b.integer(0, 1) ? 1.0 : -1.0;
  s.camera.pan_x = sign * b.uniform(1.0, 1.4);
  s.tags = {"pan", "speed"};
  const int n = b.integer(3, 4);
  std::vector<double> lanes = SuiteBuilder::lanes(n, s.height);
  b.shuffle_lanes(lanes);
  std::vector<ObjectScript> objs;
  for (int i = 0; i < n; ++i) {
    double vx = 0.0;
    if (i == 0) vx = -sign * b.uniform(1.6, 1.8);  // fast in the world, slow on screen
    else if (i == 1) vx = sign * b.uniform(0.4, 0.6);
    else if (i == 3) vx = -sign * b.uniform(0.2, 0.4);
    objs.push_back(b.mover(s, entity, b.uniform(12, 17), lanes[i], vx, 0.0));
  }
  std::vector<int> targets = {0};
  b.assign_ids(objs, targets, s);
  s.expression.entity = entity;
  s.expression.motion_words = {"moving", "fast"};
  return s;
}

SceneSpec occlusion_scene(SuiteBuilder& b, bool front) {
  SceneSpec s;
  const std::string entity = b.pick(kEntities);
  s.tags = {"occlusion", front ? "front" : "behind"};
  const std::string ctx = b.pick(kContexts);
  const double cy = b.uniform(45, 75);
  const double cx = b.uniform(70, 90);
  ObjectScript box = b.mover(s, ctx, 22, cy, 0.0, 0.0);
  box.shape = "rect";
  box.height = 22;
  box.depth = 1;
  box.waypoints = {{0, cx, cy}};

  // The larger object is nearer and owns more pixels.
  auto place = [&](double size, int depth, double side) {
    ObjectScript o = b.mover(s, entity, size, cy, 0.0, 0.0);
    o.shape = "ellipse";
    o.height = size;
    o.depth = depth;
    const double reach = (22.0 + size) / 2.0 - size * 0.35;
    o.waypoints = {{0, cx + side * reach, cy + b.uniform(-3, 3)}};
    return o;
  };
  const double side = b.integer(0, 1) ? 1.0 : -1.0;
  std::vector<ObjectScript> objs = {front ? place(b.uniform(27, 30), 2, side)
                                          : place(b.uniform(12, 14), 0, side),
                                    front ? place(b.uniform(12, 14), 0, -side)
                                          : place(b.uniform(27, 30), 2, -side),
                                    box};
  if (b.integer(0, 1)) {
    // A free-standing distractor away from the cluster.
    ObjectScript free = b.mover(s, entity, 16, cy < 60 ? 100 : 18, 0.0, 0.0);
    free.waypoints = {{0, b.uniform(20, 140), cy < 60 ? 100.0 : 18.0}};
    objs.push_back(free);
  }
  std::vector<int> targets = {0};
  b.assign_ids(objs, targets, s);
  s.expression.entity = entity;
  s.expression.relation = front ? "in front of" : "behind";
  s.expression.context_entity = ctx;
  return s;
}

SceneSpec posture_scene(SuiteBuilder& b) {
  SceneSpec s;
  const std::string entity = b.pick(kEntities);
  s.tags = {"posture"};
  const int n = b.integer(2, 4);
  std::vector<double> lanes = SuiteBuilder::lanes(n, s.height);
  b.shuffle_lanes(lanes);
  std::vector<std::string> postures = kPostures;
  std::shuffle(postures.begin(), postures.end(), b.rng());
  std::vector<ObjectScript> objs;
  for (int i = 0; i < n; ++i) {
    const double vx = b.integer(0, 2) == 0 ? 0.0 : (b.integer(0, 1) ? 1 : -1) * b.uniform(0.3, 0.8);
    ObjectScript o = b.mover(s, entity, b.uniform(12, 17), lanes[i], vx, 0.0);
    o.posture = i == 0 ? postures[0] : postures[1 + (i % 2)];
    objs.push_back(o);
  }
  std::vector<int> targets = {0};
  b.assign_ids(objs, targets, s);
  s.expression.entity = entity;
  s.expression.posture_words = {postures[0]};
  return s;
}

}  // namespace

std::vector<SceneSpec> standard_suite(int count, std::uint64_t seed) {
  // 50-scene plan: 27 with camera pan, 15 with occlusion.
  enum Kind { kDirPan, kStillPan, kAmbiguous, kSpeed, kFront, kBehind, kPosture, kMulti, kStill };
  static const std::vector<std::pair<Kind, int>> mix = {
      {kDirPan, 9}, {kStillPan, 9}, {kAmbiguous, 5}, {kSpeed, 4}, {kFront, 8},
      {kBehind, 7}, {kPosture, 4},  {kMulti, 2},     {kStill, 2}};
  std::vector<Kind> plan;
  for (std::size_t round = 0; plan.size() < 50; ++round)
    for (const auto& [kind, n] : mix)
      if (static_cast<int>(round) < n) plan.push_back(kind);

  SuiteBuilder b(seed);
  std::vector<SceneSpec> out;
  for (int i = 0; i < count; ++i) {
    SceneSpec s;
    switch (plan[static_cast<std::size_t>(i) % plan.size()]) {
      case kDirPan: s = direction_scene(b, true, 1); break;
      case kStillPan: s = stationary_scene(b, true); break;
      case kAmbiguous: s = ambiguous_scene(b); break;
      case kSpeed: s = speed_scene(b); break;
      case kFront: s = occlusion_scene(b, true); break;
      case kBehind: s = occlusion_scene(b, false); break;
      case kPosture: s = posture_scene(b); break;
      case kMulti: s = direction_scene(b, false, 2); break;
      case kStill: s = stationary_scene(b, false); break;
    }
    char name[32];
    std::snprintf(name, sizeof name, "scene_%03d", i);
    s.name = name;
    s.validate();
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace refvos
