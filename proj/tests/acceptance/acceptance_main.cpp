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

// Acceptance suite: prints one PASS/FAIL line per criterion and exits non-zero
// when any criterion fails. Pass a criterion name to run only that one.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "refvos/camera.hpp"
#include "refvos/error.hpp"
#include "refvos/metrics.hpp"
#include "refvos/motion_reasoner.hpp"
#include "refvos/pipeline.hpp"
#include "refvos/pose_verifier.hpp"
#include "refvos/priors.hpp"
#include "refvos/query.hpp"
#include "refvos/simulator.hpp"
#include "refvos/trajectory.hpp"

namespace fs = std::filesystem;
using namespace refvos;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) detail = what;
    pass = pass && ok;
  }
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

// --- metrics oracle ----------------------------------------------------------

BinaryMask random_blob(std::mt19937_64& rng, int w, int h, double fill) {
  BinaryMask m(w, h);
  std::bernoulli_distribution on(fill);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      if (on(rng)) m.set(x, y);
  return m;
}

double brute_iou(const BinaryMask& a, const BinaryMask& b) {
  long inter = 0, uni = 0;
  for (int y = 0; y < a.height(); ++y)
    for (int x = 0; x < a.width(); ++x) {
      inter += a.at(x, y) && b.at(x, y);
      uni += a.at(x, y) || b.at(x, y);
    }
  return uni == 0 ? 1.0 : double(inter) / double(uni);
}

std::vector<std::pair<int, int>> brute_boundary(const BinaryMask& m) {
  std::vector<std::pair<int, int>> out;
  auto on = [&](int x, int y) {
    return x >= 0 && y >= 0 && x < m.width() && y < m.height() && m.at(x, y);
  };
  for (int y = 0; y < m.height(); ++y)
    for (int x = 0; x < m.width(); ++x) {
      if (!m.at(x, y)) continue;
      const bool edge = x == 0 || y == 0 || x == m.width() - 1 || y == m.height() - 1;
      if (edge || !on(x - 1, y) || !on(x + 1, y) || !on(x, y - 1) || !on(x, y + 1))
        out.emplace_back(x, y);
    }
  return out;
}

double brute_f(const BinaryMask& pred, const BinaryMask& gt, int radius) {
  const auto pb = brute_boundary(pred), gb = brute_boundary(gt);
  if (pb.empty() && gb.empty()) return 1.0;
  if (pb.empty() || gb.empty()) return 0.0;
  auto frac = [&](const auto& from, const auto& to) {
    double hit = 0;
    for (const auto& [x, y] : from) {
      for (const auto& [u, v] : to) {
        if ((x - u) * (x - u) + (y - v) * (y - v) <= radius * radius) {
          hit += 1;
          break;
        }
      }
    }
    return hit / double(from.size());
  };
  const double p = frac(pb, gb), r = frac(gb, pb);
  return p + r == 0.0 ? 0.0 : 2 * p * r / (p + r);
}

Outcome metrics_oracle() {
  Outcome o;
  std::mt19937_64 rng(2026);
  int fixtures = 0;
  for (int size = 5; size <= 16; ++size) {
    const int w = size, h = 5 + (size * 7) % 12;
    const int frames = 3;
    MaskSequence pred, gt;
    double js = 0.0, fs_sum = 0.0;
    const int radius = 1 + size % 3;
    for (int t = 0; t < frames; ++t) {
      BinaryMask p = random_blob(rng, w, h, 0.3 + 0.1 * t);
      BinaryMask g = random_blob(rng, w, h, 0.5);
      if (t == 2 && size % 4 == 0) p = BinaryMask(w, h);  // empty prediction
      if (t == 1 && size % 5 == 0) p = g = BinaryMask(w, h);  // both empty
      js += brute_iou(p, g);
      fs_sum += brute_f(p, g, radius);
      pred.frames.push_back(p);
      gt.frames.push_back(g);
    }
    const EvalReport r = evaluate(pred, gt, radius);
    o.require(std::abs(r.j_mean - js / frames) <= 1e-12,
              fmt("J mismatch on %gx%g fixture", w, h));
    o.require(std::abs(r.f_mean - fs_sum / frames) <= 1e-12,
              fmt("F mismatch on %gx%g fixture", w, h));
    ++fixtures;
  }
  o.require(fixtures >= 10, "fewer than 10 fixtures");
  const double jf = jf_mean(0.492, 0.556);
  o.require(std::abs(jf - 0.524) <= 1e-12, fmt("jf_mean(0.492, 0.556) = %.15f", jf));
  if (o.pass) o.detail = std::to_string(fixtures) + " fixtures exact, jf_mean 0.524";
  return o;
}

// --- affine recovery ---------------------------------------------------------

Outcome affine_recovery() {
  Outcome o;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst_coef = 0.0, worst_t = 0.0, slowest_ms = 0.0;
  for (int set = 0; set < 30; ++set) {
    const double theta = (u(rng) - 0.5) * std::numbers::pi / 6.0;
    const double scale = 0.85 + 0.3 * u(rng);
    AffineTransform truth{scale * std::cos(theta), -scale * std::sin(theta), 40 * u(rng) - 20,
                          scale * std::sin(theta), scale * std::cos(theta), 40 * u(rng) - 20};
    std::vector<Correspondence> cs;
    const int n = 100;
    for (int i = 0; i < n; ++i) {
      const Point2D p{200 * u(rng), 150 * u(rng)};
      Point2D q = truth.apply(p);
      if (i % 5 == 0) q = {q.x + 15 + 30 * u(rng), q.y - 15 - 30 * u(rng)};
      cs.push_back({p, q, 0.0});
    }
    std::shuffle(cs.begin(), cs.end(), rng);
    const auto t0 = Clock::now();
    const AffineFit fit = estimate_affine(cs, RansacParams{200, 2.0, std::uint64_t(set)});
    slowest_ms = std::max(slowest_ms, 1000.0 * seconds_since(t0));
    const AffineTransform& e = fit.transform;
    worst_coef = std::max({worst_coef, std::abs(e.a - truth.a), std::abs(e.b - truth.b),
                           std::abs(e.c - truth.c), std::abs(e.d - truth.d)});
    worst_t = std::max({worst_t, std::abs(e.tx - truth.tx), std::abs(e.ty - truth.ty)});
  }
  o.require(worst_coef <= 1e-3, fmt("coefficient error %.2e", worst_coef));
  o.require(worst_t <= 0.5, fmt("translation error %.3f px", worst_t));
  o.require(slowest_ms < 50.0, fmt("slowest fit %.2f ms", slowest_ms));
  if (o.pass)
    o.detail = fmt("30 sets, max coef err %.1e, max t err %.1e px, slowest %.2f ms", worst_coef,
                   worst_t, slowest_ms);
  return o;
}

// --- camera closed loop ------------------------------------------------------

ObjectScript object(int id, const std::string& category, double x0, double y0, double x1,
                    double y1, int last_frame, double size = 14.0) {
  ObjectScript obj;
  obj.id = id;
  obj.category = category;
  obj.width = size;
  obj.height = size;
  obj.color = {40 + 50 * id % 200, 200 - 30 * id % 150, 90 + 70 * id % 160};
  obj.waypoints = {{0, x0, y0}, {last_frame, x1, y1}};
  return obj;
}

Outcome camera_closed_loop() {
  Outcome o;
  double worst_rate = 0.0, worst_var = 0.0;
  const std::vector<std::pair<double, double>> pans = {{2.0, 0.0}, {-2.0, 0.0}, {0.0, 2.0}};
  for (std::size_t s = 0; s < pans.size(); ++s) {
    SceneSpec spec;
    spec.name = "pan";
    spec.camera.pan_x = pans[s].first;
    spec.camera.pan_y = pans[s].second;
    const int T = spec.frame_count;
    const double span = 2.0 * (T - 1);
    // Static-in-world anchor placed so its image path stays inside the frame.
    const double ax = pans[s].first > 0 ? 20.0 : pans[s].first < 0 ? 20.0 + span : 80.0;
    const double ay = pans[s].second > 0 ? 12.0 : 60.0;
    spec.objects.push_back(object(1, "box", ax, ay, ax, ay, T - 1, 16.0));
    spec.objects.push_back(object(2, "dog", 30, ay > 30 ? 25 : 60, 40, ay > 30 ? 25 : 60, T - 1));
    spec.expression.entity = "box";
    spec.expression.target_ids = {1};
    const GeneratedScene scene = generate_scene(spec, 11 + s);
    const KeyframeSchedule schedule = scene.bundle.schedule();
    const CameraMotionModel cam = build_camera_model(scene.bundle, schedule);
    const Point2D centre{spec.width / 2.0, spec.height / 2.0};
    for (const auto& [key, est] : cam.intervals) {
      const Point2D moved = est.transform.apply(centre);
      const double frames = double(key.second - key.first);
      const double rx = (moved.x - centre.x) / frames, ry = (moved.y - centre.y) / frames;
      worst_rate = std::max(worst_rate, std::hypot(rx - spec.camera.pan_x, ry - spec.camera.pan_y));
      o.require(!est.failed, "camera interval failed: " + est.note);
    }
    const TrackingResult tracking = build_trajectories(scene.bundle, AssociationParams{});
    int anchor_track = -1;
    for (const auto& [track, obj] : scene.truth.track_to_object)
      if (obj == 1) anchor_track = track;
    o.require(anchor_track > 0, "static object was not tracked");
    for (const Trajectory& tr : tracking.tracks) {
      if (tr.id != anchor_track) continue;
      const auto boxes = compensate_trajectory(tr, cam);
      double mx = 0, my = 0;
      for (const auto& [k, b] : boxes) mx += box_centroid(b).x, my += box_centroid(b).y;
      mx /= boxes.size();
      my /= boxes.size();
      double var = 0;
      for (const auto& [k, b] : boxes) {
        const Point2D c = box_centroid(b);
        var += (c.x - mx) * (c.x - mx) + (c.y - my) * (c.y - my);
      }
      worst_var = std::max(worst_var, var / boxes.size());
    }
  }
  o.require(worst_rate <= 0.2, fmt("translation error %.3f px/frame", worst_rate));
  o.require(worst_var < 1.0, fmt("compensated centroid variance %.3f px^2", worst_var));
  if (o.pass)
    o.detail = fmt("max rate error %.3f px/frame, max anchor variance %.3f px^2", worst_rate,
                   worst_var);
  return o;
}

// --- association -------------------------------------------------------------

SceneSpec non_crossing_scene(std::mt19937_64& rng, int index) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  SceneSpec spec;
  spec.name = "lanes_" + std::to_string(index);
  const int n = 2 + index % 4;
  const int T = spec.frame_count;
  if (index % 2 == 1) spec.camera.pan_x = (u(rng) < 0.5 ? -1 : 1) * (0.5 + u(rng));
  const std::vector<std::string> categories = {"cat", "dog", "bird", "horse"};
  for (int i = 0; i < n; ++i) {
    const double y = 16.0 + (spec.height - 32.0) * i / std::max(1, n - 1);
    const double vx = (u(rng) - 0.5) * 2.0;
    const double ux = (vx + spec.camera.pan_x) * (T - 1);
    const double lo = 12 - std::min(0.0, ux), hi = spec.width - 12 - std::max(0.0, ux);
    const double x0 = lo + (hi - lo) * u(rng);
    spec.objects.push_back(
        object(i + 1, categories[i % categories.size()], x0, y, x0 + vx * (T - 1), y, T - 1, 13.0));
  }
  spec.expression.entity = spec.objects[0].category;
  spec.expression.target_ids = {1};
  return spec;
}

Outcome association_criterion() {
  Outcome o;
  // Exact threshold semantics and monotonicity.
  const AssociationParams p;
  o.require(association_accepts(0.6, 50.0, p), "boundary (0.6, 50) rejected");
  o.require(!association_accepts(std::nextafter(0.6, 0.0), 50.0, p), "IoU below 0.6 accepted");
  o.require(!association_accepts(0.6, std::nextafter(50.0, 100.0), p), "dist above 50 accepted");
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> iou(0.0, 1.0), dist(0.0, 120.0);
  for (int i = 0; i < 10000; ++i) {
    const double a = iou(rng), d = dist(rng);
    const bool expect = a >= 0.6 && d <= 50.0;
    o.require(association_accepts(a, d, p) == expect, fmt("wrong verdict at (%g, %g)", a, d));
    if (association_accepts(a, d, p)) {
      const double a2 = a + (1.0 - a) * iou(rng), d2 = d * iou(rng);
      o.require(association_accepts(a2, d2, p), fmt("not monotone from (%g, %g)", a, d));
    }
  }
  // Trajectories on non-crossing scenes reproduce ground truth.
  int scenes = 0;
  for (int i = 0; i < 20; ++i) {
    const SceneSpec spec = non_crossing_scene(rng, i);
    const GeneratedScene g = generate_scene(spec, 100 + i);
    const TrackingResult r = build_trajectories(g.bundle, AssociationParams{});
    o.require(r.tracks.size() == spec.objects.size(),
              fmt("scene %g: %g tracks for %g objects", i, r.tracks.size(), spec.objects.size()));
    std::set<int> seen;
    for (const Trajectory& tr : r.tracks) {
      const auto it = g.truth.track_to_object.find(tr.id);
      o.require(it != g.truth.track_to_object.end(), fmt("scene %g: unmapped track", i));
      if (it == g.truth.track_to_object.end()) continue;
      seen.insert(it->second);
      const auto& boxes = g.truth.object_boxes.at(it->second);
      for (int k : g.bundle.schedule().indices) {
        const auto st = tr.keyframe_states.find(k);
        o.require(st != tr.keyframe_states.end() && boxes[k].has_value() &&
                      box_iou(st->second.box, *boxes[k]) == 1.0,
                  fmt("scene %g track %g keyframe %g differs from ground truth", i, tr.id, k));
      }
    }
    o.require(seen.size() == spec.objects.size(), fmt("scene %g: objects merged", i));
    ++scenes;
  }
  if (o.pass) o.detail = "threshold semantics exact; " + std::to_string(scenes) +
                         " lane scenes match ground truth";
  return o;
}

// --- end-to-end and ablation -------------------------------------------------

struct Suite {
  std::vector<SceneSpec> specs;
  std::vector<GeneratedScene> scenes;
  double generation_seconds = 0.0;
};

const Suite& standard() {
  static const Suite suite = [] {
    Suite s;
    const auto t0 = Clock::now();
    s.specs = standard_suite(50, 1);
    for (std::size_t i = 0; i < s.specs.size(); ++i)
      s.scenes.push_back(generate_scene(s.specs[i], 1000 + i));
    s.generation_seconds = seconds_since(t0);
    return s;
  }();
  return suite;
}

bool has_tag(const SceneSpec& s, const std::string& tag) {
  return std::find(s.tags.begin(), s.tags.end(), tag) != s.tags.end();
}

Outcome end_to_end() {
  Outcome o;
  const Suite& suite = standard();
  int pan = 0, occ = 0, posture = 0, motion = 0;
  for (const SceneSpec& s : suite.specs) {
    pan += has_tag(s, "pan");
    occ += has_tag(s, "occlusion");
    posture += !s.expression.posture_words.empty();
    motion += !s.expression.motion_words.empty() || !s.expression.relation.empty();
    o.require(s.objects.size() >= 2 && s.objects.size() <= 5, s.name + ": object count");
  }
  o.require(suite.specs.size() >= 50, "fewer than 50 scenes");
  o.require(pan >= 25, fmt("only %g pan scenes", pan));
  o.require(occ >= 15, fmt("only %g occlusion scenes", occ));
  o.require(posture > 0 && motion > 0, "suite lacks motion or posture queries");

  PipelineConfig config;
  config.reasoner.offline = true;
  const auto t0 = Clock::now();
  double sum = 0.0;
  for (const GeneratedScene& g : suite.scenes) {
    const RunResult r = run_pipeline(g.bundle, g.query, config);
    sum += evaluate_run(r, g.truth.target).jf_mean;
  }
  const double mean = sum / suite.scenes.size();
  const double total = seconds_since(t0) + suite.generation_seconds;
  o.require(mean >= 0.90, fmt("mean J&F %.4f", mean));
  o.require(total < 120.0, fmt("suite took %.1f s", total));
  if (o.pass)
    o.detail = fmt("%g scenes, mean J&F %.4f, %.1f s", double(suite.scenes.size()), mean, total);
  return o;
}

Outcome ablation_ordering() {
  Outcome o;
  const Suite& suite = standard();
  std::vector<AblationScene> scenes;
  for (std::size_t i = 0; i < suite.scenes.size(); ++i) {
    const GeneratedScene& g = suite.scenes[i];
    scenes.push_back({suite.specs[i].name, g.bundle, g.query, g.truth.target, suite.specs[i].tags});
  }
  const AblationReport rep = run_ablation_suite(scenes, PipelineConfig{});
  const double full = rep.cell("full", "full").mean_jf;
  const double cmr = rep.cell("+CMR", "full").mean_jf;
  const double fpv = rep.cell("+FPV", "full").mean_jf;
  const double base = rep.cell("baseline", "full").mean_jf;
  o.require(full >= cmr && cmr >= base, fmt("full %.3f, +CMR %.3f, baseline %.3f", full, cmr, base));
  o.require(full >= fpv && fpv >= base, fmt("full %.3f, +FPV %.3f, baseline %.3f", full, fpv, base));
  const double pan_gain = rep.cell("full", "+CMM").tag_mean.at("pan") -
                          rep.cell("full", "trajectory-only").tag_mean.at("pan");
  const double occ_gain = rep.cell("full", "+OR").tag_mean.at("occlusion") -
                          rep.cell("full", "trajectory-only").tag_mean.at("occlusion");
  o.require(pan_gain >= 0.10, fmt("+CMM pan gain %.3f", pan_gain));
  o.require(occ_gain >= 0.05, fmt("+OR occlusion gain %.3f", occ_gain));
  if (o.pass) {
    std::ostringstream d;
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "full %.3f, +CMR %.3f, +FPV %.3f, baseline %.3f; pan gain %.3f, occlusion "
                  "gain %.3f",
                  full, cmr, fpv, base, pan_gain, occ_gain);
    o.detail = buf;
  }
  return o;
}

// --- serialization -----------------------------------------------------------

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

SceneSpec golden_scene_spec() {
  SceneSpec spec;
  spec.name = "golden";
  spec.width = 64;
  spec.height = 48;
  spec.frame_count = 31;
  spec.embedding_dim = 8;
  spec.camera.pan_x = 0.5;
  spec.objects.push_back(object(1, "cat", 12, 14, 40, 14, 30, 10.0));
  spec.objects.push_back(object(2, "cat", 40, 34, 16, 34, 30, 10.0));
  spec.objects[0].posture = "sitting";
  spec.objects[1].posture = "standing";
  spec.expression.entity = "cat";
  spec.expression.motion_words = {"moving", "left"};
  spec.expression.target_ids = {2};
  return spec;
}

Trajectory golden_trajectory() {
  Trajectory t;
  t.id = 3;
  t.category = "dog";
  t.birth_frame = 0;
  t.last_frame = 30;
  t.keyframe_states[0].box = {10.0, 20.5, 50.0, 79.5};
  t.keyframe_states[15].box = {12.49, 21.5, 52.5, -0.5};
  t.keyframe_states[30].box = {14.0, 23.0, 55.2, 83.7};
  return t;
}

RunResult golden_run() {
  const GeneratedScene g = generate_scene(golden_scene_spec(), 5);
  PipelineConfig config;
  config.reasoner.offline = true;
  config.seed = 9;
  return run_pipeline(g.bundle, g.query, config);
}

Outcome serialization(const fs::path& golden_dir) {
  Outcome o;
  const std::string traj = serialize_trajectory(golden_trajectory()) + "\n";
  o.require(traj == read_text(golden_dir / "trajectory.txt"), "trajectory text differs from golden");

  const RunResult a = golden_run();
  const RunResult b = golden_run();
  const std::string ra = results_json_text(a), ta = trace_jsonl_text(a);
  o.require(ra == read_text(golden_dir / "results.json"), "results.json differs from golden");
  o.require(ta == read_text(golden_dir / "trace.jsonl"), "trace.jsonl differs from golden");
  o.require(ra == results_json_text(b) && ta == trace_jsonl_text(b), "rerun is not byte-identical");
  if (o.pass) o.detail = "trajectory, results.json, trace.jsonl match golden; rerun identical";
  return o;
}

// --- decomposition -----------------------------------------------------------

Outcome decomposition_round_trip() {
  Outcome o;
  std::mt19937_64 rng(17);
  auto pick = [&](const std::vector<std::string>& v) {
    return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
  };
  const std::vector<std::string> entities = {"cat", "dog", "horse", "bird", "person", "sheep",
                                             "car"};
  const std::vector<std::string> attrs = {"", "black", "white", "small", "red"};
  const std::vector<std::string> postures = {"", "standing", "sitting", "lying"};
  const std::vector<std::vector<std::string>> motions = {
      {}, {"moving", "left"}, {"running", "right"}, {"walking", "up"}, {"stationary"},
      {"moving", "fast"}, {"motionless"}};
  const std::vector<std::string> relations = {"", "by", "near", "next to", "in front of",
                                              "behind"};
  const std::vector<std::string> contexts = {"box", "plate", "bench", "table"};
  int checked = 0;
  for (int i = 0; i < 30; ++i) {
    SceneSpec spec;
    ExpressionTemplate& e = spec.expression;
    e.entity = pick(entities);
    if (const std::string a = pick(attrs); !a.empty()) e.attributes = {a};
    if (const std::string p = pick(postures); !p.empty()) e.posture_words = {p};
    e.motion_words = motions[std::uniform_int_distribution<std::size_t>(0, motions.size() - 1)(rng)];
    e.relation = pick(relations);
    if (!e.relation.empty()) e.context_entity = pick(contexts);
    e.cardinality = 1 + i % 3;
    const auto [text, expected] = scripted_expression(spec);
    const StructuredQuery got = heuristic_decompose(text);
    o.require(got == expected, "\"" + text + "\" parsed as " + render_structured_query(got));
    ++checked;
  }
  if (o.pass) o.detail = std::to_string(checked) + " expressions round-trip exactly";
  return o;
}

// --- pose verifier -----------------------------------------------------------

Outcome pose_properties() {
  Outcome o;
  std::mt19937_64 rng(23);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> scale(0.01, 100.0);
  for (int fixture = 0; fixture < 1000; ++fixture) {
    const int n = 2 + fixture % 4, dim = 4 + fixture % 13;
    const std::string posture = "pose " + std::to_string(fixture);
    std::vector<Trajectory> tracks(n);
    MapEmbeddingBackend plain, scaled;
    std::vector<double> text(dim);
    for (double& v : text) v = normal(rng);
    plain.set(text_embedding_key(posture), text);
    const double ts = scale(rng);
    std::vector<double> text_scaled = text;
    for (double& v : text_scaled) v *= ts;
    scaled.set(text_embedding_key(posture), text_scaled);
    for (int i = 0; i < n; ++i) {
      tracks[i].id = i + 1;
      const double s = scale(rng);
      for (int k : {0, 15, 30, 45}) {
        tracks[i].keyframe_states[k].box = {double(10 * i), double(k), double(10 * i + 8),
                                            double(k + 8)};
        std::vector<double> v(dim);
        for (double& x : v) x = normal(rng);
        plain.set(crop_embedding_key(i + 1, k), v);
        for (double& x : v) x *= s;
        scaled.set(crop_embedding_key(i + 1, k), v);
      }
    }
    std::vector<const Trajectory*> cands;
    for (const auto& t : tracks) cands.push_back(&t);
    const PoseRanking a = rank_by_similarity(cands, posture, kDiscriminativeKeyframes, plain);
    const PoseRanking b = rank_by_similarity(cands, posture, kDiscriminativeKeyframes, scaled);
    o.require(a.ranked_ids.front() == b.ranked_ids.front(),
              fmt("argmax changed under scaling in fixture %g", fixture));
  }
  int rows = 0;
  for (std::size_t n = 1; n <= 5; ++n)
    for (int k = 1; k <= 3; ++k)
      for (const std::string qp : {"", "sitting"}) {
        const bool expect = n > static_cast<std::size_t>(k) && !qp.empty();
        o.require(should_activate(n, k, qp) == expect,
                  fmt("should_activate(%g, %g) wrong", double(n), k));
        ++rows;
      }
  if (o.pass) o.detail = "1000 scaling fixtures, " + std::to_string(rows) + "-row truth table";
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path golden_dir = REFVOS_GOLDEN_DIR;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"metrics_oracle", metrics_oracle},
      {"affine_recovery", affine_recovery},
      {"camera_closed_loop", camera_closed_loop},
      {"association_criterion", association_criterion},
      {"end_to_end_suite", end_to_end},
      {"ablation_ordering", ablation_ordering},
      {"serialization_bit_exact", [&] { return serialization(golden_dir); }},
      {"decomposition_round_trip", decomposition_round_trip},
      {"pose_verifier_properties", pose_properties},
  };
  const std::string only = argc > 1 ? argv[1] : "";
  if (only == "--update-golden") {
    const RunResult r = golden_run();
    std::ofstream(golden_dir / "results.json", std::ios::binary) << results_json_text(r);
    std::ofstream(golden_dir / "trace.jsonl", std::ios::binary) << trace_jsonl_text(r);
    return 0;
  }
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    if (!only.empty() && only != name) continue;
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("threw: ") + e.what();
    }
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
