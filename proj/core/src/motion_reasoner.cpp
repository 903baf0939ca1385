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

#include "refvos/motion_reasoner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <regex>
#include <set>
#include <sstream>

#include "refvos/error.hpp"
#include "text_util.hpp"

namespace refvos {

std::string serialize_trajectory(const Trajectory& track) {
  std::string out;
  for (const auto& [frame, st] : track.keyframe_states) {
    if (!out.empty()) out += "; ";
    out += "t=" + std::to_string(frame + 1) + ": [" +
           std::to_string(round_half_away(st.box.xmin)) + ", " +
           std::to_string(round_half_away(st.box.ymin)) + ", " +
           std::to_string(round_half_away(st.box.xmax)) + ", " +
           std::to_string(round_half_away(st.box.ymax)) + "]";
  }
  return out;
}

std::string format_trajectory_record(const Trajectory& track) {
  return "track " + std::to_string(track.id) + " " + track.category + " frames " +
         std::to_string(track.birth_frame) + "-" + std::to_string(track.last_frame) + ": " +
         serialize_trajectory(track);
}

std::string describe_camera_interval(const IntervalEstimate& e) {
  const AffineTransform& t = e.transform;
  const double scale = std::sqrt(std::abs(t.determinant()));
  const double rot = std::atan2(t.c, t.a) * 180.0 / std::numbers::pi;
  char buf[160];
  std::snprintf(buf, sizeof buf, "camera t=%d..%d: dx=%.2f, dy=%.2f, scale=%.3f, rot=%.2fdeg",
                e.from + 1, e.to + 1, t.tx, t.ty, scale, rot + 0.0);
  return buf;
}

std::string build_motion_prompt(const std::vector<const Trajectory*>& candidates,
                                const std::string& motion_query, const MotionContext& context,
                                int cardinality) {
  if (candidates.empty()) throw InputError("motion prompt needs at least one candidate");
  if (detail::trim(motion_query).empty()) throw InputError("empty motion query");
  std::ostringstream p;
  p << "You are a spatio-temporal reasoner for referring video object segmentation.\n"
    << "Motion query: \"" << motion_query << "\"\n"
    << "Expected number of targets: " << cardinality << "\n\n"
    << "Candidate trajectories (boxes are [xmin, ymin, xmax, ymax] in pixels, t is the "
       "1-based frame number):\n";
  for (const Trajectory* t : candidates)
    p << "id " << t->id << ": " << serialize_trajectory(*t) << "\n";

  p << "\nCamera motion (apparent image motion of the static scene per interval):\n";
  if (context.camera == nullptr) {
    p << "not provided\n";
  } else if (context.camera->intervals.empty()) {
    p << "single frame, no camera motion\n";
  } else {
    for (const auto& [key, e] : context.camera->intervals)
      p << describe_camera_interval(e) << "\n";
  }

  p << "\nOcclusion relationships (the object covering more pixels is in front):\n";
  if (context.occlusions == nullptr) {
    p << "not provided\n";
  } else {
    std::set<int> ids;
    for (const Trajectory* t : candidates) ids.insert(t->id);
    bool any = false;
    for (const auto& ev : *context.occlusions) {
      if (!ids.count(ev.front_id) && !ids.count(ev.back_id)) continue;
      p << "t=" << ev.frame + 1 << ": id " << ev.front_id << " in front of id " << ev.back_id
        << "\n";
      any = true;
    }
    if (!any) p << "none observed\n";
  }

  p << "\nReason strictly in five steps:\n"
    << "1. Remove the camera motion from every trajectory to recover each object's "
       "intrinsic movement.\n"
    << "2. Summarise each candidate's intrinsic movement: direction, speed, and whether "
       "it stays still.\n"
    << "3. Use the occlusion relationships to decide which objects are in front of or "
       "behind others.\n"
    << "4. Compare every candidate against the motion query.\n"
    << "5. Rank the candidates from most to least consistent with the query.\n\n"
    << "Answer with exactly two lines:\n"
    << "RANKING: <comma-separated candidate ids, best match first>\n"
    << "AMBIGUOUS: <yes if more than " << cardinality
    << " candidates match equally well, otherwise no>\n";
  return p.str();
}

MotionVerdict parse_motion_response(const std::string& text,
                                    const std::vector<int>& candidate_ids, int cardinality) {
  (void)cardinality;
  static const std::regex amb_re(R"(ambiguous\s*[:=]?\s*\**\s*(yes|no|true|false))",
                                 std::regex::icase);
  static const std::regex key_re(R"((ranking|ranked|target|answer)[^:=\n]*[:=])",
                                 std::regex::icase);
  static const std::regex int_re(R"(\d+)");

  MotionVerdict v;
  v.rationale = text;
  std::smatch m;
  std::string ids_text = text;
  if (std::regex_search(text, m, amb_re)) {
    const std::string flag = detail::to_lower(m[1].str());
    v.ambiguous = flag == "yes" || flag == "true";
  }
  if (std::regex_search(text, m, key_re)) {
    std::string rest = m.suffix().str();
    const std::string lower = detail::to_lower(rest);
    std::size_t cut = std::min(lower.find('\n'), lower.find("ambiguous"));
    if (cut != std::string::npos) rest = rest.substr(0, cut);
    ids_text = rest;
  } else {
    const std::string lower = detail::to_lower(text);
    if (auto pos = lower.find("ambiguous"); pos != std::string::npos)
      ids_text = text.substr(0, pos);
  }

  const std::set<int> valid(candidate_ids.begin(), candidate_ids.end());
  std::set<int> seen;
  for (auto it = std::sregex_iterator(ids_text.begin(), ids_text.end(), int_re);
       it != std::sregex_iterator(); ++it) {
    const std::string digits = it->str();
    if (digits.size() > 9) continue;
    const int id = std::stoi(digits);
    if (valid.count(id) && seen.insert(id).second) v.ranked_ids.push_back(id);
  }
  if (v.ranked_ids.empty()) throw ParseError("no valid candidate id in motion response");
  return v;
}

namespace {

const std::set<std::string> kStationaryWords = {"stationary", "motionless", "still",
                                                "static", "stopped", "parked"};
const std::set<std::string> kMotionVerbs = {"moving", "move", "moves", "walking", "walk",
                                            "walks", "running", "run", "runs", "riding",
                                            "ride", "rides", "jumping", "flying", "swimming",
                                            "turning", "driving"};

CameraMotionModel identity_cover(const std::vector<const Trajectory*>& candidates) {
  CameraMotionModel cam;
  for (const Trajectory* t : candidates)
    for (const auto& [k, st] : t->keyframe_states) cam.cumulative[k] = AffineTransform::identity();
  return cam;
}

}  // namespace

MotionVerdict fallback_motion_reason(const std::vector<const Trajectory*>& candidates,
                                     const std::string& motion_query,
                                     const MotionContext& context, int cardinality,
                                     FallbackScores* scores_out) {
  if (candidates.empty()) throw InputError("fallback reasoner needs candidates");
  const std::vector<std::string> toks = detail::words(motion_query);
  auto has = [&](const std::string& w) {
    return std::find(toks.begin(), toks.end(), w) != toks.end();
  };
  auto has_any = [&](const std::set<std::string>& set) {
    return std::any_of(toks.begin(), toks.end(), [&](const auto& w) { return set.count(w); });
  };
  bool not_moving = false;
  for (std::size_t i = 0; i + 1 < toks.size(); ++i)
    if (toks[i] == "not" && kMotionVerbs.count(toks[i + 1])) not_moving = true;

  const bool want_still = has_any(kStationaryWords) || not_moving;
  const bool want_motion = !want_still && has_any(kMotionVerbs);
  Point2D dir{0, 0};
  if (has("left")) dir.x -= 1;
  if (has("right")) dir.x += 1;
  if (has("up")) dir.y -= 1;
  if (has("down")) dir.y += 1;
  const bool want_dir = std::hypot(dir.x, dir.y) > 0;
  bool want_front = false, want_behind = has("behind");
  for (std::size_t i = 0; i + 1 < toks.size(); ++i)
    if (toks[i] == "in" && toks[i + 1] == "front") want_front = true;
  const bool have_occlusions = context.occlusions != nullptr;
  const bool want_fast = has("fast") || has("quickly") || has("faster") || has("fastest");
  const bool want_slow = has("slow") || has("slowly") || has("slower") || has("slowest");

  const CameraMotionModel fallback_cam = identity_cover(candidates);
  const CameraMotionModel& cam = context.camera ? *context.camera : fallback_cam;
  double diag = context.image_diagonal;
  if (diag <= 0.0) diag = 100.0;

  std::vector<KinematicSummary> kin;
  for (const Trajectory* t : candidates) kin.push_back(kinematic_summary(*t, cam, diag));

  std::map<int, int> front_count, back_count;
  if (have_occlusions) {
    for (const auto& ev : *context.occlusions) {
      ++front_count[ev.front_id];
      ++back_count[ev.back_id];
    }
  }
  int max_front = 0, max_back = 0;
  for (const Trajectory* t : candidates) {
    max_front = std::max(max_front, front_count[t->id]);
    max_back = std::max(max_back, back_count[t->id]);
  }

  // Speed rank in [0,1] with tied speeds sharing their average rank.
  const std::size_t n = candidates.size();
  std::vector<double> speed_rank(n, 1.0);
  if (n > 1) {
    for (std::size_t i = 0; i < n; ++i) {
      double below = 0, equal = 0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        if (kin[j].mean_speed < kin[i].mean_speed - 1e-9) below += 1;
        else if (std::abs(kin[j].mean_speed - kin[i].mean_speed) <= 1e-9) equal += 1;
      }
      speed_rank[i] = (below + equal / 2.0) / double(n - 1);
    }
  }

  FallbackScores scores;
  if (want_still) scores.terms.push_back("stationary");
  if (want_motion) scores.terms.push_back("moving");
  if (want_dir) scores.terms.push_back("direction");
  if (want_front && have_occlusions) scores.terms.push_back("in-front");
  if (want_behind && have_occlusions) scores.terms.push_back("behind");
  if (want_fast) scores.terms.push_back("fast");
  if (want_slow) scores.terms.push_back("slow");

  const double dnorm = std::hypot(dir.x, dir.y);
  for (std::size_t i = 0; i < n; ++i) {
    const KinematicSummary& k = kin[i];
    const int id = candidates[i]->id;
    std::vector<double> terms;
    if (want_still) terms.push_back(k.stationarity);
    if (want_motion) terms.push_back(1.0 - k.stationarity);
    if (want_dir) {
      const double len = std::hypot(k.net_displacement.x, k.net_displacement.y);
      // Sub-pixel displacement carries no direction.
      terms.push_back(len < 1.0 ? 0.0
                                : (k.net_displacement.x * dir.x + k.net_displacement.y * dir.y) /
                                      (len * dnorm));
    }
    if (want_front && have_occlusions)
      terms.push_back(max_front > 0 ? double(front_count[id]) / max_front : 0.0);
    if (want_behind && have_occlusions)
      terms.push_back(max_back > 0 ? double(back_count[id]) / max_back : 0.0);
    if (want_fast) terms.push_back(speed_rank[i]);
    if (want_slow) terms.push_back(1.0 - speed_rank[i]);
    double s = 0.0;
    for (double t : terms) s += t;
    scores.composite[id] = terms.empty() ? 0.0 : s / terms.size();
  }

  MotionVerdict v;
  for (const Trajectory* t : candidates) v.ranked_ids.push_back(t->id);
  std::sort(v.ranked_ids.begin(), v.ranked_ids.end(), [&](int a, int b) {
    const double sa = scores.composite[a], sb = scores.composite[b];
    if (sa != sb) return sa > sb;
    return a < b;
  });
  const std::size_t k = static_cast<std::size_t>(std::max(1, cardinality));
  if (v.ranked_ids.size() > k) {
    const double gap = scores.composite[v.ranked_ids[k - 1]] - scores.composite[v.ranked_ids[k]];
    v.ambiguous = gap < 0.1;
  }
  std::ostringstream why;
  why << "fallback terms:";
  for (const auto& t : scores.terms) why << " " << t;
  why << "; scores:";
  for (int id : v.ranked_ids) {
    char buf[48];
    std::snprintf(buf, sizeof buf, " %d=%.4f", id, scores.composite[id]);
    why << buf;
  }
  v.rationale = why.str();
  if (scores_out) *scores_out = std::move(scores);
  return v;
}

CoarseFilterResult coarse_filter(const std::vector<const Trajectory*>& candidates,
                                 const std::string& motion_query,
                                 const MotionContext& context, int cardinality,
                                 const ReasonerConfig& config, ChatEndpoint* endpoint) {
  CoarseFilterResult r;
  std::vector<int> ids;
  for (const Trajectory* t : candidates) ids.push_back(t->id);
  if (candidates.empty()) return r;
  if (detail::trim(motion_query).empty()) {
    r.kept_ids = ids;
    r.verdict.ranked_ids = ids;
    return r;
  }
  r.reasoned = true;
  r.prompt = build_motion_prompt(candidates, motion_query, context, cardinality);

  bool have_verdict = false;
  if (!config.offline && endpoint != nullptr && candidates.size() > 1) {
    for (int a = 0; a < std::max(1, config.retry_budget); ++a) {
      ++r.endpoint_attempts;
      try {
        std::string raw = endpoint->complete(r.prompt);
        r.raw_responses.push_back(raw);
        r.verdict = parse_motion_response(raw, ids, cardinality);
        have_verdict = true;
        break;
      } catch (const Error& e) {
        r.errors.emplace_back(e.what());
      }
    }
  }
  if (!have_verdict) {
    r.used_fallback = true;
    r.verdict = fallback_motion_reason(candidates, motion_query, context, cardinality);
  }

  // Candidates the model left out keep their relative order at the tail.
  std::vector<int> ranking = r.verdict.ranked_ids;
  for (int id : ids)
    if (std::find(ranking.begin(), ranking.end(), id) == ranking.end()) ranking.push_back(id);

  const int k = std::max(1, cardinality);
  const std::size_t keep = std::min<std::size_t>(
      static_cast<std::size_t>(r.verdict.ambiguous ? k + 2 : k), ranking.size());
  r.kept_ids.assign(ranking.begin(), ranking.begin() + static_cast<long>(keep));
  return r;
}

}  // namespace refvos
