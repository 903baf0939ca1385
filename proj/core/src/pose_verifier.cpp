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

#include "refvos/pose_verifier.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <set>

#include "refvos/error.hpp"
#include "text_util.hpp"

namespace refvos {

bool should_activate(std::size_t num_candidates, int cardinality,
                     const std::string& posture_query) {
  return num_candidates > static_cast<std::size_t>(std::max(cardinality, 0)) &&
         !detail::trim(posture_query).empty();
}

KeyframeSelection select_discriminative_keyframes(
    const std::vector<const Trajectory*>& candidates, int k) {
  if (k < 1) throw InputError("k must be at least 1");
  KeyframeSelection sel;
  if (candidates.empty()) return sel;
  std::set<int> common;
  for (const auto& [f, st] : candidates.front()->keyframe_states) common.insert(f);
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    std::set<int> next;
    for (int f : common)
      if (candidates[i]->keyframe_states.count(f)) next.insert(f);
    common.swap(next);
  }
  std::vector<std::pair<double, int>> scored;
  for (int f : common) {
    double worst = 0.0;
    for (std::size_t i = 0; i < candidates.size(); ++i)
      for (std::size_t j = i + 1; j < candidates.size(); ++j)
        worst = std::max(worst, box_iou(candidates[i]->keyframe_states.at(f).box,
                                        candidates[j]->keyframe_states.at(f).box));
    sel.max_iou[f] = worst;
    scored.emplace_back(worst, f);
  }
  std::sort(scored.begin(), scored.end());
  const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(k), scored.size());
  sel.fewer_than_requested = take < static_cast<std::size_t>(k);
  for (std::size_t i = 0; i < take; ++i) sel.frames.push_back(scored[i].second);
  std::sort(sel.frames.begin(), sel.frames.end());
  return sel;
}

std::string fnv1a64_hex(const std::string& text) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string crop_embedding_key(int track_id, int frame) {
  return "crop/" + std::to_string(track_id) + "/" + std::to_string(frame);
}

std::string text_embedding_key(const std::string& posture_query) {
  return "text/" + fnv1a64_hex(detail::trim(posture_query));
}

const std::vector<double>& BundleEmbeddingBackend::lookup(const std::string& key) const {
  auto it = bundle_.embeddings.find(key);
  if (it == bundle_.embeddings.end()) throw BackendError("missing embedding '" + key + "'");
  return it->second;
}

const std::vector<double>& MapEmbeddingBackend::lookup(const std::string& key) const {
  auto it = vectors_.find(key);
  if (it == vectors_.end()) throw BackendError("missing embedding '" + key + "'");
  return it->second;
}

std::vector<double> aggregate_visual_embedding(int track_id, const std::vector<int>& frames,
                                               const EmbeddingBackend& backend) {
  if (frames.empty()) throw InputError("no frames to aggregate for track " +
                                       std::to_string(track_id));
  std::vector<double> sum;
  for (int f : frames) {
    const std::vector<double>& v = backend.lookup(crop_embedding_key(track_id, f));
    if (sum.empty()) sum.assign(v.size(), 0.0);
    if (v.size() != sum.size()) throw ShapeError("embedding dimensions differ");
    for (std::size_t i = 0; i < v.size(); ++i) sum[i] += v[i];
  }
  for (double& x : sum) x /= static_cast<double>(frames.size());
  return sum;
}

double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw ShapeError("embedding dimensions differ");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) throw NumericError("zero-norm embedding");
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

PoseRanking rank_by_similarity(const std::vector<const Trajectory*>& candidates,
                               const std::string& posture_query, int k,
                               const EmbeddingBackend& backend) {
  PoseRanking r;
  if (candidates.empty()) return r;
  const std::vector<double>& text = backend.lookup(text_embedding_key(posture_query));
  const KeyframeSelection sel = select_discriminative_keyframes(candidates, k);
  r.frames = sel.frames;
  r.fewer_keyframes = sel.fewer_than_requested;
  for (const Trajectory* t : candidates) {
    std::vector<int> frames = sel.frames;
    if (frames.empty()) {
      for (const auto& [f, st] : t->keyframe_states) {
        if (static_cast<int>(frames.size()) == k) break;
        frames.push_back(f);
      }
    }
    r.similarity[t->id] = cosine_similarity(aggregate_visual_embedding(t->id, frames, backend),
                                            text);
    r.ranked_ids.push_back(t->id);
  }
  std::sort(r.ranked_ids.begin(), r.ranked_ids.end(), [&](int a, int b) {
    if (r.similarity[a] != r.similarity[b]) return r.similarity[a] > r.similarity[b];
    return a < b;
  });
  return r;
}

}  // namespace refvos
