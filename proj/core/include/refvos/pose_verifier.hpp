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

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "refvos/perception.hpp"
#include "refvos/trajectory.hpp"

namespace refvos {

inline constexpr int kDiscriminativeKeyframes = 3;

// |C'| > K and a posture descriptor is present.
bool should_activate(std::size_t num_candidates, int cardinality,
                     const std::string& posture_query);

struct KeyframeSelection {
  std::vector<int> frames;           // ascending
  std::map<int, double> max_iou;     // score of every common keyframe
  bool fewer_than_requested = false;
};

// Among the keyframes every candidate has a state for, the k with the smallest
// maximum pairwise box IoU (ties to the earlier frame).
KeyframeSelection select_discriminative_keyframes(
    const std::vector<const Trajectory*>& candidates, int k);

// Keys shared with the exporter.
std::string crop_embedding_key(int track_id, int frame);
std::string text_embedding_key(const std::string& posture_query);
// 64-bit FNV-1a as 16 lowercase hex digits.
std::string fnv1a64_hex(const std::string& text);

class EmbeddingBackend {
 public:
  virtual ~EmbeddingBackend() = default;
  // Throws BackendError naming the key when it is absent.
  virtual const std::vector<double>& lookup(const std::string& key) const = 0;
};

// Serves vectors from a bundle's embeddings.json.
class BundleEmbeddingBackend : public EmbeddingBackend {
 public:
  explicit BundleEmbeddingBackend(const PerceptionBundle& bundle) : bundle_(bundle) {}
  const std::vector<double>& lookup(const std::string& key) const override;

 private:
  const PerceptionBundle& bundle_;
};

class MapEmbeddingBackend : public EmbeddingBackend {
 public:
  MapEmbeddingBackend() = default;
  explicit MapEmbeddingBackend(std::map<std::string, std::vector<double>> vectors)
      : vectors_(std::move(vectors)) {}
  void set(const std::string& key, std::vector<double> v) { vectors_[key] = std::move(v); }
  const std::vector<double>& lookup(const std::string& key) const override;

 private:
  std::map<std::string, std::vector<double>> vectors_;
};

// Component-wise mean of the crop embeddings of `track_id` at `frames`.
// Throws InputError for no frames and ShapeError for mixed dimensions.
std::vector<double> aggregate_visual_embedding(int track_id, const std::vector<int>& frames,
                                               const EmbeddingBackend& backend);

// Throws NumericError when either vector has zero norm and ShapeError on a
// dimension mismatch.
double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b);

struct PoseRanking {
  std::vector<int> ranked_ids;
  std::map<int, double> similarity;
  std::vector<int> frames;
  bool fewer_keyframes = false;
};

// Ranks C' by cosine similarity between each aggregated crop embedding and the
// text embedding of the posture query; ties go to the smaller id. When the
// candidates share no keyframe, each uses its own first k keyframes.
PoseRanking rank_by_similarity(const std::vector<const Trajectory*>& candidates,
                               const std::string& posture_query, int k,
                               const EmbeddingBackend& backend);

}  // namespace refvos
