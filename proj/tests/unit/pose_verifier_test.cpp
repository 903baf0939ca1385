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

#include <gtest/gtest.h>

#include "refvos/error.hpp"
#include "refvos/pose_verifier.hpp"

namespace refvos {
namespace {

TEST(ShouldActivate, Examples) {
  EXPECT_TRUE(should_activate(3, 1, "standing"));
  EXPECT_FALSE(should_activate(1, 1, "standing"));
  EXPECT_FALSE(should_activate(3, 1, ""));
  EXPECT_FALSE(should_activate(2, 2, "sitting"));
}

Trajectory boxes(int id, const std::map<int, Box2D>& states) {
  Trajectory t;
  t.id = id;
  for (const auto& [k, b] : states) t.keyframe_states[k] = {b, BinaryMask(), 0.9, std::nullopt};
  return t;
}

TEST(DiscriminativeKeyframes, SeparatedCandidatesTakeEarliest) {
  std::map<int, Box2D> a, b;
  for (int k = 0; k <= 60; k += 15) {
    a[k] = {0, 0, 10, 10};
    b[k] = {50, 50, 60, 60};
  }
  const Trajectory ta = boxes(1, a), tb = boxes(2, b);
  const KeyframeSelection s = select_discriminative_keyframes({&ta, &tb}, 3);
  EXPECT_EQ(s.frames, (std::vector<int>{0, 15, 30}));
  EXPECT_FALSE(s.fewer_than_requested);
}

TEST(DiscriminativeKeyframes, CoincidentFrameExcluded) {
  std::map<int, Box2D> a, b;
  for (int k = 0; k <= 45; k += 15) {
    a[k] = {0, 0, 10, 10};
    b[k] = k == 15 ? Box2D{0, 0, 10, 10} : Box2D{50, 50, 60, 60};
  }
  const Trajectory ta = boxes(1, a), tb = boxes(2, b);
  const KeyframeSelection s = select_discriminative_keyframes({&ta, &tb}, 3);
  EXPECT_EQ(s.frames, (std::vector<int>{0, 30, 45}));
  EXPECT_DOUBLE_EQ(s.max_iou.at(15), 1.0);
}

TEST(DiscriminativeKeyframes, FewerCommonFramesFlagged) {
  const Trajectory ta = boxes(1, {{0, {0, 0, 5, 5}}, {15, {0, 0, 5, 5}}});
  const Trajectory tb = boxes(2, {{15, {9, 9, 12, 12}}, {30, {9, 9, 12, 12}}});
  const KeyframeSelection s = select_discriminative_keyframes({&ta, &tb}, 3);
  EXPECT_EQ(s.frames, std::vector<int>{15});
  EXPECT_TRUE(s.fewer_than_requested);
}

TEST(EmbeddingKeys, Format) {
  EXPECT_EQ(fnv1a64_hex(""), "cbf29ce484222325");
  EXPECT_EQ(fnv1a64_hex("a"), "af63dc4c8601ec8c");
  EXPECT_EQ(crop_embedding_key(4, 15), "crop/4/15");
  EXPECT_EQ(text_embedding_key("  sitting "), "text/" + fnv1a64_hex("sitting"));
}

TEST(Aggregate, MeanOfCrops) {
  MapEmbeddingBackend be;
  be.set(crop_embedding_key(1, 0), {1.0, 0.0});
  be.set(crop_embedding_key(1, 15), {0.0, 1.0});
  EXPECT_EQ(aggregate_visual_embedding(1, {0, 15}, be), (std::vector<double>{0.5, 0.5}));
  EXPECT_THROW(aggregate_visual_embedding(1, {}, be), InputError);
  EXPECT_THROW(aggregate_visual_embedding(1, {30}, be), BackendError);
  be.set(crop_embedding_key(1, 30), {1.0, 0.0, 0.0});
  EXPECT_THROW(aggregate_visual_embedding(1, {0, 30}, be), ShapeError);
}

TEST(Cosine, ValuesAndErrors) {
  EXPECT_DOUBLE_EQ(cosine_similarity({1, 0}, {0, 2}), 0.0);
  EXPECT_DOUBLE_EQ(cosine_similarity({1, 1}, {3, 3}), 1.0);
  EXPECT_THROW(cosine_similarity({0, 0}, {1, 0}), NumericError);
  EXPECT_THROW(cosine_similarity({1, 0}, {1, 0, 0}), ShapeError);
}

TEST(RankBySimilarity, PicksClosestAndBreaksTiesBySmallerId) {
  MapEmbeddingBackend be;
  be.set(text_embedding_key("lying"), {1.0, 0.0});
  std::vector<Trajectory> ts;
  const std::vector<std::vector<double>> crops = {{0.0, 1.0}, {1.0, 0.2}, {1.0, 0.2}};
  for (int i = 0; i < 3; ++i) {
    ts.push_back(boxes(i + 1, {{0, {10.0 * i, 0, 10.0 * i + 5, 5}},
                               {15, {10.0 * i, 0, 10.0 * i + 5, 5}}}));
    for (int k : {0, 15}) be.set(crop_embedding_key(i + 1, k), crops[i]);
  }
  const PoseRanking r = rank_by_similarity({&ts[2], &ts[1], &ts[0]}, "lying", 3, be);
  EXPECT_EQ(r.ranked_ids, (std::vector<int>{2, 3, 1}));
  EXPECT_TRUE(r.fewer_keyframes);
  EXPECT_EQ(r.frames, (std::vector<int>{0, 15}));
}

TEST(BundleBackend, MissingKeyNamesIt) {
  PerceptionBundle b;
  b.embeddings["text/x"] = {1.0};
  const BundleEmbeddingBackend be(b);
  EXPECT_EQ(be.lookup("text/x"), std::vector<double>{1.0});
  try {
    be.lookup("crop/9/0");
    FAIL();
  } catch (const BackendError& e) {
    EXPECT_NE(std::string(e.what()).find("crop/9/0"), std::string::npos);
  }
}

}  // namespace
}  // namespace refvos
