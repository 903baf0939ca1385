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

#include <fstream>

#include <nlohmann/json.hpp>

#include "fixtures.hpp"
#include "refvos/error.hpp"
#include "refvos/perception.hpp"

namespace refvos {
namespace {

using testing::detection;
using testing::empty_bundle;
using testing::TempDir;

TEST(Keyframes, IntervalAndLastFrame) {
  EXPECT_EQ(sample_keyframes(1, 15).indices, std::vector<int>{0});
  EXPECT_EQ(sample_keyframes(31, 15).indices, (std::vector<int>{0, 15, 30}));
  EXPECT_EQ(sample_keyframes(40, 15).indices, (std::vector<int>{0, 15, 30, 39}));
  EXPECT_TRUE(sample_keyframes(40, 15).contains(39));
  EXPECT_FALSE(sample_keyframes(40, 15).contains(16));
  EXPECT_THROW(sample_keyframes(10, 0), InputError);
}

TEST(FinalizeBundle, DropsLowScoreDetections) {
  PerceptionBundle b = empty_bundle(16);
  b.detections.push_back(detection(0, "a", "cat", 0.25, {0, 0, 10, 10}));
  b.detections.push_back(detection(0, "b", "cat", 0.3, {50, 50, 60, 60}));
  const PerceptionBundle f = finalize_bundle(b);
  ASSERT_EQ(f.detections.size(), 1u);
  EXPECT_EQ(f.detections[0].instance_key, "b");
}

TEST(FinalizeBundle, SuppressesOverlappingSameCategory) {
  PerceptionBundle b = empty_bundle(16);
  // IoU of these boxes is 0.6.
  b.detections.push_back(detection(0, "low", "cat", 0.8, {0, 0, 10, 10}));
  b.detections.push_back(detection(0, "high", "cat", 0.9, {2.5, 0, 12.5, 10}));
  b.detections.push_back(detection(0, "other", "dog", 0.5, {2.5, 0, 12.5, 10}));
  const PerceptionBundle f = finalize_bundle(b);
  ASSERT_EQ(f.detections.size(), 2u);
  EXPECT_EQ(f.find_detection(0, "high")->score, 0.9);
  EXPECT_EQ(f.find_detection(0, "low"), nullptr);
  EXPECT_NE(f.find_detection(0, "other"), nullptr);
}

TEST(FinalizeBundle, EmptyDetectionsAreValid) {
  const PerceptionBundle f = finalize_bundle(empty_bundle(5));
  EXPECT_TRUE(f.detections.empty());
  EXPECT_TRUE(f.detections_at(0).empty());
}

TEST(FinalizeBundle, ValidationNamesTheField) {
  PerceptionBundle b = empty_bundle(16);
  b.detections.push_back(detection(3, "a", "cat", 0.9, {0, 0, 10, 10}));
  try {
    finalize_bundle(b);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.field_path(), "detections[0].frame_index");
  }
  b.detections[0].frame_index = 0;
  b.detections[0].score = 1.5;
  EXPECT_THROW(finalize_bundle(b), ValidationError);
}

TEST(Propagate, StaticBoxHorizonThree) {
  PerceptionBundle b = empty_bundle(16);
  b.detections.push_back(detection(0, "a", "cat", 0.9, {10, 10, 20, 20}));
  const auto out = propagate_forward(finalize_bundle(b), 0, "a", 3);
  ASSERT_EQ(out.size(), 3u);
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(out[i].frame, i + 1);
    EXPECT_EQ(out[i].box, (Box2D{10, 10, 20, 20}));
  }
}

TEST(Propagate, ConstantVelocity) {
  PerceptionBundle b = empty_bundle(16);
  b.detections.push_back(detection(0, "a", "cat", 0.9, {10, 10, 20, 20}));
  const auto out = propagate_forward(finalize_bundle(b), 0, "a", 2, {10.0, 0.0});
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].box, (Box2D{20, 10, 30, 20}));
  EXPECT_EQ(out[1].box, (Box2D{30, 10, 40, 20}));
  EXPECT_EQ(out[1].mask.bounding_box(), (Box2D{30, 10, 40, 20}));
}

TEST(Propagate, ExplicitEntriesPassThrough) {
  PerceptionBundle b = empty_bundle(16);
  b.detections.push_back(detection(0, "a", "cat", 0.9, {10, 10, 20, 20}));
  const Box2D moved{40, 40, 52, 50};
  b.propagations[{0, "a", 1}] = {moved, BinaryMask::from_box(100, 80, moved)};
  const auto out = propagate_forward(finalize_bundle(b), 0, "a", 1, {100.0, 0.0});
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].box, moved);
}

TEST(Propagate, UnknownInstanceThrows) {
  const PerceptionBundle b = finalize_bundle(empty_bundle(16));
  EXPECT_THROW(propagate_forward(b, 0, "ghost", 2), LookupError);
}

TEST(BundleIo, SaveLoadRoundTrip) {
  TempDir dir;
  PerceptionBundle b = empty_bundle(16);
  b.detections.push_back(detection(0, "a", "cat", 0.9, {10, 10, 20, 20}));
  b.detections.push_back(detection(15, "b", "dog", 0.7, {30, 12, 44, 31}));
  b.propagations[{0, "a", 3}] = {{11, 10, 21, 20}, BinaryMask::from_box(100, 80, {11, 10, 21, 20})};
  b.embeddings["text/abc"] = {0.6, 0.8};
  b = finalize_bundle(b);
  save_bundle(b, dir.path());
  const PerceptionBundle r = load_bundle(dir.path());
  EXPECT_EQ(r.video.id, "fixture");
  EXPECT_EQ(r.video.frame_count, 16);
  ASSERT_EQ(r.detections.size(), 2u);
  EXPECT_EQ(r.detections[1].box, b.detections[1].box);
  EXPECT_EQ(r.detections[1].mask, b.detections[1].mask);
  EXPECT_EQ(r.find_propagation(0, "a", 3)->box, (Box2D{11, 10, 21, 20}));
  EXPECT_EQ(r.embeddings.at("text/abc"), (std::vector<double>{0.6, 0.8}));
}

TEST(BundleIo, LoadFiltersLowScoreFromFile) {
  TempDir dir;
  PerceptionBundle b = empty_bundle(16);
  b.detections.push_back(detection(0, "a", "cat", 0.9, {10, 10, 20, 20}));
  save_bundle(finalize_bundle(b), dir.path());
  // Inject a sub-threshold detection directly into the file.
  nlohmann::json dets;
  std::ifstream(dir.path() / "detections.json") >> dets;
  nlohmann::json weak = dets[0];
  weak["instance_key"] = "weak";
  weak["score"] = 0.25;
  dets.push_back(weak);
  std::ofstream(dir.path() / "detections.json") << dets.dump();
  const PerceptionBundle r = load_bundle(dir.path());
  EXPECT_EQ(r.detections.size(), 1u);
  EXPECT_EQ(r.find_detection(0, "weak"), nullptr);
}

TEST(BundleIo, MissingDirectoryAndSchemaErrors) {
  EXPECT_THROW(load_bundle("/nonexistent/refvos/bundle"), IoError);
  TempDir dir;
  std::ofstream(dir.path() / "video.json") << R"({"id": "v", "width": 10})";
  EXPECT_THROW(load_bundle(dir.path()), ValidationError);
}

TEST(FrameFileName, ZeroPadded) { EXPECT_EQ(frame_file_name(7), "000007.png"); }

}  // namespace
}  // namespace refvos
