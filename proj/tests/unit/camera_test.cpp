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

#include <algorithm>

#include "fixtures.hpp"
#include "refvos/camera.hpp"
#include "refvos/error.hpp"
#include "refvos/priors.hpp"
#include "refvos/simulator.hpp"

namespace refvos {
namespace {

using testing::scripted_object;

SceneSpec textured_scene(double pan_x) {
  SceneSpec spec;
  spec.frame_count = 16;
  spec.camera.pan_x = pan_x;
  spec.objects = {scripted_object(1, "cat", 60, 60, 60, 60, 15)};
  spec.expression.entity = "cat";
  spec.expression.target_ids = {1};
  return spec;
}

double median(std::vector<double> v) {
  std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
  return v[v.size() / 2];
}

TEST(FeatureTracking, IdenticalFramesHaveZeroFlow) {
  const GeneratedScene g = generate_scene(textured_scene(0.0), 2);
  const Image f = g.bundle.load_frame(0);
  for (const Correspondence& c : track_sparse_features(f, f)) {
    EXPECT_NEAR(c.next.x, c.prev.x, 0.1);
    EXPECT_NEAR(c.next.y, c.prev.y, 0.1);
  }
}

TEST(FeatureTracking, ThreePixelShift) {
  const GeneratedScene g = generate_scene(textured_scene(3.0), 2);
  const auto cs = track_sparse_features(g.bundle.load_frame(0), g.bundle.load_frame(1));
  std::vector<double> dx, dy;
  for (const auto& c : cs) {
    dx.push_back(c.next.x - c.prev.x);
    dy.push_back(c.next.y - c.prev.y);
  }
  EXPECT_NEAR(median(dx), 3.0, 0.2);
  EXPECT_NEAR(median(dy), 0.0, 0.2);
}

TEST(FeatureTracking, FlatImageHasNoFeatures) {
  Image flat(64, 48, 1);
  std::fill(flat.data.begin(), flat.data.end(), 128);
  EXPECT_THROW(track_sparse_features(flat, flat), InsufficientFeaturesError);
  EXPECT_THROW(track_sparse_features(flat, Image(32, 48, 1)), ShapeError);
}

std::vector<Correspondence> grid_correspondences(const AffineTransform& t) {
  std::vector<Correspondence> cs;
  for (int y = 0; y < 5; ++y)
    for (int x = 0; x < 6; ++x) {
      const Point2D p{x * 20.0 + 3, y * 17.0 + 1};
      cs.push_back({p, t.apply(p), 0.0});
    }
  return cs;
}

TEST(EstimateAffine, IdentityAndTranslation) {
  const AffineFit id = estimate_affine(grid_correspondences(AffineTransform::identity()));
  EXPECT_LT(id.transform.max_abs_diff(AffineTransform::identity()), 1e-9);
  const AffineFit tr = estimate_affine(grid_correspondences(AffineTransform::translation(5, -3)));
  EXPECT_NEAR(tr.transform.tx, 5.0, 1e-6);
  EXPECT_NEAR(tr.transform.ty, -3.0, 1e-6);
  EXPECT_EQ(tr.inliers, 30);
}

TEST(EstimateAffine, RejectsOutliers) {
  const AffineTransform truth{1.02, -0.05, 4.0, 0.05, 1.02, -2.0};
  auto cs = grid_correspondences(truth);
  for (std::size_t i = 0; i < cs.size(); i += 5) cs[i].next.x += 25.0;
  const AffineFit fit = estimate_affine(cs);
  EXPECT_LT(fit.transform.max_abs_diff(truth), 1e-3);
  EXPECT_EQ(fit.inliers, 24);
}

TEST(EstimateAffine, DegenerateInputs) {
  std::vector<Correspondence> two = {{{0, 0}, {1, 1}, 0}, {{5, 0}, {6, 1}, 0}};
  EXPECT_THROW(estimate_affine(two), DegenerateError);
  std::vector<Correspondence> line;
  for (int i = 0; i < 10; ++i) line.push_back({{double(i), double(2 * i)}, {i + 1.0, 2.0 * i}, 0});
  EXPECT_THROW(estimate_affine(line), DegenerateError);
}

TEST(AffineTransform, ComposeAndInverse) {
  const AffineTransform a{1.1, 0.1, 3, -0.2, 0.9, 4};
  const AffineTransform i = a.compose(a.inverse());
  EXPECT_LT(i.max_abs_diff(AffineTransform::identity()), 1e-12);
  const Point2D p{7, -2};
  const Point2D twice = a.compose(a).apply(p);
  const Point2D stepwise = a.apply(a.apply(p));
  EXPECT_NEAR(twice.x, stepwise.x, 1e-12);
  EXPECT_NEAR(twice.y, stepwise.y, 1e-12);
}

TEST(CameraModel, StaticSceneIsIdentity) {
  SceneSpec spec = textured_scene(0.0);
  spec.frame_count = 31;
  const GeneratedScene g = generate_scene(spec, 4);
  const CameraMotionModel cam = build_camera_model(g.bundle, g.bundle.schedule());
  for (const auto& [k, t] : cam.cumulative)
    EXPECT_LT(t.max_abs_diff(AffineTransform::identity()), 1e-3) << "keyframe " << k;
}

TEST(CameraModel, PanIntervalTranslation) {
  SceneSpec spec = textured_scene(-2.0);
  spec.frame_count = 31;
  spec.objects[0].waypoints = {{0, 110, 60}, {30, 110, 60}};
  const GeneratedScene g = generate_scene(spec, 4);
  const CameraMotionModel cam = build_camera_model(g.bundle, g.bundle.schedule());
  const Point2D c{80, 60};
  for (const auto& [key, est] : cam.intervals) {
    const Point2D m = est.transform.apply(c);
    EXPECT_NEAR(m.x - c.x, -30.0, 3.0);
    EXPECT_NEAR(m.y - c.y, 0.0, 3.0);
  }
}

TEST(CameraModel, SingleFrameVideo) {
  const CameraMotionModel cam = CameraMotionModel::identity(sample_keyframes(1, 15));
  ASSERT_EQ(cam.cumulative.size(), 1u);
  EXPECT_EQ(cam.cumulative_at(0), AffineTransform::identity());
  EXPECT_THROW(cam.cumulative_at(5), LookupError);
}

TEST(CompensateBox, IdentityAndTranslation) {
  const Box2D b{10, 20, 30, 40};
  EXPECT_EQ(compensate_box(b, AffineTransform::identity()), b);
  EXPECT_EQ(compensate_box(b, AffineTransform::translation(5, -5)), (Box2D{5, 25, 25, 45}));
}

TEST(CompensatedKinematics, MoverAgainstPan) {
  // Object moves +1 px/frame in the world while the camera shifts content by
  // -1 px/frame, so its raw image position stays put.
  SceneSpec spec;
  spec.camera.pan_x = -1.0;
  spec.objects = {scripted_object(1, "cat", 60, 60, 105, 60, 45),
                  scripted_object(2, "dog", 120, 25, 120, 25, 45)};
  spec.expression.entity = "cat";
  spec.expression.target_ids = {1};
  const GeneratedScene g = generate_scene(spec, 6);
  const CameraMotionModel cam = build_camera_model(g.bundle, g.bundle.schedule());
  const TrackingResult r = build_trajectories(g.bundle, AssociationParams{});
  for (const Trajectory& t : r.tracks) {
    const KinematicSummary k = kinematic_summary(t, cam, 200.0);
    if (t.category == "cat") {
      EXPECT_NEAR(k.net_displacement.x / 45.0, 1.0, 0.1);
      EXPECT_EQ(k.direction, "right");
    } else {
      EXPECT_GT(k.stationarity, 0.9);
    }
  }
}

}  // namespace
}  // namespace refvos
