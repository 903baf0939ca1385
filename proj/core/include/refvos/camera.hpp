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
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "refvos/geometry.hpp"
#include "refvos/image.hpp"
#include "refvos/perception.hpp"

namespace refvos {

struct Correspondence {
  Point2D prev;
  Point2D next;
  double residual = 0.0;
};

// x' = a*x + b*y + tx,  y' = c*x + d*y + ty.
struct AffineTransform {
  double a = 1.0, b = 0.0, tx = 0.0;
  double c = 0.0, d = 1.0, ty = 0.0;

  static AffineTransform identity() { return {}; }
  static AffineTransform translation(double dx, double dy) {
    return {1.0, 0.0, dx, 0.0, 1.0, dy};
  }

  Point2D apply(const Point2D& p) const {
    return {a * p.x + b * p.y + tx, c * p.x + d * p.y + ty};
  }
  double determinant() const { return a * d - b * c; }
  bool finite() const;
  // (*this) o other: applies `other` first.
  AffineTransform compose(const AffineTransform& other) const;
  // Throws ModelError when the linear part is singular.
  AffineTransform inverse() const;
  double max_abs_diff(const AffineTransform& o) const;

  friend bool operator==(const AffineTransform&, const AffineTransform&) = default;
};

struct FeatureTrackingParams {
  int grid_step = 12;
  // Mean gradient magnitude floor on the 0..255 intensity scale.
  double gradient_floor = 3.0;
  int window = 21;
  int max_iterations = 30;
  int pyramid_levels = 3;
  double epsilon = 0.01;
  // Minimum eigenvalue of the window structure tensor per pixel.
  double min_eigenvalue = 1.0;
};

// Grid-seeded pyramidal Lucas-Kanade between two frames. Throws ShapeError for
// differing resolutions and InsufficientFeaturesError when fewer than six
// points survive.
std::vector<Correspondence> track_sparse_features(const GrayImage& frame_a,
                                                  const GrayImage& frame_b,
                                                  const FeatureTrackingParams& params = {});
std::vector<Correspondence> track_sparse_features(const Image& frame_a,
                                                  const Image& frame_b,
                                                  const FeatureTrackingParams& params = {});

struct RansacParams {
  int iterations = 200;
  double inlier_px = 2.0;
  std::uint64_t seed = 0;
};

struct AffineFit {
  AffineTransform transform;
  int inliers = 0;
  // Root-mean-square residual over the final inlier set.
  double rms_residual = 0.0;
};

// RANSAC over minimal 3-point samples followed by a least-squares refit on the
// inliers. Throws DegenerateError for < 3 correspondences or when every sample
// is collinear.
AffineFit estimate_affine(std::span<const Correspondence> correspondences,
                          const RansacParams& params = {});

// Least-squares affine on all correspondences; throws DegenerateError when the
// points are collinear.
AffineTransform fit_affine_least_squares(std::span<const Correspondence> correspondences);

struct IntervalEstimate {
  int from = 0;
  int to = 0;
  AffineTransform transform;
  int inliers = 0;
  double rms_residual = 0.0;
  // Per-frame chaining failed and a direct keyframe-to-keyframe fit was used.
  bool direct = false;
  // Both routes failed; transform is identity.
  bool failed = false;
  std::string note;
};

class CameraMotionModel {
 public:
  std::map<std::pair<int, int>, IntervalEstimate> intervals;
  // Maps frame-0 coordinates to keyframe coordinates.
  std::map<int, AffineTransform> cumulative;

  // Identity transforms over the schedule (static camera / disabled prior).
  static CameraMotionModel identity(const KeyframeSchedule& schedule);
  // Composes `intervals` from frame 0; requires intervals between every
  // consecutive keyframe.
  static CameraMotionModel from_intervals(const KeyframeSchedule& schedule,
                                          std::vector<IntervalEstimate> intervals);

  // Throws LookupError when the keyframe is not covered.
  const AffineTransform& cumulative_at(int keyframe) const;
  // One record per interval: from, to, six coefficients, inliers, RMS.
  std::string dump() const;
};

struct CameraParams {
  FeatureTrackingParams features;
  RansacParams ransac;
};

// Chains per-frame affines across each keyframe interval, falling back to a
// direct estimate across the interval and finally to identity (flagged).
CameraMotionModel build_camera_model(const PerceptionBundle& bundle,
                                     const KeyframeSchedule& schedule,
                                     const CameraParams& params = {});

// Maps a box through the inverse of `to_frame0` and re-axis-aligns it.
Box2D compensate_box(const Box2D& box, const AffineTransform& to_frame);

}  // namespace refvos
