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

#include <filesystem>
#include <random>
#include <string>

#include "refvos/geometry.hpp"
#include "refvos/perception.hpp"
#include "refvos/simulator.hpp"
#include "refvos/trajectory.hpp"

namespace refvos::testing {

inline BinaryMask mask_from_rows(const std::vector<std::string>& rows) {
  BinaryMask m(static_cast<int>(rows.front().size()), static_cast<int>(rows.size()));
  for (int y = 0; y < m.height(); ++y)
    for (int x = 0; x < m.width(); ++x)
      if (rows[y][x] == '#') m.set(x, y);
  return m;
}

inline DetectionRecord detection(int frame, const std::string& key, const std::string& category,
                                 double score, const Box2D& box, int w = 100, int h = 80) {
  return {frame, key, category, score, box, BinaryMask::from_box(w, h, box)};
}

inline PerceptionBundle empty_bundle(int frames, int w = 100, int h = 80, int interval = 15) {
  PerceptionBundle b;
  b.video.id = "fixture";
  b.video.width = w;
  b.video.height = h;
  b.video.frame_count = frames;
  b.video.keyframe_interval = interval;
  return b;
}

inline ObjectScript scripted_object(int id, const std::string& category, double x0, double y0,
                                    double x1, double y1, int last_frame, double size = 14.0) {
  ObjectScript o;
  o.id = id;
  o.category = category;
  o.width = o.height = size;
  o.color = {60 + 40 * id, 200 - 35 * id, 90 + 25 * id};
  o.waypoints = {{0, x0, y0}, {last_frame, x1, y1}};
  return o;
}

// Unique scratch directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("refvos_test_" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace refvos::testing
