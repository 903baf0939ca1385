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
#include <optional>
#include <string>
#include <vector>

namespace refvos {

struct Point2D {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2D&, const Point2D&) = default;
};

double distance(const Point2D& a, const Point2D& b);

// Axis-aligned box in continuous pixel coordinates, origin top-left. Pixel
// (x, y) covers [x, x+1) x [y, y+1).
struct Box2D {
  double xmin = 0.0;
  double ymin = 0.0;
  double xmax = 0.0;
  double ymax = 0.0;

  double width() const { return xmax - xmin; }
  double height() const { return ymax - ymin; }
  double area() const { return width() * height(); }
  bool valid() const;
  Box2D translated(double dx, double dy) const {
    return {xmin + dx, ymin + dy, xmax + dx, ymax + dy};
  }

  friend bool operator==(const Box2D&, const Box2D&) = default;
};

// Throws InputError when the box violates xmin <= xmax, ymin <= ymax or is not
// finite.
Box2D make_box(double xmin, double ymin, double xmax, double ymax);

double box_iou(const Box2D& a, const Box2D& b);
Point2D box_centroid(const Box2D& b);
Box2D clip_box(const Box2D& b, int width, int height);

// Rounds half away from zero; used wherever continuous coordinates become
// pixel indices.
long round_half_away(double v);

// Binary mask with dense row-major storage. The run-length form (column-major
// counts starting with the zero run) is produced on demand by runs().
class BinaryMask {
 public:
  BinaryMask() = default;
  BinaryMask(int width, int height);

  // Rebuilds a mask from column-major run counts. Throws ShapeError when the
  // counts do not sum to width*height.
  static BinaryMask from_runs(int width, int height,
                              const std::vector<std::uint32_t>& runs);
  static BinaryMask from_box(int width, int height, const Box2D& box);

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return count() == 0; }
  std::size_t count() const;

  bool at(int x, int y) const {
    return pixels_[static_cast<std::size_t>(y) * width_ + x] != 0;
  }
  void set(int x, int y, bool value = true) {
    pixels_[static_cast<std::size_t>(y) * width_ + x] = value ? 1 : 0;
  }
  bool in_bounds(int x, int y) const {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }

  const std::vector<std::uint8_t>& pixels() const { return pixels_; }
  std::vector<std::uint32_t> runs() const;

  // Tight box around set pixels in continuous coordinates
  // ([minx, miny, maxx+1, maxy+1]); nullopt for an empty mask.
  std::optional<Box2D> bounding_box() const;
  Point2D pixel_centroid() const;

  BinaryMask dilated(int radius) const;
  BinaryMask united(const BinaryMask& other) const;
  std::size_t intersection_count(const BinaryMask& other) const;
  std::size_t union_count(const BinaryMask& other) const;

  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> pixels_;
};

double mask_iou(const BinaryMask& a, const BinaryMask& b);
BinaryMask translate_mask(const BinaryMask& m, int dx, int dy);
void require_same_shape(const BinaryMask& a, const BinaryMask& b);

struct MaskSequence {
  std::string video_id;
  std::vector<BinaryMask> frames;

  std::size_t size() const { return frames.size(); }
  static MaskSequence empty_like(std::string video_id, std::size_t frame_count,
                                 int width, int height);
};

}  // namespace refvos
