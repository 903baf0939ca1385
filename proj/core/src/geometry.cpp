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

#include "refvos/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "refvos/error.hpp"

namespace refvos {

double distance(const Point2D& a, const Point2D& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

bool Box2D::valid() const {
  return std::isfinite(xmin) && std::isfinite(ymin) && std::isfinite(xmax) &&
         std::isfinite(ymax) && xmin <= xmax && ymin <= ymax;
}

Box2D make_box(double xmin, double ymin, double xmax, double ymax) {
  Box2D b{xmin, ymin, xmax, ymax};
  if (!b.valid()) throw InputError("invalid box");
  return b;
}

double box_iou(const Box2D& a, const Box2D& b) {
  const double iw = std::min(a.xmax, b.xmax) - std::max(a.xmin, b.xmin);
  const double ih = std::min(a.ymax, b.ymax) - std::max(a.ymin, b.ymin);
  const double inter = (iw > 0.0 && ih > 0.0) ? iw * ih : 0.0;
  const double uni = a.area() + b.area() - inter;
  if (uni <= 0.0) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

Point2D box_centroid(const Box2D& b) {
  return {(b.xmin + b.xmax) / 2.0, (b.ymin + b.ymax) / 2.0};
}

Box2D clip_box(const Box2D& b, int width, int height) {
  const double w = width, h = height;
  Box2D c{std::clamp(b.xmin, 0.0, w), std::clamp(b.ymin, 0.0, h),
          std::clamp(b.xmax, 0.0, w), std::clamp(b.ymax, 0.0, h)};
  return c;
}

long round_half_away(double v) { return std::lround(v); }

BinaryMask::BinaryMask(int width, int height)
    : width_(width), height_(height) {
  if (width < 0 || height < 0) throw InputError("negative mask size");
  pixels_.assign(static_cast<std::size_t>(width) * height, 0);
}

BinaryMask BinaryMask::from_runs(int width, int height,
                                 const std::vector<std::uint32_t>& runs) {
  const std::uint64_t total =
      std::accumulate(runs.begin(), runs.end(), std::uint64_t{0});
  if (total != static_cast<std::uint64_t>(width) * height) {
    throw ShapeError("run counts sum to " + std::to_string(total) +
                     ", expected " + std::to_string(width * height));
  }
  BinaryMask m(width, height);
  std::size_t idx = 0;
  bool value = false;
  for (std::uint32_t run : runs) {
    if (value) {
      for (std::uint32_t j = 0; j < run; ++j) {
        const std::size_t k = idx + j;
        const int x = static_cast<int>(k / height);
        const int y = static_cast<int>(k % height);
        m.set(x, y);
      }
    }
    idx += run;
    value = !value;
  }
  return m;
}

BinaryMask BinaryMask::from_box(int width, int height, const Box2D& box) {
  BinaryMask m(width, height);
  const int x0 = std::max(0, static_cast<int>(round_half_away(box.xmin)));
  const int y0 = std::max(0, static_cast<int>(round_half_away(box.ymin)));
  const int x1 = std::min(width, static_cast<int>(round_half_away(box.xmax)));
  const int y1 = std::min(height, static_cast<int>(round_half_away(box.ymax)));
  for (int y = y0; y < y1; ++y)
    for (int x = x0; x < x1; ++x) m.set(x, y);
  return m;
}

std::size_t BinaryMask::count() const {
  return static_cast<std::size_t>(
      std::count(pixels_.begin(), pixels_.end(), std::uint8_t{1}));
}

std::vector<std::uint32_t> BinaryMask::runs() const {
  std::vector<std::uint32_t> counts;
  std::uint32_t c = 0;
  bool prev = false;
  for (int x = 0; x < width_; ++x) {
    for (int y = 0; y < height_; ++y) {
      const bool v = at(x, y);
      if (v != prev) {
        counts.push_back(c);
        c = 0;
        prev = v;
      }
      ++c;
    }
  }
  counts.push_back(c);
  return counts;
}

std::optional<Box2D> BinaryMask::bounding_box() const {
  int minx = width_, miny = height_, maxx = -1, maxy = -1;
  for (int y = 0; y < height_; ++y) {
    for (int x = 0; x < width_; ++x) {
      if (!at(x, y)) continue;
      minx = std::min(minx, x);
      maxx = std::max(maxx, x);
      miny = std::min(miny, y);
      maxy = std::max(maxy, y);
    }
  }
  if (maxx < 0) return std::nullopt;
  return Box2D{double(minx), double(miny), double(maxx + 1), double(maxy + 1)};
}

Point2D BinaryMask::pixel_centroid() const {
  double sx = 0, sy = 0;
  std::size_t n = 0;
  for (int y = 0; y < height_; ++y) {
    for (int x = 0; x < width_; ++x) {
      if (!at(x, y)) continue;
      sx += x + 0.5;
      sy += y + 0.5;
      ++n;
    }
  }
  if (n == 0) return {};
  return {sx / n, sy / n};
}

BinaryMask BinaryMask::dilated(int radius) const {
  if (radius <= 0) return *this;
  // Separable square structuring element: rows then columns.
  BinaryMask horiz(width_, height_);
  for (int y = 0; y < height_; ++y) {
    for (int x = 0; x < width_; ++x) {
      if (!at(x, y)) continue;
      const int lo = std::max(0, x - radius), hi = std::min(width_ - 1, x + radius);
      for (int xx = lo; xx <= hi; ++xx) horiz.set(xx, y);
    }
  }
  BinaryMask out(width_, height_);
  for (int y = 0; y < height_; ++y) {
    for (int x = 0; x < width_; ++x) {
      if (!horiz.at(x, y)) continue;
      const int lo = std::max(0, y - radius), hi = std::min(height_ - 1, y + radius);
      for (int yy = lo; yy <= hi; ++yy) out.set(x, yy);
    }
  }
  return out;
}

void require_same_shape(const BinaryMask& a, const BinaryMask& b) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw ShapeError("mask shape mismatch: " + std::to_string(a.width()) + "x" +
                     std::to_string(a.height()) + " vs " +
                     std::to_string(b.width()) + "x" +
                     std::to_string(b.height()));
  }
}

BinaryMask BinaryMask::united(const BinaryMask& other) const {
  require_same_shape(*this, other);
  BinaryMask out = *this;
  for (std::size_t i = 0; i < pixels_.size(); ++i)
    out.pixels_[i] = pixels_[i] | other.pixels_[i];
  return out;
}

std::size_t BinaryMask::intersection_count(const BinaryMask& other) const {
  require_same_shape(*this, other);
  std::size_t n = 0;
  for (std::size_t i = 0; i < pixels_.size(); ++i)
    n += pixels_[i] & other.pixels_[i];
  return n;
}

std::size_t BinaryMask::union_count(const BinaryMask& other) const {
  require_same_shape(*this, other);
  std::size_t n = 0;
  for (std::size_t i = 0; i < pixels_.size(); ++i)
    n += pixels_[i] | other.pixels_[i];
  return n;
}

double mask_iou(const BinaryMask& a, const BinaryMask& b) {
  require_same_shape(a, b);
  const std::size_t uni = a.union_count(b);
  if (uni == 0) return 1.0;
  return static_cast<double>(a.intersection_count(b)) / static_cast<double>(uni);
}

BinaryMask translate_mask(const BinaryMask& m, int dx, int dy) {
  BinaryMask out(m.width(), m.height());
  for (int y = 0; y < m.height(); ++y) {
    for (int x = 0; x < m.width(); ++x) {
      if (!m.at(x, y)) continue;
      const int nx = x + dx, ny = y + dy;
      if (out.in_bounds(nx, ny)) out.set(nx, ny);
    }
  }
  return out;
}

MaskSequence MaskSequence::empty_like(std::string video_id,
                                      std::size_t frame_count, int width,
                                      int height) {
  MaskSequence seq;
  seq.video_id = std::move(video_id);
  seq.frames.assign(frame_count, BinaryMask(width, height));
  return seq;
}

}  // namespace refvos
