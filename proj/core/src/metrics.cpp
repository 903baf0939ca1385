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

#include "refvos/metrics.hpp"

#include <cmath>
#include <cstdio>

#include "refvos/error.hpp"

namespace refvos {

namespace {

void require_same_sequence(const MaskSequence& pred, const MaskSequence& gt) {
  if (pred.size() != gt.size()) {
    throw ShapeError("sequence length mismatch: " + std::to_string(pred.size()) +
                     " vs " + std::to_string(gt.size()));
  }
  for (std::size_t t = 0; t < pred.size(); ++t)
    require_same_shape(pred.frames[t], gt.frames[t]);
}

// Fraction of set pixels in `from` that have a set pixel of `to` within the
// disk of `radius`.
double matched_fraction(const BinaryMask& from, const BinaryMask& to, int radius) {
  std::size_t total = 0, hit = 0;
  const int r2 = radius * radius;
  for (int y = 0; y < from.height(); ++y) {
    for (int x = 0; x < from.width(); ++x) {
      if (!from.at(x, y)) continue;
      ++total;
      bool found = false;
      for (int dy = -radius; dy <= radius && !found; ++dy) {
        for (int dx = -radius; dx <= radius; ++dx) {
          if (dx * dx + dy * dy > r2) continue;
          const int nx = x + dx, ny = y + dy;
          if (to.in_bounds(nx, ny) && to.at(nx, ny)) {
            found = true;
            break;
          }
        }
      }
      hit += found;
    }
  }
  return total == 0 ? 0.0 : static_cast<double>(hit) / static_cast<double>(total);
}

}  // namespace

int default_boundary_radius(int width, int height) {
  const double diag = std::hypot(double(width), double(height));
  return static_cast<int>(std::ceil(0.008 * diag));
}

BinaryMask boundary_pixels(const BinaryMask& m) {
  BinaryMask b(m.width(), m.height());
  for (int y = 0; y < m.height(); ++y) {
    for (int x = 0; x < m.width(); ++x) {
      if (!m.at(x, y)) continue;
      const bool border =
          x == 0 || y == 0 || x == m.width() - 1 || y == m.height() - 1;
      if (border || !m.at(x - 1, y) || !m.at(x + 1, y) || !m.at(x, y - 1) ||
          !m.at(x, y + 1)) {
        b.set(x, y);
      }
    }
  }
  return b;
}

double frame_boundary_f(const BinaryMask& pred, const BinaryMask& gt, int radius) {
  require_same_shape(pred, gt);
  const BinaryMask pb = boundary_pixels(pred);
  const BinaryMask gb = boundary_pixels(gt);
  const bool pe = pb.empty(), ge = gb.empty();
  if (pe && ge) return 1.0;
  if (pe || ge) return 0.0;
  const double precision = matched_fraction(pb, gb, radius);
  const double recall = matched_fraction(gb, pb, radius);
  if (precision + recall == 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

double region_similarity_J(const MaskSequence& pred, const MaskSequence& gt) {
  return evaluate(pred, gt).j_mean;
}

double contour_accuracy_F(const MaskSequence& pred, const MaskSequence& gt,
                          int radius) {
  return evaluate(pred, gt, radius).f_mean;
}

double jf_mean(double j, double f) { return (j + f) / 2.0; }

EvalReport evaluate(const MaskSequence& pred, const MaskSequence& gt, int radius) {
  require_same_sequence(pred, gt);
  EvalReport r;
  if (pred.size() == 0) {
    r.j_mean = r.f_mean = r.jf_mean = 1.0;
    return r;
  }
  if (radius < 0) {
    radius = default_boundary_radius(gt.frames[0].width(), gt.frames[0].height());
  }
  double js = 0.0, fs = 0.0;
  for (std::size_t t = 0; t < pred.size(); ++t) {
    const double j = mask_iou(pred.frames[t], gt.frames[t]);
    const double f = frame_boundary_f(pred.frames[t], gt.frames[t], radius);
    r.per_frame_j.push_back(j);
    r.per_frame_f.push_back(f);
    js += j;
    fs += f;
  }
  r.j_mean = js / static_cast<double>(pred.size());
  r.f_mean = fs / static_cast<double>(pred.size());
  r.jf_mean = jf_mean(r.j_mean, r.f_mean);
  return r;
}

std::string format_report(const EvalReport& report) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "j_mean: %.6f\nf_mean: %.6f\njf_mean: %.6f\n",
                report.j_mean, report.f_mean, report.jf_mean);
  return buf;
}

}  // namespace refvos
