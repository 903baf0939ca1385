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

#include "refvos/camera.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include "refvos/error.hpp"

namespace refvos {

bool AffineTransform::finite() const {
  return std::isfinite(a) && std::isfinite(b) && std::isfinite(tx) &&
         std::isfinite(c) && std::isfinite(d) && std::isfinite(ty);
}

AffineTransform AffineTransform::compose(const AffineTransform& o) const {
  return {a * o.a + b * o.c, a * o.b + b * o.d, a * o.tx + b * o.ty + tx,
          c * o.a + d * o.c, c * o.b + d * o.d, c * o.tx + d * o.ty + ty};
}

AffineTransform AffineTransform::inverse() const {
  const double det = determinant();
  if (!std::isfinite(det) || std::abs(det) < 1e-12)
    throw ModelError("affine transform is not invertible");
  const double ia = d / det, ib = -b / det, ic = -c / det, id = a / det;
  return {ia, ib, -(ia * tx + ib * ty), ic, id, -(ic * tx + id * ty)};
}

double AffineTransform::max_abs_diff(const AffineTransform& o) const {
  return std::max({std::abs(a - o.a), std::abs(b - o.b), std::abs(tx - o.tx),
                   std::abs(c - o.c), std::abs(d - o.d), std::abs(ty - o.ty)});
}

// --- sparse feature tracking -------------------------------------------------

namespace {

GrayImage downsample(const GrayImage& src) {
  static constexpr std::array<float, 5> k = {1.f / 16, 4.f / 16, 6.f / 16, 4.f / 16,
                                             1.f / 16};
  auto clampi = [](int v, int hi) { return std::clamp(v, 0, hi - 1); };
  GrayImage tmp(src.width, src.height);
  for (int y = 0; y < src.height; ++y)
    for (int x = 0; x < src.width; ++x) {
      float s = 0.f;
      for (int i = -2; i <= 2; ++i) s += k[i + 2] * src.at(clampi(x + i, src.width), y);
      tmp.at(x, y) = s;
    }
  GrayImage dst((src.width + 1) / 2, (src.height + 1) / 2);
  for (int y = 0; y < dst.height; ++y)
    for (int x = 0; x < dst.width; ++x) {
      float s = 0.f;
      for (int i = -2; i <= 2; ++i)
        s += k[i + 2] * tmp.at(2 * x, clampi(2 * y + i, src.height));
      dst.at(x, y) = s;
    }
  return dst;
}

struct Gradients {
  GrayImage gx, gy;
};

Gradients central_gradients(const GrayImage& img) {
  Gradients g{GrayImage(img.width, img.height), GrayImage(img.width, img.height)};
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) {
      const int xl = std::max(0, x - 1), xr = std::min(img.width - 1, x + 1);
      const int yu = std::max(0, y - 1), yd = std::min(img.height - 1, y + 1);
      g.gx.at(x, y) = (img.at(xr, y) - img.at(xl, y)) / float(std::max(1, xr - xl));
      g.gy.at(x, y) = (img.at(x, yd) - img.at(x, yu)) / float(std::max(1, yd - yu));
    }
  return g;
}

std::vector<GrayImage> build_pyramid(const GrayImage& img, int levels) {
  std::vector<GrayImage> pyr{img};
  for (int l = 1; l < levels; ++l) {
    if (pyr.back().width < 8 || pyr.back().height < 8) break;
    pyr.push_back(downsample(pyr.back()));
  }
  return pyr;
}

// Tracks one point through the pyramid; returns false when the point is lost.
bool track_point(const std::vector<GrayImage>& prev, const std::vector<Gradients>& grads,
                 const std::vector<GrayImage>& next, const Point2D& p,
                 const FeatureTrackingParams& params, Point2D& out) {
  const int half = params.window / 2;
  const int n = (2 * half + 1) * (2 * half + 1);
  std::vector<float> tmpl(n), ix(n), iy(n);
  double gx = 0.0, gy = 0.0;  // accumulated guess at the current level
  bool converged = false;
  for (int level = static_cast<int>(prev.size()) - 1; level >= 0; --level) {
    const double scale = std::ldexp(1.0, -level);
    const double px = p.x * scale, py = p.y * scale;
    double gxx = 0, gxy = 0, gyy = 0;
    int idx = 0;
    for (int dy = -half; dy <= half; ++dy)
      for (int dx = -half; dx <= half; ++dx, ++idx) {
        tmpl[idx] = prev[level].sample(px + dx, py + dy);
        ix[idx] = grads[level].gx.sample(px + dx, py + dy);
        iy[idx] = grads[level].gy.sample(px + dx, py + dy);
        gxx += ix[idx] * ix[idx];
        gxy += ix[idx] * iy[idx];
        gyy += iy[idx] * iy[idx];
      }
    const double det = gxx * gyy - gxy * gxy;
    const double tr = gxx + gyy;
    const double min_eig = (tr - std::sqrt(std::max(0.0, tr * tr - 4 * det))) / 2.0;
    if (min_eig / n < params.min_eigenvalue || det <= 0.0) return false;

    double vx = 0.0, vy = 0.0;
    converged = false;
    for (int it = 0; it < params.max_iterations; ++it) {
      double bx = 0.0, by = 0.0;
      idx = 0;
      for (int dy = -half; dy <= half; ++dy)
        for (int dx = -half; dx <= half; ++dx, ++idx) {
          const double diff =
              tmpl[idx] - next[level].sample(px + dx + gx + vx, py + dy + gy + vy);
          bx += diff * ix[idx];
          by += diff * iy[idx];
        }
      const double ex = (gyy * bx - gxy * by) / det;
      const double ey = (gxx * by - gxy * bx) / det;
      vx += ex;
      vy += ey;
      if (std::hypot(ex, ey) < params.epsilon) {
        converged = true;
        break;
      }
    }
    if (level > 0) {
      gx = 2.0 * (gx + vx);
      gy = 2.0 * (gy + vy);
    } else {
      gx += vx;
      gy += vy;
    }
  }
  if (!converged) return false;
  out = {p.x + gx, p.y + gy};
  const GrayImage& base = next.front();
  return out.x >= 0 && out.y >= 0 && out.x <= base.width - 1 && out.y <= base.height - 1;
}

}  // namespace

std::vector<Correspondence> track_sparse_features(const GrayImage& a, const GrayImage& b,
                                                  const FeatureTrackingParams& params) {
  if (a.width != b.width || a.height != b.height)
    throw ShapeError("feature tracking needs frames of equal resolution");
  if (params.grid_step < 1 || params.window < 3)
    throw InputError("invalid feature tracking parameters");

  const std::vector<GrayImage> pa = build_pyramid(a, params.pyramid_levels);
  const std::vector<GrayImage> pb = build_pyramid(b, params.pyramid_levels);
  std::vector<Gradients> grads;
  for (const auto& level : pa) grads.push_back(central_gradients(level));

  const int half = params.window / 2;
  std::vector<Correspondence> out;
  const int start = params.grid_step / 2;
  for (int y = start; y < a.height; y += params.grid_step) {
    for (int x = start; x < a.width; x += params.grid_step) {
      if (x < half || y < half || x >= a.width - half || y >= a.height - half) continue;
      double mag = 0.0;
      int cnt = 0;
      for (int dy = -2; dy <= 2; ++dy)
        for (int dx = -2; dx <= 2; ++dx, ++cnt)
          mag += std::hypot(grads[0].gx.at(x + dx, y + dy), grads[0].gy.at(x + dx, y + dy));
      if (mag / cnt < params.gradient_floor) continue;
      Point2D next;
      if (track_point(pa, grads, pb, {double(x), double(y)}, params, next))
        out.push_back({{double(x), double(y)}, next, 0.0});
    }
  }
  if (out.size() < 6)
    throw InsufficientFeaturesError("only " + std::to_string(out.size()) +
                                    " trackable features");
  return out;
}

std::vector<Correspondence> track_sparse_features(const Image& a, const Image& b,
                                                  const FeatureTrackingParams& params) {
  return track_sparse_features(to_gray(a), to_gray(b), params);
}

// --- robust affine -----------------------------------------------------------

namespace {

double residual(const AffineTransform& t, const Correspondence& c) {
  return distance(t.apply(c.prev), c.next);
}

// Exact affine through three correspondences; false when collinear.
bool solve_three(const Correspondence& p0, const Correspondence& p1,
                 const Correspondence& p2, AffineTransform& out) {
  const double x0 = p0.prev.x, y0 = p0.prev.y;
  const double ux = p1.prev.x - x0, uy = p1.prev.y - y0;
  const double wx = p2.prev.x - x0, wy = p2.prev.y - y0;
  const double det = ux * wy - uy * wx;
  const double scale = std::max({std::abs(ux), std::abs(uy), std::abs(wx), std::abs(wy), 1.0});
  if (std::abs(det) < 1e-9 * scale * scale) return false;
  const double qx1 = p1.next.x - p0.next.x, qy1 = p1.next.y - p0.next.y;
  const double qx2 = p2.next.x - p0.next.x, qy2 = p2.next.y - p0.next.y;
  // [a b; c d] * [u w] = [q1 q2]
  out.a = (qx1 * wy - qx2 * uy) / det;
  out.b = (qx2 * ux - qx1 * wx) / det;
  out.c = (qy1 * wy - qy2 * uy) / det;
  out.d = (qy2 * ux - qy1 * wx) / det;
  out.tx = p0.next.x - (out.a * x0 + out.b * y0);
  out.ty = p0.next.y - (out.c * x0 + out.d * y0);
  return out.finite();
}

}  // namespace

AffineTransform fit_affine_least_squares(std::span<const Correspondence> cs) {
  if (cs.size() < 3) throw DegenerateError("affine fit needs >= 3 correspondences");
  double mx = 0, my = 0, nx = 0, ny = 0;
  for (const auto& c : cs) {
    mx += c.prev.x;
    my += c.prev.y;
    nx += c.next.x;
    ny += c.next.y;
  }
  const double n = static_cast<double>(cs.size());
  mx /= n, my /= n, nx /= n, ny /= n;
  double sxx = 0, sxy = 0, syy = 0, sxu = 0, syu = 0, sxv = 0, syv = 0;
  for (const auto& c : cs) {
    const double x = c.prev.x - mx, y = c.prev.y - my;
    const double u = c.next.x - nx, v = c.next.y - ny;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
    sxu += x * u;
    syu += y * u;
    sxv += x * v;
    syv += y * v;
  }
  const double det = sxx * syy - sxy * sxy;
  if (std::abs(det) <= 1e-12 * std::max(1.0, (sxx + syy) * (sxx + syy)))
    throw DegenerateError("correspondences are collinear");
  AffineTransform t;
  t.a = (syy * sxu - sxy * syu) / det;
  t.b = (sxx * syu - sxy * sxu) / det;
  t.c = (syy * sxv - sxy * syv) / det;
  t.d = (sxx * syv - sxy * sxv) / det;
  t.tx = nx - (t.a * mx + t.b * my);
  t.ty = ny - (t.c * mx + t.d * my);
  return t;
}

AffineFit estimate_affine(std::span<const Correspondence> cs, const RansacParams& params) {
  if (cs.size() < 3) throw DegenerateError("affine estimation needs >= 3 correspondences");
  std::mt19937_64 rng(params.seed);
  std::uniform_int_distribution<std::size_t> pick(0, cs.size() - 1);

  bool any = false;
  AffineTransform best;
  int best_inliers = -1;
  double best_cost = 0.0;
  for (int it = 0; it < std::max(1, params.iterations); ++it) {
    std::size_t i0 = pick(rng), i1 = pick(rng), i2 = pick(rng);
    if (cs.size() == 3) i0 = 0, i1 = 1, i2 = 2;
    if (i0 == i1 || i1 == i2 || i0 == i2) continue;
    AffineTransform cand;
    if (!solve_three(cs[i0], cs[i1], cs[i2], cand)) continue;
    any = true;
    int inliers = 0;
    double cost = 0.0;
    for (const auto& c : cs) {
      const double r = residual(cand, c);
      if (r <= params.inlier_px) {
        ++inliers;
        cost += r * r;
      }
    }
    if (inliers > best_inliers || (inliers == best_inliers && cost < best_cost)) {
      best = cand;
      best_inliers = inliers;
      best_cost = cost;
    }
  }
  if (!any) throw DegenerateError("all RANSAC samples were collinear");

  AffineTransform model = best;
  std::vector<Correspondence> inliers;
  for (int round = 0; round < 2; ++round) {
    inliers.clear();
    for (const auto& c : cs)
      if (residual(model, c) <= params.inlier_px) inliers.push_back(c);
    try {
      model = fit_affine_least_squares(inliers);
    } catch (const DegenerateError&) {
      break;
    }
  }
  // Slow independent movers can sit inside the consensus band frame to frame.
  // Refit once more on a band scaled from the median residual so they drop out
  // whenever the background tracks agree more tightly than that.
  if (inliers.size() >= 3) {
    std::vector<double> rs;
    for (const auto& c : inliers) rs.push_back(residual(model, c));
    std::nth_element(rs.begin(), rs.begin() + rs.size() / 2, rs.end());
    const double band =
        std::clamp(3.0 * 1.4826 * rs[rs.size() / 2], 0.1, params.inlier_px);
    std::vector<Correspondence> core;
    for (const auto& c : inliers)
      if (residual(model, c) <= band) core.push_back(c);
    if (core.size() >= 3) {
      try {
        model = fit_affine_least_squares(core);
      } catch (const DegenerateError&) {
      }
    }
  }
  inliers.clear();
  double ss = 0.0;
  for (const auto& c : cs) {
    const double r = residual(model, c);
    if (r <= params.inlier_px) {
      inliers.push_back(c);
      ss += r * r;
    }
  }
  AffineFit fit;
  fit.transform = model;
  fit.inliers = static_cast<int>(inliers.size());
  fit.rms_residual = inliers.empty() ? 0.0 : std::sqrt(ss / inliers.size());
  return fit;
}

// --- camera model ------------------------------------------------------------

CameraMotionModel CameraMotionModel::identity(const KeyframeSchedule& schedule) {
  std::vector<IntervalEstimate> iv;
  for (std::size_t i = 0; i + 1 < schedule.indices.size(); ++i)
    iv.push_back({schedule.indices[i], schedule.indices[i + 1], {}, 0, 0.0, false, false, ""});
  return from_intervals(schedule, std::move(iv));
}

CameraMotionModel CameraMotionModel::from_intervals(const KeyframeSchedule& schedule,
                                                    std::vector<IntervalEstimate> intervals) {
  CameraMotionModel m;
  for (auto& e : intervals) m.intervals[{e.from, e.to}] = std::move(e);
  if (schedule.indices.empty()) return m;
  AffineTransform acc = AffineTransform::identity();
  m.cumulative[schedule.indices.front()] = acc;
  for (std::size_t i = 0; i + 1 < schedule.indices.size(); ++i) {
    const int a = schedule.indices[i], b = schedule.indices[i + 1];
    auto it = m.intervals.find({a, b});
    if (it == m.intervals.end())
      throw ModelError("missing camera interval " + std::to_string(a) + ".." +
                       std::to_string(b));
    acc = it->second.transform.compose(acc);
    m.cumulative[b] = acc;
  }
  return m;
}

const AffineTransform& CameraMotionModel::cumulative_at(int keyframe) const {
  auto it = cumulative.find(keyframe);
  if (it == cumulative.end())
    throw LookupError("camera model does not cover keyframe " + std::to_string(keyframe));
  return it->second;
}

std::string CameraMotionModel::dump() const {
  std::ostringstream os;
  char buf[256];
  for (const auto& [key, e] : intervals) {
    const auto& t = e.transform;
    std::snprintf(buf, sizeof buf,
                  "interval %d..%d: %.6f %.6f %.6f %.6f %.6f %.6f inliers=%d rms=%.4f%s\n",
                  e.from, e.to, t.a, t.b, t.tx, t.c, t.d, t.ty, e.inliers, e.rms_residual,
                  e.failed ? " failed" : (e.direct ? " direct" : ""));
    os << buf;
  }
  return os.str();
}

CameraMotionModel build_camera_model(const PerceptionBundle& bundle,
                                     const KeyframeSchedule& schedule,
                                     const CameraParams& params) {
  if (schedule.indices.size() < 2) return CameraMotionModel::identity(schedule);
  if (!bundle.has_frames()) throw IoError("bundle has no frames for camera estimation");

  std::vector<IntervalEstimate> intervals;
  GrayImage prev_gray = to_gray(bundle.load_frame(schedule.indices.front()));
  std::uint64_t seed = params.ransac.seed;
  for (std::size_t i = 0; i + 1 < schedule.indices.size(); ++i) {
    const int from = schedule.indices[i], to = schedule.indices[i + 1];
    IntervalEstimate est{from, to, AffineTransform::identity(), 0, 0.0, false, false, ""};
    const GrayImage start_gray = prev_gray;
    bool chained = true;
    int min_inliers = 0;
    double rms_sum = 0.0;
    for (int f = from + 1; f <= to; ++f) {
      GrayImage cur = to_gray(bundle.load_frame(f));
      if (chained) {
        try {
          const auto cs = track_sparse_features(prev_gray, cur, params.features);
          RansacParams rp = params.ransac;
          rp.seed = seed++;
          const AffineFit fit = estimate_affine(cs, rp);
          est.transform = fit.transform.compose(est.transform);
          min_inliers = (f == from + 1) ? fit.inliers : std::min(min_inliers, fit.inliers);
          rms_sum += fit.rms_residual;
        } catch (const DegenerateError& e) {
          chained = false;
          est.note = "frame " + std::to_string(f) + ": " + e.what();
        }
      }
      prev_gray = std::move(cur);
    }
    if (chained) {
      est.inliers = min_inliers;
      est.rms_residual = rms_sum / std::max(1, to - from);
    } else {
      try {
        const auto cs = track_sparse_features(start_gray, prev_gray, params.features);
        RansacParams rp = params.ransac;
        rp.seed = seed++;
        const AffineFit fit = estimate_affine(cs, rp);
        est.transform = fit.transform;
        est.inliers = fit.inliers;
        est.rms_residual = fit.rms_residual;
        est.direct = true;
      } catch (const DegenerateError& e) {
        est.transform = AffineTransform::identity();
        est.failed = true;
        est.note += std::string("; direct: ") + e.what();
      }
    }
    intervals.push_back(std::move(est));
  }
  return CameraMotionModel::from_intervals(schedule, std::move(intervals));
}

Box2D compensate_box(const Box2D& box, const AffineTransform& to_frame) {
  const AffineTransform inv = to_frame.inverse();
  const std::array<Point2D, 4> corners = {Point2D{box.xmin, box.ymin}, Point2D{box.xmax, box.ymin},
                                          Point2D{box.xmin, box.ymax}, Point2D{box.xmax, box.ymax}};
  Box2D out{1e300, 1e300, -1e300, -1e300};
  for (const auto& c : corners) {
    const Point2D p = inv.apply(c);
    out.xmin = std::min(out.xmin, p.x);
    out.ymin = std::min(out.ymin, p.y);
    out.xmax = std::max(out.xmax, p.x);
    out.ymax = std::max(out.ymax, p.y);
  }
  return out;
}

}  // namespace refvos
