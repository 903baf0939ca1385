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

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "refvos/camera.hpp"
#include "refvos/geometry.hpp"
#include "refvos/metrics.hpp"
#include "refvos/pipeline.hpp"
#include "refvos/rle.hpp"
#include "refvos/simulator.hpp"

namespace refvos {
namespace {

BinaryMask random_blob(int w, int h, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double x0 = u(rng) * w * 0.5, y0 = u(rng) * h * 0.5;
  return BinaryMask::from_box(w, h, {x0, y0, x0 + w * 0.4, y0 + h * 0.4});
}

void BM_BoxIou(benchmark::State& state) {
  const Box2D a{10, 20, 60, 90}, b{30, 25, 80, 100};
  for (auto _ : state) benchmark::DoNotOptimize(box_iou(a, b));
}
BENCHMARK(BM_BoxIou);

void BM_MaskIou(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const int side = static_cast<int>(state.range(0));
  const BinaryMask a = random_blob(side, side, rng), b = random_blob(side, side, rng);
  for (auto _ : state) benchmark::DoNotOptimize(mask_iou(a, b));
}
BENCHMARK(BM_MaskIou)->Arg(160)->Arg(480);

void BM_RleRoundTrip(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const int side = static_cast<int>(state.range(0));
  const BinaryMask m = random_blob(side, side, rng);
  for (auto _ : state) benchmark::DoNotOptimize(decode_mask(encode_mask(m)));
}
BENCHMARK(BM_RleRoundTrip)->Arg(160)->Arg(480);

void BM_EstimateAffine(benchmark::State& state) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> pos(0.0, 160.0);
  std::normal_distribution<double> noise(0.0, 0.3);
  const AffineTransform truth = AffineTransform::translation(4.0, -2.0);
  std::vector<Correspondence> cs;
  for (int i = 0; i < 100; ++i) {
    const Point2D p{pos(rng), pos(rng)};
    Point2D q = truth.apply(p);
    if (i % 5 == 0) q = {pos(rng), pos(rng)};
    cs.push_back({p, {q.x + noise(rng), q.y + noise(rng)}, 0.0});
  }
  for (auto _ : state) benchmark::DoNotOptimize(estimate_affine(cs));
}
BENCHMARK(BM_EstimateAffine);

void BM_Evaluate(benchmark::State& state) {
  std::mt19937_64 rng(4);
  MaskSequence pred{"v", {}}, gt{"v", {}};
  for (int t = 0; t < 30; ++t) {
    pred.frames.push_back(random_blob(160, 120, rng));
    gt.frames.push_back(random_blob(160, 120, rng));
  }
  for (auto _ : state) benchmark::DoNotOptimize(evaluate(pred, gt));
}
BENCHMARK(BM_Evaluate);

void BM_PipelineOneScene(benchmark::State& state) {
  const GeneratedScene g = generate_scene(standard_suite(1, 7).front(), 7);
  PipelineConfig config;
  config.reasoner.offline = true;
  for (auto _ : state) benchmark::DoNotOptimize(run_pipeline(g.bundle, g.query, config));
}
BENCHMARK(BM_PipelineOneScene)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace refvos

BENCHMARK_MAIN();
