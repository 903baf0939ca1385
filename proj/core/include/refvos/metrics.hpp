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

#include <string>
#include <vector>

#include "refvos/geometry.hpp"

namespace refvos {

struct EvalReport {
  double j_mean = 0.0;
  double f_mean = 0.0;
  double jf_mean = 0.0;
  std::vector<double> per_frame_j;
  std::vector<double> per_frame_f;
};

// ceil(0.8% of the image diagonal), the customary DAVIS boundary tolerance.
int default_boundary_radius(int width, int height);

// Boundary pixels: set pixels with at least one unset 4-neighbour or lying on
// the image border.
BinaryMask boundary_pixels(const BinaryMask& m);

// Boundary F-measure of one frame pair; pixels match when their Euclidean
// distance is at most `radius`.
double frame_boundary_f(const BinaryMask& pred, const BinaryMask& gt, int radius);

double region_similarity_J(const MaskSequence& pred, const MaskSequence& gt);
// radius < 0 selects default_boundary_radius for the sequence resolution.
double contour_accuracy_F(const MaskSequence& pred, const MaskSequence& gt,
                          int radius = -1);
double jf_mean(double j, double f);

EvalReport evaluate(const MaskSequence& pred, const MaskSequence& gt,
                    int radius = -1);

// key: value lines for j_mean, f_mean, jf_mean.
std::string format_report(const EvalReport& report);

}  // namespace refvos
