// Copyright 2026 The Repulse Authors
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

#ifndef REPULSE_GRADCHECK_H_
#define REPULSE_GRADCHECK_H_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "repulse/assignment.h"
#include "repulse/losses.h"

namespace repulse {

struct GradCheckConfig {
  // Number of smooth scenes to check. Scenes near a kink are drawn in
  // addition, up to ten times this many draws in total.
  int scenes = 200;
  std::uint64_t seed = 0;
  int min_gts = 2;
  int max_gts = 5;
  int min_proposals = 4;
  int max_proposals = 20;
  double step = 1e-6;
  // Scenes closer than this to a kink of the loss are skipped.
  double kink_tolerance = 1e-4;
  // Denominator floor of the relative error, so components that vanish
  // analytically are compared in absolute terms.
  double relative_floor = 1e-5;
  double tolerance = 1e-4;
  LossConfig loss;
};

struct GradCheckReport {
  int scenes = 0;  // drawn
  int checked = 0;
  int flagged = 0;
  std::size_t components = 0;
  double max_rel_error = 0.0;
  bool passed = false;
};

// |a - b| / max(|a|, |b|, floor).
double RelativeError(double a, double b, double floor);

// Central finite difference of TotalLoss(...).total w.r.t. every coordinate
// of every predicted box, in (l, t, w, h) order per box.
std::vector<double> FiniteDifferenceGradient(const LossInputs& in,
                                             const LossConfig& cfg,
                                             double step);

// A random crowd scene with its assignment and perturbed predictions.
struct GradCheckScene {
  std::vector<Box> gts;
  std::vector<Box> proposals;
  AssignmentSet assignment;
  PositiveBatch batch;
};

GradCheckScene RandomGradCheckScene(std::uint64_t seed,
                                    const GradCheckConfig& cfg);

GradCheckReport RunGradCheck(const GradCheckConfig& cfg);

}  // namespace repulse

#endif  // REPULSE_GRADCHECK_H_
