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

// Repulsion-loss family for bounding-box regression.
//
// The combined objective over the positive proposals P+ is
//
//   L = L_attr + alpha * L_repgt + beta * L_repbox
//
// where L_attr pulls each predicted box toward its designated ground truth
// (Smooth-L1 on raw l/t/w/h residuals), L_repgt penalizes the IoG between a
// predicted box and its repulsion ground truth, and L_repbox penalizes the
// IoU between predicted boxes that regress to different targets. Both
// repulsion terms pass the overlap through Smooth-ln, which is -ln(1 - x)
// below sigma and its tangent line above it.

#ifndef REPULSE_LOSSES_H_
#define REPULSE_LOSSES_H_

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "repulse/geometry.h"

namespace repulse {

struct LossConfig {
  double alpha = 0.5;
  double beta = 0.5;
  double sigma_gt = 1.0;
  double sigma_box = 0.0;
  double smooth_l1_sigma = 2.0;
  double epsilon = 1e-6;
  double ln_clamp = 1e-6;

  // Throws std::invalid_argument naming the offending field.
  void Validate() const;
};

struct LossBreakdown {
  double attraction = 0.0;
  double rep_gt = 0.0;
  double rep_box = 0.0;
  double total = 0.0;
  // No positive proposals were supplied; all terms are 0.
  bool no_positives = false;
};

struct LossGradients {
  // One entry per predicted box, same order as the input.
  std::vector<BoxGradient> per_box;
  // Any contributing term was evaluated at a kink (edge coincidence or the
  // -ln clamp).
  bool non_smooth = false;
};

// 0.5 (sigma x)^2 for |x| < 1 / sigma^2, |x| - 0.5 / sigma^2 otherwise.
double SmoothL1(double x, double sigma);
double SmoothL1Derivative(double x, double sigma);

// -ln(1 - x) for x <= sigma, (x - sigma) / (1 - sigma) - ln(1 - sigma) for
// x > sigma. With sigma == 1 only the log branch applies. Inside the log
// branch x is clamped to 1 - ln_clamp.
double SmoothLn(double x, double sigma, double ln_clamp = 1e-6);
// Derivative w.r.t. x; zero where the clamp is active.
double SmoothLnDerivative(double x, double sigma, double ln_clamp = 1e-6);

// Mean over pairs of the Smooth-L1 distance summed over the four box
// coordinates. Empty input yields 0. Throws on length mismatch.
double AttractionLoss(std::span<const Box> predicted,
                      std::span<const Box> targets, const LossConfig& cfg);

// Sum of SmoothLn(IoG(predicted[i], rep_targets[i])) over proposals that have
// a repulsion target, divided by the number of proposals.
double RepGtLoss(std::span<const Box> predicted,
                 std::span<const std::optional<Box>> rep_targets,
                 const LossConfig& cfg);

// Sum over unordered pairs with different group ids of
// SmoothLn(IoU(b_i, b_j)), divided by (#such pairs with IoU > 0) + epsilon.
double RepBoxLoss(std::span<const Box> predicted,
                  std::span<const std::size_t> partition,
                  const LossConfig& cfg);

// Per-proposal regression inputs for the combined loss; all spans are
// indexed by positive proposal.
struct LossInputs {
  std::span<const Box> predicted;
  std::span<const Box> targets;
  std::span<const std::optional<Box>> rep_targets;
  std::span<const std::size_t> partition;
};

LossBreakdown TotalLoss(const LossInputs& in, const LossConfig& cfg);
LossGradients TotalLossGradient(const LossInputs& in, const LossConfig& cfg);

// Distance of the configuration to the nearest non-differentiable point of
// the total loss: edge coincidences among interacting box pairs (scene
// units) and the -ln clamp boundary (overlap units). The loss is smooth in
// a neighborhood of `in.predicted` of roughly this radius.
double SmoothnessMargin(const LossInputs& in, const LossConfig& cfg);

}  // namespace repulse

#endif  // REPULSE_LOSSES_H_
