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

// Synthetic crowd scenes and direct gradient descent on predicted boxes.
//
// There is no detector here: each proposal's predicted box is itself the
// optimization variable, so the loss geometry alone decides where boxes end
// up. A detection's score is its final IoU with its designated target, which
// only supports relative comparisons between loss settings.

#ifndef REPULSE_SIMULATOR_H_
#define REPULSE_SIMULATOR_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "repulse/assignment.h"
#include "repulse/evaluation.h"
#include "repulse/geometry.h"
#include "repulse/losses.h"
#include "repulse/nms.h"

namespace repulse {

struct SceneConfig {
  int num_gts = 2;
  // Realized IoU between each ground truth and its chain neighbor.
  double overlap_min = 0.3;
  double overlap_max = 0.6;
  double size_min = 0.75;
  double size_max = 1.5;
  double extent_width = 10.0;
  double extent_height = 6.0;
  std::uint64_t seed = 0;
  int max_attempts = 10000;

  void Validate() const;
};

struct Scene {
  std::vector<Annotation> gts;

  std::vector<Box> boxes() const;
};

// Ground truth k > 0 is placed next to ground truth k - 1 with IoU in
// [overlap_min, overlap_max]; non-neighbors overlap by at most overlap_max.
// Later ground truths occlude earlier ones. Throws std::runtime_error when
// the attempt budget runs out.
Scene GenerateScene(const SceneConfig& cfg);

struct OptimizerConfig {
  double learning_rate = 0.1;
  int steps = 500;
  int proposals_per_gt = 4;
  // Per-coordinate Gaussian jitter as a fraction of the source box size.
  double init_noise = 0.1;
  std::uint64_t seed = 0;
  // Widths and heights are kept at or above this after each step.
  double min_extent = 1e-3;
  int rejitter_budget = 100;

  void Validate() const;
};

struct ProposalSet {
  std::vector<Box> proposals;
  std::vector<std::size_t> source_gt;
  // Jitters discarded for missing the positive threshold.
  int rejected_draws = 0;
  AssignmentSet assignment;
  // Loss inputs for the initial (predicted == proposal) configuration.
  PositiveBatch batch;
};

// `proposals_per_gt` jittered copies of every ground truth; copies that are
// not positive at IoU 0.5 are re-drawn. Throws std::runtime_error when the
// re-draw budget runs out.
ProposalSet GenerateProposals(const Scene& scene, const OptimizerConfig& cfg);

struct StepRecord {
  // Loss at the boxes entering this step.
  LossBreakdown loss;
  // Boxes after the update.
  std::vector<Box> boxes;
};

struct Trajectory {
  std::vector<Box> initial;
  std::vector<StepRecord> steps;
  std::vector<Detection> final_detections;
  bool hit_non_smooth = false;

  const std::vector<Box>& final_boxes() const {
    return steps.empty() ? initial : steps.back().boxes;
  }
};

// Fixed-step gradient descent over the positive proposals' predicted boxes.
// Throws std::runtime_error naming the step if the loss or gradient stops
// being finite.
Trajectory Optimize(const ProposalSet& proposals, const LossConfig& loss_cfg,
                    const OptimizerConfig& opt_cfg);

struct SweepPoint {
  double threshold = 0.0;
  std::size_t detected = 0;
  std::size_t false_positives = 0;
};

// NMS at each threshold, then matching against the scene at IoU 0.5.
std::vector<SweepPoint> NmsSensitivitySweep(std::span<const Detection> dets,
                                            std::span<const double> thresholds,
                                            const Scene& scene);

// {0.3, 0.35, ..., 0.7}
std::vector<double> DefaultNmsThresholds();

// Aggregates over one optimized scene used by the A/B comparisons.
struct RunSummary {
  double mean_rep_iog = 0.0;      // final IoG with repulsion targets
  double mean_cross_iou = 0.0;    // final IoU over cross-group pairs
  std::size_t missed_after_nms = 0;  // at NMS threshold 0.5
  double detected_variance = 0.0;    // across the sweep thresholds
  LossBreakdown final_loss;
  std::vector<SweepPoint> sweep;
};

RunSummary Summarize(const Scene& scene, const ProposalSet& proposals,
                     const Trajectory& trajectory, const LossConfig& loss_cfg,
                     std::span<const double> nms_thresholds);

// Population variance.
double Variance(std::span<const double> xs);

struct SimulationRun {
  Scene scene;
  ProposalSet proposals;
  Trajectory trajectory;
  RunSummary summary;
};

// Scene -> proposals -> optimize -> sweep for one seed. The scene and
// optimizer seeds are taken from the configs.
SimulationRun Simulate(const SceneConfig& scene_cfg, const LossConfig& loss_cfg,
                       const OptimizerConfig& opt_cfg,
                       std::span<const double> nms_thresholds);

}  // namespace repulse

#endif  // REPULSE_SIMULATOR_H_
