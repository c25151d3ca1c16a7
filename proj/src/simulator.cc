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

#include "repulse/simulator.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "repulse/random.h"

namespace repulse {

namespace {

constexpr double kMatchIoU = 0.5;
constexpr double kSweepReferenceNms = 0.5;
constexpr int kRestartAfter = 500;

void Check(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

// Largest axis-aligned piece of `visible` left uncovered by `occluder`.
Box ClipVisible(const Box& visible, const Box& occluder) {
  if (IntersectionArea(visible, occluder) <= 0.0) return visible;
  const double l = visible.left(), t = visible.top();
  const double r = visible.right(), b = visible.bottom();
  const Box candidates[4] = {
      Box::FromCorners(l, t, std::clamp(occluder.left(), l, r), b),
      Box::FromCorners(std::clamp(occluder.right(), l, r), t, r, b),
      Box::FromCorners(l, t, r, std::clamp(occluder.top(), t, b)),
      Box::FromCorners(l, std::clamp(occluder.bottom(), t, b), r, b),
  };
  Box best = Box(l, t, 0.0, 0.0);
  for (const Box& c : candidates) {
    if (Area(c) > Area(best)) best = c;
  }
  return best;
}

Box RandomBox(Rng& rng, const SceneConfig& cfg) {
  const double w = rng.Uniform(cfg.size_min, cfg.size_max);
  const double h = rng.Uniform(cfg.size_min, cfg.size_max);
  return Box(0.0, 0.0, w, h);
}

bool InsideExtent(const Box& b, const SceneConfig& cfg) {
  return b.left() >= 0.0 && b.top() >= 0.0 && b.right() <= cfg.extent_width &&
         b.bottom() <= cfg.extent_height;
}

Box Jitter(Rng& rng, const Box& src, double noise) {
  const double l = src.left() + noise * src.width() * rng.Normal();
  const double t = src.top() + noise * src.height() * rng.Normal();
  const double w = src.width() * (1.0 + noise * rng.Normal());
  const double h = src.height() * (1.0 + noise * rng.Normal());
  return Box(l, t, std::max(w, 0.05 * src.width()),
             std::max(h, 0.05 * src.height()));
}

Box ApplyStep(const Box& b, const BoxGradient& g, double lr,
              double min_extent) {
  return Box(b.left() - lr * g.d_left, b.top() - lr * g.d_top,
             std::max(b.width() - lr * g.d_width, min_extent),
             std::max(b.height() - lr * g.d_height, min_extent));
}

LossInputs WithPredicted(const PositiveBatch& batch,
                         std::span<const Box> predicted) {
  return {predicted, batch.targets, batch.rep_targets, batch.partition};
}

bool Finite(const LossBreakdown& l) {
  return std::isfinite(l.attraction) && std::isfinite(l.rep_gt) &&
         std::isfinite(l.rep_box) && std::isfinite(l.total);
}

}  // namespace

void SceneConfig::Validate() const {
  Check(num_gts >= 1, "scene num_gts must be >= 1");
  Check(overlap_min >= 0.0 && overlap_min <= overlap_max && overlap_max < 1.0,
        "scene overlap range must satisfy 0 <= min <= max < 1");
  Check(size_min > 0.0 && size_min <= size_max,
        "scene size range must satisfy 0 < min <= max");
  Check(extent_width > 0.0 && extent_height > 0.0,
        "scene extent must be positive");
  Check(extent_width >= size_max && extent_height >= size_max,
        "scene extent must fit the largest box");
  Check(max_attempts > 0, "scene max_attempts must be positive");
}

std::vector<Box> Scene::boxes() const {
  std::vector<Box> out;
  out.reserve(gts.size());
  for (const Annotation& a : gts) out.push_back(a.box);
  return out;
}

Scene GenerateScene(const SceneConfig& cfg) {
  cfg.Validate();
  Rng rng(cfg.seed, Stream::kScene);
  std::vector<Box> boxes;
  auto place_first = [&] {
    const Box proto = RandomBox(rng, cfg);
    boxes.assign(1, Box(rng.Uniform(0.0, cfg.extent_width - proto.width()),
                        rng.Uniform(0.0, cfg.extent_height - proto.height()),
                        proto.width(), proto.height()));
  };
  place_first();

  int attempts = 0;
  int stalled = 0;
  while (static_cast<int>(boxes.size()) < cfg.num_gts) {
    // A chain can corner itself against the extent; start over.
    if (++stalled > kRestartAfter) {
      place_first();
      stalled = 0;
    }
    if (++attempts > cfg.max_attempts) {
      throw std::runtime_error(
          "scene generation: placed " + std::to_string(boxes.size()) + " of " +
          std::to_string(cfg.num_gts) + " ground truths within " +
          std::to_string(cfg.max_attempts) + " attempts (seed " +
          std::to_string(cfg.seed) + ", overlap range [" +
          std::to_string(cfg.overlap_min) + ", " +
          std::to_string(cfg.overlap_max) + "])");
    }
    const Box& prev = boxes.back();
    const Box proto = RandomBox(rng, cfg);
    // Side-by-side placement with a small vertical offset.
    const double side = rng.Uniform() < 0.5 ? -1.0 : 1.0;
    const double dx = side * rng.Uniform(0.0, 0.5 * (prev.width() +
                                                     proto.width()));
    const double dy = rng.Uniform(-0.15, 0.15) * prev.height();
    const double cx = prev.left() + 0.5 * prev.width() + dx;
    const double cy = prev.top() + 0.5 * prev.height() + dy;
    const Box cand(cx - 0.5 * proto.width(), cy - 0.5 * proto.height(),
                   proto.width(), proto.height());
    if (!InsideExtent(cand, cfg)) continue;
    const double v = IoU(cand, prev);
    if (v < cfg.overlap_min || v > cfg.overlap_max) continue;
    bool crowded = false;
    for (std::size_t k = 0; k + 1 < boxes.size(); ++k) {
      crowded = crowded || IoU(cand, boxes[k]) > cfg.overlap_max;
    }
    if (crowded) continue;
    boxes.push_back(cand);
    stalled = 0;
  }

  Scene scene;
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    Annotation a;
    a.id = "gt" + std::to_string(i);
    a.box = boxes[i];
    Box visible = boxes[i];
    for (std::size_t j = i + 1; j < boxes.size(); ++j) {
      visible = ClipVisible(visible, boxes[j]);
    }
    a.visible_box = visible;
    scene.gts.push_back(std::move(a));
  }
  return scene;
}

void OptimizerConfig::Validate() const {
  Check(std::isfinite(learning_rate) && learning_rate > 0.0,
        "optimizer learning_rate must be > 0");
  Check(steps > 0, "optimizer steps must be > 0");
  Check(proposals_per_gt > 0, "optimizer proposals_per_gt must be > 0");
  Check(std::isfinite(init_noise) && init_noise >= 0.0,
        "optimizer init_noise must be >= 0");
  Check(min_extent > 0.0, "optimizer min_extent must be > 0");
  Check(rejitter_budget > 0, "optimizer rejitter_budget must be > 0");
}

ProposalSet GenerateProposals(const Scene& scene, const OptimizerConfig& cfg) {
  cfg.Validate();
  Rng rng(cfg.seed, Stream::kProposals);
  const std::vector<Box> gts = scene.boxes();
  ProposalSet out;
  for (std::size_t g = 0; g < gts.size(); ++g) {
    for (int k = 0; k < cfg.proposals_per_gt; ++k) {
      Box p = Jitter(rng, gts[g], cfg.init_noise);
      int tries = 1;
      while (SelectPositives(std::span<const Box>(&p, 1), gts).empty()) {
        if (++tries > cfg.rejitter_budget) {
          throw std::runtime_error(
              "proposal generation: no positive jitter of gt " +
              std::to_string(g) + " within " +
              std::to_string(cfg.rejitter_budget) + " draws (seed " +
              std::to_string(cfg.seed) + ")");
        }
        p = Jitter(rng, gts[g], cfg.init_noise);
        ++out.rejected_draws;
      }
      out.proposals.push_back(p);
      out.source_gt.push_back(g);
    }
  }
  out.assignment = Assign(out.proposals, gts);
  out.batch = GatherPositives(out.assignment, out.proposals, gts);
  return out;
}

Trajectory Optimize(const ProposalSet& proposals, const LossConfig& loss_cfg,
                    const OptimizerConfig& opt_cfg) {
  loss_cfg.Validate();
  opt_cfg.Validate();
  const PositiveBatch& batch = proposals.batch;
  if (batch.predicted.empty()) {
    throw std::invalid_argument("optimize: no positive proposals");
  }
  Trajectory traj;
  traj.initial = batch.predicted;
  traj.steps.reserve(static_cast<std::size_t>(opt_cfg.steps));
  std::vector<Box> boxes = batch.predicted;
  for (int step = 0; step < opt_cfg.steps; ++step) {
    const LossInputs in = WithPredicted(batch, boxes);
    StepRecord rec;
    rec.loss = TotalLoss(in, loss_cfg);
    const LossGradients grads = TotalLossGradient(in, loss_cfg);
    traj.hit_non_smooth = traj.hit_non_smooth || grads.non_smooth;
    bool finite = Finite(rec.loss);
    for (const BoxGradient& g : grads.per_box) {
      for (double c : g.components()) finite = finite && std::isfinite(c);
    }
    if (!finite) {
      throw std::runtime_error("optimize: non-finite loss or gradient at step " +
                               std::to_string(step));
    }
    for (std::size_t i = 0; i < boxes.size(); ++i) {
      boxes[i] = ApplyStep(boxes[i], grads.per_box[i], opt_cfg.learning_rate,
                           opt_cfg.min_extent);
    }
    rec.boxes = boxes;
    traj.steps.push_back(std::move(rec));
  }
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    traj.final_detections.push_back(
        Detection::Make(boxes[i], IoU(boxes[i], batch.targets[i])));
  }
  return traj;
}

std::vector<double> DefaultNmsThresholds() {
  std::vector<double> out;
  for (int k = 0; k <= 8; ++k) out.push_back((30.0 + 5.0 * k) / 100.0);
  return out;
}

std::vector<SweepPoint> NmsSensitivitySweep(std::span<const Detection> dets,
                                            std::span<const double> thresholds,
                                            const Scene& scene) {
  if (!std::is_sorted(thresholds.begin(), thresholds.end())) {
    throw std::invalid_argument("NMS thresholds must be ascending");
  }
  std::vector<SweepPoint> out;
  for (double t : thresholds) {
    const std::vector<Detection> kept = GreedyNms(dets, t);
    const ImageMatching m = MatchDetections(kept, scene.gts, kMatchIoU);
    SweepPoint pt{t, 0, 0};
    for (MatchStatus s : m.status) {
      if (s == MatchStatus::kTruePositive) ++pt.detected;
      if (s == MatchStatus::kFalsePositive) ++pt.false_positives;
    }
    out.push_back(pt);
  }
  return out;
}

double Variance(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return ss / static_cast<double>(xs.size());
}

RunSummary Summarize(const Scene& scene, const ProposalSet& proposals,
                     const Trajectory& trajectory, const LossConfig& loss_cfg,
                     std::span<const double> nms_thresholds) {
  const PositiveBatch& batch = proposals.batch;
  const std::vector<Box>& boxes = trajectory.final_boxes();
  RunSummary s;

  double iog_sum = 0.0;
  std::size_t iog_n = 0;
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    if (!batch.rep_targets[i]) continue;
    iog_sum += IoG(boxes[i], *batch.rep_targets[i]);
    ++iog_n;
  }
  s.mean_rep_iog = iog_n ? iog_sum / static_cast<double>(iog_n) : 0.0;

  double iou_sum = 0.0;
  std::size_t iou_n = 0;
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    for (std::size_t j = i + 1; j < boxes.size(); ++j) {
      if (batch.partition[i] == batch.partition[j]) continue;
      iou_sum += IoU(boxes[i], boxes[j]);
      ++iou_n;
    }
  }
  s.mean_cross_iou = iou_n ? iou_sum / static_cast<double>(iou_n) : 0.0;

  const double ref = kSweepReferenceNms;
  const auto at_ref = NmsSensitivitySweep(
      trajectory.final_detections, std::span<const double>(&ref, 1), scene);
  s.missed_after_nms = scene.gts.size() - at_ref.front().detected;

  s.sweep = NmsSensitivitySweep(trajectory.final_detections, nms_thresholds,
                                scene);
  std::vector<double> detected;
  for (const SweepPoint& p : s.sweep) {
    detected.push_back(static_cast<double>(p.detected));
  }
  s.detected_variance = Variance(detected);

  const LossInputs in = WithPredicted(batch, boxes);
  s.final_loss = TotalLoss(in, loss_cfg);
  return s;
}

SimulationRun Simulate(const SceneConfig& scene_cfg, const LossConfig& loss_cfg,
                       const OptimizerConfig& opt_cfg,
                       std::span<const double> nms_thresholds) {
  SimulationRun run;
  run.scene = GenerateScene(scene_cfg);
  run.proposals = GenerateProposals(run.scene, opt_cfg);
  run.trajectory = Optimize(run.proposals, loss_cfg, opt_cfg);
  run.summary =
      Summarize(run.scene, run.proposals, run.trajectory, loss_cfg,
                nms_thresholds);
  return run;
}

}  // namespace repulse
