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

#include "repulse/gradcheck.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "repulse/random.h"
#include "repulse/simulator.h"

namespace repulse {

namespace {

Box WithCoord(const Box& b, int k, double v) {
  auto c = b.coords();
  c[static_cast<std::size_t>(k)] = v;
  return Box(c[0], c[1], c[2], c[3]);
}

Box Perturb(Rng& rng, const Box& b, double scale) {
  return Box(b.left() + scale * b.width() * rng.Normal(),
             b.top() + scale * b.height() * rng.Normal(),
             b.width() * std::max(0.2, 1.0 + scale * rng.Normal()),
             b.height() * std::max(0.2, 1.0 + scale * rng.Normal()));
}

}  // namespace

double RelativeError(double a, double b, double floor) {
  const double denom = std::max({std::abs(a), std::abs(b), floor});
  return std::abs(a - b) / denom;
}

std::vector<double> FiniteDifferenceGradient(const LossInputs& in,
                                             const LossConfig& cfg,
                                             double step) {
  std::vector<Box> work(in.predicted.begin(), in.predicted.end());
  LossInputs probe = in;
  probe.predicted = work;
  std::vector<double> out;
  out.reserve(4 * work.size());
  for (std::size_t i = 0; i < work.size(); ++i) {
    const Box orig = work[i];
    const auto c = orig.coords();
    for (int k = 0; k < 4; ++k) {
      work[i] = WithCoord(orig, k, c[static_cast<std::size_t>(k)] + step);
      const double plus = TotalLoss(probe, cfg).total;
      work[i] = WithCoord(orig, k, c[static_cast<std::size_t>(k)] - step);
      const double minus = TotalLoss(probe, cfg).total;
      out.push_back((plus - minus) / (2.0 * step));
    }
    work[i] = orig;
  }
  return out;
}

GradCheckScene RandomGradCheckScene(std::uint64_t seed,
                                    const GradCheckConfig& cfg) {
  Rng rng(seed, Stream::kGradCheck);
  SceneConfig scene_cfg;
  scene_cfg.num_gts =
      static_cast<int>(rng.UniformInt(cfg.min_gts, cfg.max_gts));
  scene_cfg.overlap_min = 0.1;
  scene_cfg.overlap_max = 0.6;
  scene_cfg.size_min = 1.0;
  scene_cfg.size_max = 2.0;
  scene_cfg.extent_width = 16.0;
  scene_cfg.extent_height = 8.0;
  scene_cfg.seed = rng.NextU64();
  GradCheckScene out;
  out.gts = GenerateScene(scene_cfg).boxes();

  const auto n =
      static_cast<int>(rng.UniformInt(cfg.min_proposals, cfg.max_proposals));
  for (int i = 0; i < n; ++i) {
    const auto src = static_cast<std::size_t>(
        rng.UniformInt(0, static_cast<std::int64_t>(out.gts.size()) - 1));
    Box p = Perturb(rng, out.gts[src], 0.1);
    while (SelectPositives(std::span<const Box>(&p, 1), out.gts).empty()) {
      p = Perturb(rng, out.gts[src], 0.1);
    }
    out.proposals.push_back(p);
  }
  out.assignment = Assign(out.proposals, out.gts);
  // Predictions drift from their proposals so every loss term is active.
  std::vector<Box> predicted;
  for (const Box& p : out.proposals) predicted.push_back(Perturb(rng, p, 0.15));
  out.batch = GatherPositives(out.assignment, predicted, out.gts);
  return out;
}

GradCheckReport RunGradCheck(const GradCheckConfig& cfg) {
  if (cfg.scenes <= 0) throw std::invalid_argument("grad-check needs scenes > 0");
  cfg.loss.Validate();
  GradCheckReport report;
  Rng seeds(cfg.seed, Stream::kGradCheck);
  const int max_draws = 10 * cfg.scenes;
  while (report.checked < cfg.scenes && report.scenes < max_draws) {
    ++report.scenes;
    const GradCheckScene scene = RandomGradCheckScene(seeds.NextU64(), cfg);
    const LossInputs in = scene.batch.view();
    const LossGradients analytic = TotalLossGradient(in, cfg.loss);
    if (analytic.non_smooth ||
        SmoothnessMargin(in, cfg.loss) < cfg.kink_tolerance) {
      ++report.flagged;
      continue;
    }
    ++report.checked;
    const std::vector<double> numeric =
        FiniteDifferenceGradient(in, cfg.loss, cfg.step);
    for (std::size_t i = 0; i < analytic.per_box.size(); ++i) {
      const auto a = analytic.per_box[i].components();
      for (std::size_t k = 0; k < 4; ++k) {
        report.max_rel_error =
            std::max(report.max_rel_error,
                     RelativeError(a[k], numeric[4 * i + k],
                                   cfg.relative_floor));
        ++report.components;
      }
    }
  }
  report.passed =
      report.checked == cfg.scenes && report.max_rel_error <= cfg.tolerance;
  return report;
}

}  // namespace repulse
