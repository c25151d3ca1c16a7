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

#include <cmath>
#include <stdexcept>
#include <vector>

#include "gtest/gtest.h"

namespace repulse {
namespace {

LossConfig AttractionOnly() {
  LossConfig c;
  c.alpha = 0.0;
  c.beta = 0.0;
  return c;
}

SceneConfig TwoGtScene(std::uint64_t seed) {
  SceneConfig c;
  c.num_gts = 2;
  c.seed = seed;
  return c;
}

TEST(SceneTest, SingleGtIsUnoccluded) {
  SceneConfig c;
  c.num_gts = 1;
  c.seed = 3;
  const Scene s = GenerateScene(c);
  ASSERT_EQ(s.gts.size(), 1u);
  EXPECT_EQ(OcclusionRatio(s.gts[0]), 0.0);
}

TEST(SceneTest, NeighbourOverlapInRange) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    SceneConfig c = TwoGtScene(seed);
    c.overlap_min = 0.3;
    c.overlap_max = 0.4;
    c.num_gts = 2 + static_cast<int>(seed % 3);
    const Scene s = GenerateScene(c);
    ASSERT_EQ(s.gts.size(), static_cast<std::size_t>(c.num_gts));
    for (std::size_t i = 1; i < s.gts.size(); ++i) {
      const double v = IoU(s.gts[i].box, s.gts[i - 1].box);
      ASSERT_GE(v, 0.3);
      ASSERT_LE(v, 0.4);
    }
    for (const Annotation& a : s.gts) {
      ASSERT_GE(a.box.left(), 0.0);
      ASSERT_LE(a.box.right(), c.extent_width);
    }
  }
}

TEST(SceneTest, LaterGtsOccludeEarlier) {
  const Scene s = GenerateScene(TwoGtScene(5));
  EXPECT_GT(OcclusionRatio(s.gts[0]), 0.0);
  EXPECT_EQ(OcclusionRatio(s.gts[1]), 0.0);
  // The visible part lies inside the box and clear of the occluder.
  EXPECT_EQ(IntersectionArea(*s.gts[0].visible_box, s.gts[1].box), 0.0);
  EXPECT_NEAR(IntersectionArea(*s.gts[0].visible_box, s.gts[0].box),
              Area(*s.gts[0].visible_box), 1e-12);
}

TEST(SceneTest, Deterministic) {
  const Scene a = GenerateScene(TwoGtScene(17));
  const Scene b = GenerateScene(TwoGtScene(17));
  const Scene c = GenerateScene(TwoGtScene(18));
  EXPECT_EQ(a.boxes(), b.boxes());
  EXPECT_NE(a.boxes(), c.boxes());
}

TEST(SceneTest, ImpossibleRangeFailsWithDiagnostic) {
  SceneConfig c = TwoGtScene(1);
  c.num_gts = 3;
  c.overlap_min = 0.95;
  c.overlap_max = 0.96;
  c.size_min = 1.0;
  c.size_max = 1.0;
  c.max_attempts = 50;
  try {
    GenerateScene(c);
    FAIL() << "expected failure";
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("attempts"), std::string::npos);
  }
  c.overlap_max = 1.5;
  EXPECT_THROW(GenerateScene(c), std::invalid_argument);
}

TEST(ProposalTest, ZeroNoiseCopiesGts) {
  const Scene s = GenerateScene(TwoGtScene(2));
  OptimizerConfig o;
  o.init_noise = 0.0;
  o.proposals_per_gt = 3;
  const ProposalSet p = GenerateProposals(s, o);
  ASSERT_EQ(p.proposals.size(), 6u);
  for (std::size_t i = 0; i < p.proposals.size(); ++i) {
    EXPECT_EQ(p.proposals[i], s.gts[p.source_gt[i]].box);
    EXPECT_EQ(p.assignment.target_of.at(i), p.source_gt[i]);
  }
}

TEST(ProposalTest, Deterministic) {
  const Scene s = GenerateScene(TwoGtScene(4));
  OptimizerConfig o;
  o.seed = 9;
  EXPECT_EQ(GenerateProposals(s, o).proposals,
            GenerateProposals(s, o).proposals);
}

TEST(ProposalTest, TwentyPercentNoiseIsPositive) {
  OptimizerConfig o;
  o.init_noise = 0.2;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const Scene s = GenerateScene(TwoGtScene(seed));
    o.seed = seed;
    const ProposalSet p = GenerateProposals(s, o);
    ASSERT_EQ(p.assignment.positive_indices.size(), p.proposals.size());
  }
}

TEST(ProposalTest, RedrawBudgetExhaustion) {
  const Scene s = GenerateScene(TwoGtScene(1));
  OptimizerConfig o;
  o.init_noise = 5.0;
  o.rejitter_budget = 1;
  EXPECT_THROW(GenerateProposals(s, o), std::runtime_error);
}

TEST(OptimizeTest, SingleGtConverges) {
  SceneConfig sc;
  sc.num_gts = 1;
  OptimizerConfig o;
  o.proposals_per_gt = 1;
  o.learning_rate = 0.1;
  o.steps = 500;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    sc.seed = seed;
    o.seed = seed;
    const Scene s = GenerateScene(sc);
    const ProposalSet p = GenerateProposals(s, o);
    const Trajectory t = Optimize(p, AttractionOnly(), o);
    ASSERT_EQ(t.steps.size(), 500u);
    EXPECT_GT(IoU(t.final_boxes()[0], s.gts[0].box), 0.99);
  }
}

TEST(OptimizeTest, ImmobileAtMinimum) {
  const Scene s = GenerateScene(TwoGtScene(6));
  OptimizerConfig o;
  o.init_noise = 0.0;
  o.steps = 20;
  const ProposalSet p = GenerateProposals(s, o);
  const Trajectory t = Optimize(p, AttractionOnly(), o);
  for (const StepRecord& r : t.steps) {
    EXPECT_EQ(r.loss.total, 0.0);
    EXPECT_EQ(r.boxes, t.initial);
  }
}

TEST(OptimizeTest, AttractionLossNonIncreasing) {
  OptimizerConfig o;
  o.learning_rate = 0.05;
  o.steps = 200;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    o.seed = seed;
    const Scene s = GenerateScene(TwoGtScene(seed));
    const Trajectory t = Optimize(GenerateProposals(s, o), AttractionOnly(), o);
    for (std::size_t i = 1; i < t.steps.size(); ++i) {
      ASSERT_LE(t.steps[i].loss.total, t.steps[i - 1].loss.total + 1e-15)
          << "seed " << seed << " step " << i;
    }
  }
}

TEST(OptimizeTest, RepGtStepReducesIoG) {
  LossConfig cfg;
  cfg.alpha = 1.0;
  cfg.beta = 0.0;
  // Attraction is disabled by starting each box on its target.
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Scene s = GenerateScene(TwoGtScene(seed));
    OptimizerConfig o;
    o.init_noise = 0.0;
    o.proposals_per_gt = 1;
    o.steps = 1;
    o.learning_rate = 0.01;
    const ProposalSet p = GenerateProposals(s, o);
    const Trajectory t = Optimize(p, cfg, o);
    for (std::size_t i = 0; i < t.initial.size(); ++i) {
      const Box& rep = *p.batch.rep_targets[i];
      const double before = IoG(t.initial[i], rep);
      if (before == 1.0) {
        // The box swallows the other person: IoG sits on a plateau and the
        // clamped log has no slope, so the step cannot move it.
        ASSERT_EQ(IoG(t.final_boxes()[i], rep), 1.0);
        continue;
      }
      ASSERT_GT(before, 0.0);
      ASSERT_LT(IoG(t.final_boxes()[i], rep), before);
    }
  }
}

TEST(OptimizeTest, RepGtLowersFinalIoGOnAverage) {
  double base = 0.0, rep = 0.0;
  LossConfig with_rep;
  with_rep.alpha = 0.5;
  with_rep.beta = 0.0;
  with_rep.sigma_gt = 1.0;
  const auto thresholds = DefaultNmsThresholds();
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    OptimizerConfig o;
    o.seed = seed;
    base += Simulate(TwoGtScene(seed), AttractionOnly(), o, thresholds)
                .summary.mean_rep_iog;
    rep += Simulate(TwoGtScene(seed), with_rep, o, thresholds)
               .summary.mean_rep_iog;
  }
  EXPECT_LT(rep, base);
}

TEST(OptimizeTest, RepBoxSeparatesGroups) {
  LossConfig with_box;
  with_box.alpha = 0.0;
  with_box.beta = 0.5;
  with_box.sigma_box = 0.0;
  const auto thresholds = DefaultNmsThresholds();
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    OptimizerConfig o;
    o.seed = seed;
    const double base =
        Simulate(TwoGtScene(seed), AttractionOnly(), o, thresholds)
            .summary.mean_cross_iou;
    const double box = Simulate(TwoGtScene(seed), with_box, o, thresholds)
                           .summary.mean_cross_iou;
    EXPECT_LT(box, base) << seed;
  }
}

TEST(SweepTest, ThresholdExtremes) {
  Scene s;
  s.gts = {Annotation{"a", Box(0, 0, 2, 4), std::nullopt, false, true},
           Annotation{"b", Box(1, 0, 2, 4), std::nullopt, false, true}};
  const std::vector<Detection> d{Detection::Make(Box(0, 0, 2, 4), 0.9),
                                 Detection::Make(Box(1, 0, 2, 4), 0.8),
                                 Detection::Make(Box(0.5, 0, 2, 4), 0.7)};
  const std::vector<double> thr{0.0, 1.0};
  const auto pts = NmsSensitivitySweep(d, thr, s);
  // Everything overlaps, so threshold 0 keeps one box.
  EXPECT_EQ(pts[0].detected + pts[0].false_positives, 1u);
  // Threshold 1 keeps all; plain matching gives two hits and one stray.
  const ImageMatching m = MatchDetections(d, s.gts, 0.5);
  std::size_t tp = 0;
  for (MatchStatus st : m.status) tp += st == MatchStatus::kTruePositive;
  EXPECT_EQ(pts[1].detected, tp);
  EXPECT_EQ(pts[1].detected + pts[1].false_positives, 3u);
  const std::vector<double> bad{0.5, 0.3};
  EXPECT_THROW(NmsSensitivitySweep(d, bad, s), std::invalid_argument);
}

TEST(SweepTest, DefaultThresholds) {
  const auto t = DefaultNmsThresholds();
  ASSERT_EQ(t.size(), 9u);
  EXPECT_EQ(t.front(), 0.3);
  EXPECT_EQ(t[1], 0.35);
  EXPECT_EQ(t.back(), 0.7);
}

TEST(SimulateTest, BitIdenticalAcrossRuns) {
  LossConfig cfg;
  OptimizerConfig o;
  o.seed = 12;
  const auto thresholds = DefaultNmsThresholds();
  const SimulationRun a = Simulate(TwoGtScene(12), cfg, o, thresholds);
  const SimulationRun b = Simulate(TwoGtScene(12), cfg, o, thresholds);
  ASSERT_EQ(a.trajectory.steps.size(), b.trajectory.steps.size());
  for (std::size_t i = 0; i < a.trajectory.steps.size(); ++i) {
    ASSERT_EQ(a.trajectory.steps[i].boxes, b.trajectory.steps[i].boxes);
    ASSERT_EQ(a.trajectory.steps[i].loss.total,
              b.trajectory.steps[i].loss.total);
  }
  EXPECT_EQ(a.trajectory.final_detections, b.trajectory.final_detections);
  EXPECT_EQ(a.summary.detected_variance, b.summary.detected_variance);
}

TEST(VarianceTest, Population) {
  const std::vector<double> xs{1, 2, 3, 4};
  EXPECT_DOUBLE_EQ(Variance(xs), 1.25);
  EXPECT_EQ(Variance({}), 0.0);
}

}  // namespace
}  // namespace repulse
