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

#include "repulse/evaluation.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "gtest/gtest.h"
#include "repulse/random.h"
#include "test_util.h"

namespace repulse {
namespace {

Annotation Ann(const std::string& id, const Box& box,
               std::optional<Box> visible = std::nullopt,
               bool ignore = false) {
  Annotation a{id, box, visible, ignore, true};
  return a;
}

Detection Det(const Box& b, double s) { return Detection::Make(b, s); }

// Miss rate at each reference point, looked up by hand rather than through
// the library's sampler.
double GeometricMeanAtRefs(const std::vector<CurvePoint>& curve) {
  double log_sum = 0.0;
  for (int k = 0; k < 9; ++k) {
    const double ref = std::pow(10.0, -2.0 + 0.25 * k);
    double miss = 1.0;
    for (const CurvePoint& p : curve) {
      if (p.fppi <= ref) miss = p.miss_rate;  // curve sorted by fppi
    }
    log_sum += std::log(std::max(miss, 1e-10));
  }
  return std::exp(log_sum / 9.0);
}

TEST(OcclusionRatioTest, Examples) {
  const Box full(0, 0, 2, 4);
  EXPECT_EQ(OcclusionRatio(Ann("a", full, full)), 0.0);
  EXPECT_EQ(OcclusionRatio(Ann("a", full, Box(0, 0, 2, 2))), 0.5);
  EXPECT_EQ(OcclusionRatio(Ann("a", full)), 0.0);
  EXPECT_THROW(OcclusionRatio(Ann("a", Box(0, 0, 0, 1))),
               std::invalid_argument);
}

TEST(SubsetTest, Examples) {
  // Fully visible, touching neighbours: not crowd.
  const std::vector<Annotation> visible{Ann("a", Box(0, 0, 2, 4)),
                                        Ann("b", Box(1, 0, 2, 4))};
  EXPECT_TRUE(OcclusionSubset(visible, SubsetSpec::Named("crowd")).empty());

  const std::vector<Annotation> isolated{
      Ann("a", Box(0, 0, 2, 4), Box(0, 0, 2, 2)),
      Ann("b", Box(20, 0, 2, 4))};
  EXPECT_TRUE(OcclusionSubset(isolated, SubsetSpec::Named("crowd")).empty());

  // Mutual IoU = 4 / 12 = 1/3, both 20% occluded.
  const std::vector<Annotation> pair{
      Ann("a", Box(0, 0, 2, 4), Box(0, 0, 2, 3.2)),
      Ann("b", Box(1, 0, 2, 4), Box(1, 0.8, 2, 3.2))};
  EXPECT_NEAR(IoU(pair[0].box, pair[1].box), 1.0 / 3.0, 1e-15);
  EXPECT_EQ(OcclusionSubset(pair, SubsetSpec::Named("crowd")).size(), 2u);
}

TEST(SubsetTest, BandBoundaries) {
  const Box full(0, 0, 1, 20);
  const Annotation at_10 = Ann("a", full, Box(0, 0, 1, 18));  // occ 0.1
  const Annotation at_35 = Ann("b", full, Box(0, 0, 1, 13));  // occ 0.35
  ASSERT_EQ(OcclusionRatio(at_10), 0.1);
  ASSERT_EQ(OcclusionRatio(at_35), 0.35);
  auto in = [](const Annotation& a, const char* name) {
    const std::vector<Annotation> v{a};
    return OcclusionSubset(v, SubsetSpec::Named(name)).size() == 1;
  };
  EXPECT_TRUE(in(at_10, "bare"));
  EXPECT_TRUE(in(at_10, "occ"));
  EXPECT_FALSE(in(at_10, "partial"));
  EXPECT_TRUE(in(at_35, "partial"));
  EXPECT_TRUE(in(at_35, "reasonable"));
  EXPECT_FALSE(in(at_35, "heavy"));
  EXPECT_TRUE(in(Ann("c", full, Box(0, 0, 1, 12)), "heavy"));
}

TEST(SubsetTest, IgnoredExcludedAndNotNeighbours) {
  const std::vector<Annotation> anns{
      Ann("a", Box(0, 0, 2, 4), Box(0, 0, 2, 2)),
      Ann("b", Box(1, 0, 2, 4), std::nullopt, /*ignore=*/true)};
  EXPECT_TRUE(OcclusionSubset(anns, SubsetSpec::Named("crowd")).empty());
  EXPECT_EQ(OcclusionSubset(anns, SubsetSpec::Named("all")).size(), 1u);
  EXPECT_THROW(SubsetSpec::Named("nope"), std::invalid_argument);
}

TEST(MatchTest, Examples) {
  const std::vector<Annotation> gts{Ann("a", Box(0, 0, 2, 4)),
                                    Ann("b", Box(5, 0, 2, 4))};
  const std::vector<Detection> perfect{Det(gts[0].box, 0.9),
                                       Det(gts[1].box, 0.8)};
  const ImageMatching m = MatchDetections(perfect, gts);
  EXPECT_EQ(m.status[0], MatchStatus::kTruePositive);
  EXPECT_EQ(m.status[1], MatchStatus::kTruePositive);
  EXPECT_EQ(m.CountMissed(), 0u);

  const ImageMatching none = MatchDetections({}, gts);
  EXPECT_EQ(none.CountMissed(), 2u);

  // Two detections with IoU 0.6 against the same GT: 2.4 of width shifted
  // boxes, (0,0,2,4) vs (0.5,0,2,4) -> 6 / 10.
  const std::vector<Annotation> one{Ann("a", Box(0, 0, 2, 4))};
  const Box near(0.5, 0, 2, 4);
  ASSERT_NEAR(IoU(near, one[0].box), 0.6, 1e-15);
  const std::vector<Detection> two{Det(near, 0.8), Det(near, 0.9)};
  const ImageMatching g = MatchDetections(two, one);
  EXPECT_EQ(g.status[1], MatchStatus::kTruePositive);
  EXPECT_EQ(g.status[0], MatchStatus::kFalsePositive);
}

TEST(MatchTest, IgnoreRegions) {
  const std::vector<Annotation> gts{
      Ann("a", Box(0, 0, 2, 4)),
      Ann("crowd", Box(10, 0, 6, 4), std::nullopt, true)};
  const std::vector<Detection> d{Det(Box(10, 0, 6, 4), 0.9),
                                 Det(Box(30, 0, 2, 4), 0.5)};
  const ImageMatching m = MatchDetections(d, gts);
  EXPECT_EQ(m.status[0], MatchStatus::kIgnored);
  EXPECT_EQ(m.status[1], MatchStatus::kFalsePositive);
  EXPECT_EQ(m.num_gts, 1u);
  EXPECT_EQ(m.CountMissed(), 1u);
}

TEST(MatchTest, TiesFollowInputOrder) {
  const std::vector<Annotation> gts{Ann("a", Box(0, 0, 2, 4))};
  const std::vector<Detection> d{Det(Box(0.1, 0, 2, 4), 0.5),
                                 Det(Box(0, 0, 2, 4), 0.5)};
  const ImageMatching m = MatchDetections(d, gts);
  EXPECT_EQ(m.status[0], MatchStatus::kTruePositive);
  EXPECT_EQ(m.status[1], MatchStatus::kFalsePositive);
}

TEST(CurveTest, PerfectAndEmpty) {
  const std::vector<Annotation> gts{Ann("a", Box(0, 0, 2, 4))};
  const std::vector<Detection> perfect{Det(gts[0].box, 0.9)};
  const std::vector<ImageMatching> p{MatchDetections(perfect, gts)};
  const auto curve = FppiMissRateCurve(p);
  EXPECT_EQ(curve.front(), (CurvePoint{0.0, 0.0}));
  EXPECT_EQ(LogAverageMissRate(curve), 1e-10);

  const std::vector<ImageMatching> e{MatchDetections({}, gts)};
  const auto flat = FppiMissRateCurve(e);
  for (const CurvePoint& pt : flat) EXPECT_EQ(pt.miss_rate, 1.0);
  EXPECT_EQ(LogAverageMissRate(flat), 1.0);

  EXPECT_THROW(FppiMissRateCurve({}), std::invalid_argument);
}

TEST(CurveTest, TwoImageHandCount) {
  // Image 1: both people found plus one stray box. Image 2: one found, one
  // missed. Every detection scores above 0.5.
  const std::vector<Annotation> g1{Ann("a", Box(0, 0, 2, 4)),
                                   Ann("b", Box(5, 0, 2, 4))};
  const std::vector<Annotation> g2{Ann("c", Box(0, 0, 2, 4)),
                                   Ann("d", Box(5, 0, 2, 4))};
  const std::vector<Detection> d1{Det(Box(0, 0, 2, 4), 0.9),
                                  Det(Box(20, 0, 2, 4), 0.6),
                                  Det(Box(5, 0, 2, 4), 0.55)};
  const std::vector<Detection> d2{Det(Box(0, 0, 2, 4), 0.7)};
  const std::vector<ImageMatching> ms{MatchDetections(d1, g1),
                                      MatchDetections(d2, g2)};
  const auto ops = OperatingPoints(ms);
  const OperatingPoint& last = ops.back();
  EXPECT_EQ(last.score, 0.55);
  EXPECT_EQ(last.true_positives, 3u);
  EXPECT_EQ(last.false_positives, 1u);
  const auto curve = FppiMissRateCurve(ms);
  EXPECT_EQ(curve.back(), (CurvePoint{0.5, 0.25}));
}

TEST(MissRateTest, ReferencePoints) {
  const auto refs = MissRateReferencePoints();
  ASSERT_EQ(refs.size(), 9u);
  EXPECT_NEAR(refs.front(), 0.01, 1e-18);
  EXPECT_NEAR(refs.back(), 1.0, 1e-15);
}

TEST(MissRateTest, Constants) {
  const std::vector<CurvePoint> ones{{0.0, 1.0}, {2.0, 1.0}};
  EXPECT_EQ(LogAverageMissRate(ones), 1.0);
  const std::vector<CurvePoint> half{{0.0, 0.5}, {5.0, 0.5}};
  EXPECT_NEAR(LogAverageMissRate(half), 0.5, 1e-15);
}

TEST(MissRateTest, StepCurves) {
  // Step between the 10^-1 and 10^-0.75 reference points: four of the nine
  // points see 0.25.
  const std::vector<CurvePoint> step{{0.0, 1.0}, {0.15, 0.25}};
  EXPECT_NEAR(LogAverageMissRate(step), std::pow(0.25, 4.0 / 9.0), 1e-12);
  EXPECT_NEAR(LogAverageMissRate(step), 0.540, 1e-3);
  EXPECT_NEAR(LogAverageMissRate(step), GeometricMeanAtRefs(step), 1e-12);
  // A step exactly at 10^-1 also covers that reference point.
  const std::vector<CurvePoint> at_tenth{{0.0, 1.0}, {0.1, 0.25}};
  EXPECT_NEAR(LogAverageMissRate(at_tenth), std::pow(0.25, 5.0 / 9.0), 1e-12);
}

TEST(MissRateTest, DominanceAndAgreementWithOracle) {
  Rng rng(51, Stream::kTest);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<CurvePoint> a;
    double fppi = 0.0, miss = 1.0;
    const auto n = rng.UniformInt(1, 12);
    for (std::int64_t i = 0; i < n; ++i) {
      a.push_back({fppi, miss});
      fppi += std::pow(10.0, rng.Uniform(-3, 0));
      miss *= rng.Uniform(0.3, 1.0);
    }
    std::vector<CurvePoint> b = a;
    for (CurvePoint& p : b) p.miss_rate *= rng.Uniform(0.5, 1.0);
    ASSERT_NEAR(LogAverageMissRate(a), GeometricMeanAtRefs(a), 1e-12);
    ASSERT_LE(LogAverageMissRate(b), LogAverageMissRate(a) + 1e-15);
  }
}

TEST(TaxonomyTest, BoundaryFixtures) {
  const std::vector<Annotation> gts{Ann("a", Box(0, 0, 2, 4)),
                                    Ann("b", Box(2, 0, 2, 4))};
  auto classify = [&](const Box& fp) {
    const std::vector<Box> v{fp};
    return ClassifyFalsePositives(v, gts);
  };
  EXPECT_EQ(classify(Box(50, 50, 1, 1)).background, 1u);
  // IoU 0.3 with a only, by a vertical shift: 2h / (16 - 2h) = 0.3 gives
  // h = 4.8 / 2.6.
  const double h = 4.8 / 2.6;
  const Box loc(0, 4 - h, 2, 4);
  ASSERT_NEAR(IoU(loc, gts[0].box), 0.3, 1e-12);
  ASSERT_EQ(IoU(loc, gts[1].box), 0.0);
  EXPECT_EQ(classify(loc).localization, 1u);
  // A box straddling both GTs equally.
  const Box span(1, 0, 2, 4);
  EXPECT_NEAR(IoU(span, gts[0].box), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(IoU(span, gts[1].box), 1.0 / 3.0, 1e-15);
  EXPECT_EQ(classify(span).crowd, 1u);
}

TEST(TaxonomyTest, ThresholdIsInclusive) {
  const std::vector<Annotation> gts{Ann("wide", Box(0, 0, 10, 1))};
  const std::vector<Box> exactly{Box(0, 0, 1, 1)};
  ASSERT_EQ(IoU(exactly[0], gts[0].box), 0.1);
  EXPECT_EQ(ClassifyFalsePositives(exactly, gts).localization, 1u);
  const std::vector<Box> below{Box(0, 0, 0.99, 1)};
  EXPECT_EQ(ClassifyFalsePositives(below, gts).background, 1u);
}

TEST(TaxonomyTest, IgnoredGtsDoNotCount) {
  const std::vector<Annotation> gts{
      Ann("a", Box(0, 0, 2, 4)),
      Ann("b", Box(2, 0, 2, 4), std::nullopt, true)};
  const std::vector<Box> span{Box(1, 0, 2, 4)};
  EXPECT_EQ(ClassifyFalsePositives(span, gts).localization, 1u);
}

TEST(MissedByScoreTest, Examples) {
  const std::vector<Annotation> gts{
      Ann("a", Box(0, 0, 2, 4), Box(0, 0, 2, 3)),
      Ann("b", Box(1, 0, 2, 4), Box(1, 1, 2, 3))};
  const SubsetSpec crowd = SubsetSpec::Named("crowd");
  const std::vector<Detection> d{Det(gts[0].box, 0.9), Det(gts[1].box, 0.7)};
  const std::vector<double> grid{0.0, 0.6, 0.8, 1.5};
  const auto m = MissedByScore(d, gts, crowd, 0.5, grid);
  ASSERT_EQ(m.size(), 4u);
  EXPECT_EQ(m[0].missed, 0u);
  EXPECT_EQ(m[1].missed, 0u);
  EXPECT_EQ(m[2].missed, 1u);
  EXPECT_EQ(m[3].missed, 2u);
  const std::vector<double> unsorted{0.5, 0.1};
  EXPECT_THROW(MissedByScore(d, gts, crowd, 0.5, unsorted),
               std::invalid_argument);
}

TEST(EvaluationProperty, CountsBalanceOnRandomScenes) {
  Rng rng(52, Stream::kTest);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<Annotation> gts;
    const auto ng = rng.UniformInt(0, 6);
    for (std::int64_t i = 0; i < ng; ++i) {
      const Box b = testing::RandomBox(rng, 8, 1, 3);
      gts.push_back(Ann(std::to_string(i), b, std::nullopt,
                        rng.Uniform() < 0.15));
    }
    std::vector<Detection> dets;
    const auto nd = rng.UniformInt(0, 10);
    for (std::int64_t i = 0; i < nd; ++i) {
      Box b = testing::RandomBox(rng, 8, 1, 3);
      if (!gts.empty() && rng.Uniform() < 0.6) {
        const Box& g =
            gts[static_cast<std::size_t>(rng.UniformInt(0, ng - 1))].box;
        b = Box(g.left() + 0.3 * rng.Normal(), g.top() + 0.3 * rng.Normal(),
                g.width(), g.height());
      }
      dets.push_back(Det(b, rng.Uniform()));
    }
    const ImageMatching m = MatchDetections(dets, gts);
    for (double s : {0.0, 0.25, 0.5, 0.75}) {
      std::size_t tp = 0, fp = 0, ign = 0, above = 0;
      std::vector<bool> matched(gts.size(), false);
      for (std::size_t d = 0; d < dets.size(); ++d) {
        if (dets[d].score < s) continue;
        ++above;
        switch (m.status[d]) {
          case MatchStatus::kTruePositive:
            ++tp;
            matched[*m.matched_gt[d]] = true;
            break;
          case MatchStatus::kFalsePositive:
            ++fp;
            break;
          case MatchStatus::kIgnored:
            ++ign;
            break;
        }
      }
      ASSERT_EQ(tp + fp + ign, above);
      std::size_t missed = 0;
      for (std::size_t g = 0; g < gts.size(); ++g) {
        if (!gts[g].ignore && !matched[g]) ++missed;
      }
      ASSERT_EQ(tp + missed, m.num_gts);
    }
    std::vector<Box> fps;
    for (std::size_t d = 0; d < dets.size(); ++d) {
      if (m.status[d] == MatchStatus::kFalsePositive) fps.push_back(dets[d].box);
    }
    ASSERT_EQ(ClassifyFalsePositives(fps, gts).total(), fps.size());

    if (m.num_gts > 0) {
      const std::vector<ImageMatching> ms{m};
      const auto curve = FppiMissRateCurve(ms);
      for (std::size_t i = 1; i < curve.size(); ++i) {
        ASSERT_GT(curve[i].fppi, curve[i - 1].fppi);
        ASSERT_LE(curve[i].miss_rate, curve[i - 1].miss_rate);
      }
      const double mr2 = LogAverageMissRate(curve);
      ASSERT_GE(mr2, 0.0);
      ASSERT_LE(mr2, 1.0);
    }
  }
}

TEST(EvaluateTest, OutOfSubsetAnnotationsAreNotMissed) {
  EvalImage img;
  img.image_id = "x";
  img.annotations = {Ann("vis", Box(0, 0, 2, 4)),
                     Ann("heavy", Box(5, 0, 2, 4), Box(5, 0, 2, 1))};
  img.detections = {Det(Box(0, 0, 2, 4), 0.9), Det(Box(5, 0, 2, 4), 0.8)};
  const std::vector<EvalImage> imgs{img};
  const std::vector<double> grid{0.0};
  const EvalReport r =
      Evaluate(imgs, SubsetSpec::Named("reasonable"), 0.5, grid);
  EXPECT_EQ(r.num_gts, 1u);
  // The detection on the heavy person is neither TP nor FP.
  EXPECT_EQ(r.fp_taxonomy.total(), 0u);
  EXPECT_EQ(r.missed_by_score[0].missed, 0u);
  EXPECT_EQ(r.mr2, 1e-10);
}

TEST(CrowdFpByScoreTest, CountsFallWithScore) {
  EvalImage img;
  img.image_id = "x";
  img.annotations = {Ann("a", Box(0, 0, 2, 4)), Ann("b", Box(2, 0, 2, 4))};
  img.detections = {Det(Box(1, 0, 2, 4), 0.6), Det(Box(0, 0, 2, 4), 0.9),
                    Det(Box(2, 0, 2, 4), 0.8)};
  const std::vector<EvalImage> imgs{img};
  const std::vector<double> grid{0.5, 0.7};
  const auto pts = CrowdFpByScore(imgs, SubsetSpec::Named("all"), 0.5, grid);
  ASSERT_EQ(pts.size(), 2u);
  EXPECT_EQ(pts[0].taxonomy.crowd, 1u);
  EXPECT_EQ(pts[1].taxonomy.crowd, 0u);
  EXPECT_EQ(pts[0].taxonomy.crowd_proportion(), 1.0);
}

}  // namespace
}  // namespace repulse
