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
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace repulse {

namespace {

constexpr double kMissRateFloor = 1e-10;
constexpr int kNumReferencePoints = 9;

struct ScoredStatus {
  double score;
  MatchStatus status;
};

}  // namespace

void SubsetSpec::Validate() const {
  if (!(occ_min >= 0.0 && occ_min <= occ_max && occ_max <= 1.0)) {
    throw std::invalid_argument("subset requires 0 <= occ_min <= occ_max <= 1");
  }
  if (crowd_iou_min && !(*crowd_iou_min >= 0.0 && *crowd_iou_min <= 1.0)) {
    throw std::invalid_argument("subset crowd_iou_min must be in [0,1]");
  }
}

SubsetSpec SubsetSpec::Named(std::string_view name) {
  if (name == "reasonable") return {0.0, 0.35, false, std::nullopt};
  if (name == "occ") return {0.1, 1.0, false, std::nullopt};
  if (name == "crowd") return {0.1, 1.0, false, 0.1};
  if (name == "partial") return {0.1, 0.35, true, std::nullopt};
  if (name == "bare") return {0.0, 0.1, false, std::nullopt};
  if (name == "heavy") return {0.35, 1.0, true, std::nullopt};
  if (name == "all") return {0.0, 1.0, false, std::nullopt};
  throw std::invalid_argument("unknown subset '" + std::string(name) + "'");
}

double OcclusionRatio(const Annotation& a) {
  const double full = Area(a.box);
  if (full <= 0.0) {
    throw std::invalid_argument("occlusion ratio of zero-area annotation '" +
                                a.id + "'");
  }
  if (!a.visible_box) return 0.0;
  // Dividing the hidden area keeps band edges such as 0.1 exact for
  // visible fractions like 9/10.
  return std::clamp((full - Area(*a.visible_box)) / full, 0.0, 1.0);
}

std::vector<bool> SubsetMask(std::span<const Annotation> anns,
                             const SubsetSpec& spec) {
  spec.Validate();
  std::vector<bool> mask(anns.size(), false);
  for (std::size_t i = 0; i < anns.size(); ++i) {
    const Annotation& a = anns[i];
    if (a.ignore || !a.in_eval) continue;
    const double occ = OcclusionRatio(a);
    const bool above =
        spec.occ_min_exclusive ? occ > spec.occ_min : occ >= spec.occ_min;
    if (!above || occ > spec.occ_max) continue;
    if (spec.crowd_iou_min) {
      bool has_neighbor = false;
      for (std::size_t j = 0; j < anns.size() && !has_neighbor; ++j) {
        if (j == i || anns[j].ignore) continue;
        has_neighbor = IoU(a.box, anns[j].box) >= *spec.crowd_iou_min;
      }
      if (!has_neighbor) continue;
    }
    mask[i] = true;
  }
  return mask;
}

std::vector<Annotation> OcclusionSubset(std::span<const Annotation> anns,
                                        const SubsetSpec& spec) {
  const std::vector<bool> mask = SubsetMask(anns, spec);
  std::vector<Annotation> out;
  for (std::size_t i = 0; i < anns.size(); ++i) {
    if (mask[i]) out.push_back(anns[i]);
  }
  return out;
}

std::vector<Annotation> MaskToSubset(std::span<const Annotation> anns,
                                     const SubsetSpec& subset) {
  const std::vector<bool> mask = SubsetMask(anns, subset);
  std::vector<Annotation> out(anns.begin(), anns.end());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].ignore = !mask[i];
  }
  return out;
}

std::size_t ImageMatching::CountMissed() const {
  std::size_t missed = 0;
  for (std::size_t g = 0; g < gt_matched_by.size(); ++g) {
    if (!gt_ignored[g] && !gt_matched_by[g]) ++missed;
  }
  return missed;
}

ImageMatching MatchDetections(std::span<const Detection> dets,
                              std::span<const Annotation> gts,
                              double iou_threshold) {
  ImageMatching m;
  m.order.resize(dets.size());
  std::iota(m.order.begin(), m.order.end(), 0);
  std::stable_sort(m.order.begin(), m.order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return dets[a].score > dets[b].score;
                   });
  m.scores.reserve(dets.size());
  for (const Detection& d : dets) m.scores.push_back(d.score);
  m.status.assign(dets.size(), MatchStatus::kFalsePositive);
  m.matched_gt.assign(dets.size(), std::nullopt);
  m.gt_matched_by.assign(gts.size(), std::nullopt);
  m.gt_ignored.resize(gts.size());
  for (std::size_t g = 0; g < gts.size(); ++g) {
    m.gt_ignored[g] = gts[g].ignore;
    if (!gts[g].ignore) ++m.num_gts;
  }

  for (std::size_t d : m.order) {
    std::optional<std::size_t> best;
    double best_iou = iou_threshold;
    bool hits_ignore = false;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      const double v = IoU(dets[d].box, gts[g].box);
      if (gts[g].ignore) {
        hits_ignore = hits_ignore || v >= iou_threshold;
        continue;
      }
      if (m.gt_matched_by[g]) continue;
      if (v > best_iou || (v == best_iou && !best)) {
        best_iou = v;
        best = g;
      }
    }
    if (best) {
      m.status[d] = MatchStatus::kTruePositive;
      m.matched_gt[d] = best;
      m.gt_matched_by[*best] = d;
    } else if (hits_ignore) {
      m.status[d] = MatchStatus::kIgnored;
    }
  }
  return m;
}

std::vector<OperatingPoint> OperatingPoints(
    std::span<const ImageMatching> images) {
  std::vector<ScoredStatus> all;
  for (const ImageMatching& m : images) {
    for (std::size_t d : m.order) all.push_back({m.scores[d], m.status[d]});
  }
  std::stable_sort(all.begin(), all.end(),
                   [](const ScoredStatus& a, const ScoredStatus& b) {
                     return a.score > b.score;
                   });
  std::vector<OperatingPoint> points;
  points.push_back({std::numeric_limits<double>::infinity(), 0, 0, 0});
  OperatingPoint cur{};
  for (std::size_t i = 0; i < all.size(); ++i) {
    switch (all[i].status) {
      case MatchStatus::kTruePositive:
        ++cur.true_positives;
        break;
      case MatchStatus::kFalsePositive:
        ++cur.false_positives;
        break;
      case MatchStatus::kIgnored:
        ++cur.ignored;
        break;
    }
    if (i + 1 == all.size() || all[i + 1].score != all[i].score) {
      cur.score = all[i].score;
      points.push_back(cur);
    }
  }
  return points;
}

std::vector<CurvePoint> FppiMissRateCurve(
    std::span<const ImageMatching> images) {
  if (images.empty()) {
    throw std::invalid_argument("miss-rate curve needs at least one image");
  }
  std::size_t total_gts = 0;
  for (const ImageMatching& m : images) total_gts += m.num_gts;
  if (total_gts == 0) {
    throw std::invalid_argument("miss-rate curve needs at least one ground truth");
  }
  const double n_images = static_cast<double>(images.size());
  const double n_gts = static_cast<double>(total_gts);

  std::vector<CurvePoint> raw;
  for (const OperatingPoint& op : OperatingPoints(images)) {
    raw.push_back({static_cast<double>(op.false_positives) / n_images,
                   static_cast<double>(total_gts - op.true_positives) / n_gts});
  }
  std::stable_sort(raw.begin(), raw.end(),
                   [](const CurvePoint& a, const CurvePoint& b) {
                     return a.fppi < b.fppi;
                   });
  std::vector<CurvePoint> curve;
  for (const CurvePoint& p : raw) {
    if (!curve.empty() && curve.back().fppi == p.fppi) {
      curve.back().miss_rate = std::min(curve.back().miss_rate, p.miss_rate);
    } else {
      curve.push_back(p);
    }
  }
  for (std::size_t i = 1; i < curve.size(); ++i) {
    curve[i].miss_rate = std::min(curve[i].miss_rate, curve[i - 1].miss_rate);
  }
  return curve;
}

std::vector<double> MissRateReferencePoints() {
  std::vector<double> refs;
  for (int k = 0; k < kNumReferencePoints; ++k) {
    refs.push_back(std::pow(10.0, -2.0 + 0.25 * k));
  }
  return refs;
}

double LogAverageMissRate(std::span<const CurvePoint> curve) {
  if (curve.empty()) {
    throw std::invalid_argument("log-average miss rate of an empty curve");
  }
  std::vector<double> samples;
  for (double ref : MissRateReferencePoints()) {
    double miss = 1.0;
    double best_fppi = -1.0;
    for (const CurvePoint& p : curve) {
      if (p.fppi <= ref && p.fppi >= best_fppi) {
        best_fppi = p.fppi;
        miss = p.miss_rate;
      }
    }
    samples.push_back(std::max(miss, kMissRateFloor));
  }
  // exp(log(x)) need not round-trip, so a flat curve is returned as is.
  if (std::all_of(samples.begin(), samples.end(),
                  [&](double v) { return v == samples.front(); })) {
    return samples.front();
  }
  double log_sum = 0.0;
  for (double v : samples) log_sum += std::log(v);
  return std::exp(log_sum / kNumReferencePoints);
}

double FpTaxonomy::crowd_proportion() const {
  const std::size_t n = total();
  return n == 0 ? 0.0 : static_cast<double>(crowd) / static_cast<double>(n);
}

FpTaxonomy& FpTaxonomy::operator+=(const FpTaxonomy& o) {
  background += o.background;
  localization += o.localization;
  crowd += o.crowd;
  return *this;
}

FpTaxonomy ClassifyFalsePositives(std::span<const Box> fps,
                                  std::span<const Annotation> gts) {
  FpTaxonomy t;
  for (const Box& fp : fps) {
    std::size_t hits = 0;
    for (const Annotation& g : gts) {
      if (!g.ignore && IoU(fp, g.box) >= kFpOverlapIoU) ++hits;
    }
    if (hits == 0) {
      ++t.background;
    } else if (hits == 1) {
      ++t.localization;
    } else {
      ++t.crowd;
    }
  }
  return t;
}

namespace {

std::vector<Annotation> EvalGroundTruth(std::span<const Annotation> anns) {
  std::vector<Annotation> out(anns.begin(), anns.end());
  for (Annotation& a : out) a.ignore = a.ignore || !a.in_eval;
  return out;
}

void CheckGrid(std::span<const double> score_grid) {
  if (!std::is_sorted(score_grid.begin(), score_grid.end())) {
    throw std::invalid_argument("score grid must be ascending");
  }
}

}  // namespace

std::vector<MissedCount> MissedByScore(std::span<const Detection> dets,
                                       std::span<const Annotation> gts,
                                       const SubsetSpec& subset,
                                       double iou_threshold,
                                       std::span<const double> score_grid) {
  CheckGrid(score_grid);
  const std::vector<bool> member = SubsetMask(gts, subset);
  // Greedy matching visits detections by score, so the matching restricted
  // to detections scoring >= s is a prefix of the full matching.
  const ImageMatching m =
      MatchDetections(dets, EvalGroundTruth(gts), iou_threshold);
  std::vector<MissedCount> out;
  for (double s : score_grid) {
    std::size_t missed = 0;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (!member[g]) continue;
      const auto& by = m.gt_matched_by[g];
      if (!by || dets[*by].score < s) ++missed;
    }
    out.push_back({s, missed});
  }
  return out;
}

EvalReport Evaluate(std::span<const EvalImage> images,
                    const SubsetSpec& subset, double iou_threshold,
                    std::span<const double> score_grid) {
  CheckGrid(score_grid);
  EvalReport report;
  report.num_images = images.size();
  std::vector<ImageMatching> matchings;
  matchings.reserve(images.size());
  for (double s : score_grid) report.missed_by_score.push_back({s, 0});

  for (const EvalImage& img : images) {
    const std::vector<Annotation> masked =
        MaskToSubset(img.annotations, subset);
    matchings.push_back(
        MatchDetections(img.detections, masked, iou_threshold));
    const ImageMatching& m = matchings.back();
    report.num_gts += m.num_gts;

    std::vector<Box> fps;
    for (std::size_t d : m.order) {
      if (m.status[d] == MatchStatus::kFalsePositive) {
        fps.push_back(img.detections[d].box);
      }
    }
    report.fp_taxonomy += ClassifyFalsePositives(fps, img.annotations);

    const auto missed = MissedByScore(img.detections, img.annotations, subset,
                                      iou_threshold, score_grid);
    for (std::size_t k = 0; k < missed.size(); ++k) {
      report.missed_by_score[k].missed += missed[k].missed;
    }
  }
  report.curve = FppiMissRateCurve(matchings);
  report.mr2 = LogAverageMissRate(report.curve);
  return report;
}

std::vector<CrowdFpPoint> CrowdFpByScore(std::span<const EvalImage> images,
                                         const SubsetSpec& subset,
                                         double iou_threshold,
                                         std::span<const double> score_grid) {
  CheckGrid(score_grid);
  std::vector<CrowdFpPoint> out;
  for (double s : score_grid) out.push_back({s, {}});
  for (const EvalImage& img : images) {
    const std::vector<Annotation> masked =
        MaskToSubset(img.annotations, subset);
    const ImageMatching m =
        MatchDetections(img.detections, masked, iou_threshold);
    for (CrowdFpPoint& pt : out) {
      std::vector<Box> fps;
      for (std::size_t d : m.order) {
        if (m.status[d] == MatchStatus::kFalsePositive &&
            img.detections[d].score >= pt.score) {
          fps.push_back(img.detections[d].box);
        }
      }
      pt.taxonomy += ClassifyFalsePositives(fps, img.annotations);
    }
  }
  return out;
}

}  // namespace repulse
