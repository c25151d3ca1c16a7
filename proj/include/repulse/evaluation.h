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

// Crowd-occlusion evaluation: occlusion subsets, greedy detection matching,
// FPPI / miss-rate curves, log-average miss rate over FPPI in [1e-2, 1e0],
// and the false-positive / missed-detection failure analysis.

#ifndef REPULSE_EVALUATION_H_
#define REPULSE_EVALUATION_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "repulse/geometry.h"
#include "repulse/nms.h"

namespace repulse {

struct Annotation {
  std::string id;
  Box box;
  std::optional<Box> visible_box;
  bool ignore = false;
  // Dataset-specific "reasonable" pre-filter (height, visibility...).
  bool in_eval = true;
};

// Occlusion band plus an optional crowd condition. The lower bound is
// inclusive unless `occ_min_exclusive` is set; the upper bound is always
// inclusive.
struct SubsetSpec {
  double occ_min = 0.0;
  double occ_max = 1.0;
  bool occ_min_exclusive = false;
  std::optional<double> crowd_iou_min;

  void Validate() const;

  // reasonable | occ | crowd | partial | bare | heavy | all.
  static SubsetSpec Named(std::string_view name);
};

// 1 - area(visible) / area(box); 0 without a visible box. Throws for a
// zero-area full box.
double OcclusionRatio(const Annotation& a);

// Membership flag per annotation. Ignored and non-eval annotations are never
// members; crowd neighbors are any other non-ignored annotation.
std::vector<bool> SubsetMask(std::span<const Annotation> anns,
                             const SubsetSpec& spec);

std::vector<Annotation> OcclusionSubset(std::span<const Annotation> anns,
                                        const SubsetSpec& spec);

enum class MatchStatus { kTruePositive, kFalsePositive, kIgnored };

// Greedy one-to-one matching of one image.
struct ImageMatching {
  // Detection indices by descending score, input order on ties.
  std::vector<std::size_t> order;
  std::vector<double> scores;          // per detection
  std::vector<MatchStatus> status;     // per detection
  std::vector<std::optional<std::size_t>> matched_gt;  // per detection
  std::vector<std::optional<std::size_t>> gt_matched_by;  // per annotation
  std::vector<bool> gt_ignored;        // per annotation
  std::size_t num_gts = 0;             // non-ignored annotations

  std::size_t CountMissed() const;
};

// Each detection, in score order, takes the highest-IoU unmatched
// non-ignored annotation with IoU >= iou_threshold. Otherwise, if it
// reaches IoU >= iou_threshold with an ignored annotation it is kIgnored,
// else kFalsePositive.
ImageMatching MatchDetections(std::span<const Detection> dets,
                              std::span<const Annotation> gts,
                              double iou_threshold = 0.5);

struct CurvePoint {
  double fppi = 0.0;
  double miss_rate = 1.0;

  friend bool operator==(const CurvePoint&, const CurvePoint&) = default;
};

// Cumulative counts when keeping every detection with score >= `score`.
struct OperatingPoint {
  double score = 0.0;
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
  std::size_t ignored = 0;
};

// One point per distinct detection score (descending), preceded by a point
// above every score with no detections kept.
std::vector<OperatingPoint> OperatingPoints(
    std::span<const ImageMatching> images);

// Lower envelope of (FPPI, miss rate) over all score thresholds; FPPI
// strictly increasing. Throws when there are no images or no ground truth.
std::vector<CurvePoint> FppiMissRateCurve(
    std::span<const ImageMatching> images);

// FPPI reference points 10^-2, 10^-1.75, ..., 10^0.
std::vector<double> MissRateReferencePoints();

// Geometric mean of the miss rate sampled at the reference points, each
// floored at 1e-10. A reference with no curve point at or below it samples
// a miss rate of 1.
double LogAverageMissRate(std::span<const CurvePoint> curve);

struct FpTaxonomy {
  std::size_t background = 0;
  std::size_t localization = 0;
  std::size_t crowd = 0;

  std::size_t total() const { return background + localization + crowd; }
  double crowd_proportion() const;
  FpTaxonomy& operator+=(const FpTaxonomy& o);
};

inline constexpr double kFpOverlapIoU = 0.1;

// Labels each false positive by how many non-ignored annotations it reaches
// with IoU >= 0.1: none -> background, one -> localization, more -> crowd.
FpTaxonomy ClassifyFalsePositives(std::span<const Box> fps,
                                  std::span<const Annotation> gts);

struct MissedCount {
  double score = 0.0;
  std::size_t missed = 0;
};

// For each threshold s in `score_grid`, the number of subset annotations not
// matched by any detection scoring >= s. Matching runs against every
// non-ignored, in-eval annotation of the image.
std::vector<MissedCount> MissedByScore(std::span<const Detection> dets,
                                       std::span<const Annotation> gts,
                                       const SubsetSpec& subset,
                                       double iou_threshold,
                                       std::span<const double> score_grid);

struct EvalImage {
  std::string image_id;
  std::vector<Annotation> annotations;
  std::vector<Detection> detections;
};

struct EvalReport {
  std::vector<CurvePoint> curve;
  double mr2 = 1.0;
  FpTaxonomy fp_taxonomy;
  std::vector<MissedCount> missed_by_score;
  std::size_t num_images = 0;
  std::size_t num_gts = 0;
};

// Annotations outside the subset (or not in_eval) act as ignore regions.
EvalReport Evaluate(std::span<const EvalImage> images,
                    const SubsetSpec& subset, double iou_threshold,
                    std::span<const double> score_grid);

// Crowd share of false positives among detections scoring >= s, per s.
struct CrowdFpPoint {
  double score = 0.0;
  FpTaxonomy taxonomy;
};

std::vector<CrowdFpPoint> CrowdFpByScore(std::span<const EvalImage> images,
                                         const SubsetSpec& subset,
                                         double iou_threshold,
                                         std::span<const double> score_grid);

// Per-image annotations with ignore set for everything outside `subset`.
std::vector<Annotation> MaskToSubset(std::span<const Annotation> anns,
                                     const SubsetSpec& subset);

}  // namespace repulse

#endif  // REPULSE_EVALUATION_H_
