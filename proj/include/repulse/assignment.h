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

#ifndef REPULSE_ASSIGNMENT_H_
#define REPULSE_ASSIGNMENT_H_

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "repulse/geometry.h"
#include "repulse/losses.h"

namespace repulse {

inline constexpr double kDefaultPositiveIoU = 0.5;

// Labels for the positive proposals. All maps are keyed by proposal index.
struct AssignmentSet {
  std::vector<std::size_t> positive_indices;  // ascending
  std::map<std::size_t, std::size_t> target_of;
  std::map<std::size_t, std::optional<std::size_t>> rep_target_of;
  // Group id of each positive; equal to its target ground-truth index.
  std::map<std::size_t, std::size_t> partition;
};

// Proposals whose best IoU over `gts` is >= iou_threshold, ascending.
std::vector<std::size_t> SelectPositives(std::span<const Box> proposals,
                                         std::span<const Box> gts,
                                         double iou_threshold =
                                             kDefaultPositiveIoU);

// Argmax-IoU ground truth per positive; ties go to the lowest index.
std::map<std::size_t, std::size_t> DesignateTargets(
    std::span<const std::size_t> positives, std::span<const Box> proposals,
    std::span<const Box> gts);

// Argmax-IoU ground truth per positive over all ground truths except its
// designated target. Absent only when there is a single ground truth.
std::map<std::size_t, std::optional<std::size_t>> RepulsionTargets(
    std::span<const std::size_t> positives, std::span<const Box> proposals,
    std::span<const Box> gts,
    const std::map<std::size_t, std::size_t>& target_of);

std::map<std::size_t, std::size_t> PartitionByTarget(
    const std::map<std::size_t, std::size_t>& target_of);

AssignmentSet Assign(std::span<const Box> proposals, std::span<const Box> gts,
                     double iou_threshold = kDefaultPositiveIoU);

// Loss inputs gathered in positive order. Owns the storage the LossInputs
// view points into, so keep it alive while the view is used.
struct PositiveBatch {
  std::vector<Box> predicted;
  std::vector<Box> targets;
  std::vector<std::optional<Box>> rep_targets;
  std::vector<std::size_t> partition;

  LossInputs view() const {
    return {predicted, targets, rep_targets, partition};
  }
};

// `predicted` is indexed like the proposals passed to Assign.
PositiveBatch GatherPositives(const AssignmentSet& assignment,
                              std::span<const Box> predicted,
                              std::span<const Box> gts);

}  // namespace repulse

#endif  // REPULSE_ASSIGNMENT_H_
