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

#include "repulse/assignment.h"

#include <stdexcept>

namespace repulse {

namespace {

// Index of the highest-IoU box in `gts`, skipping `excluded`. Strict `>`
// keeps the lowest index on ties.
std::optional<std::size_t> ArgmaxIoU(const Box& proposal,
                                     std::span<const Box> gts,
                                     std::optional<std::size_t> excluded) {
  std::optional<std::size_t> best;
  double best_iou = -1.0;
  for (std::size_t g = 0; g < gts.size(); ++g) {
    if (excluded && *excluded == g) continue;
    const double v = IoU(proposal, gts[g]);
    if (v > best_iou) {
      best_iou = v;
      best = g;
    }
  }
  return best;
}

}  // namespace

std::vector<std::size_t> SelectPositives(std::span<const Box> proposals,
                                         std::span<const Box> gts,
                                         double iou_threshold) {
  if (!(iou_threshold > 0.0 && iou_threshold <= 1.0)) {
    throw std::invalid_argument("positive IoU threshold must be in (0,1]");
  }
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < proposals.size(); ++i) {
    for (const Box& g : gts) {
      if (IoU(proposals[i], g) >= iou_threshold) {
        out.push_back(i);
        break;
      }
    }
  }
  return out;
}

std::map<std::size_t, std::size_t> DesignateTargets(
    std::span<const std::size_t> positives, std::span<const Box> proposals,
    std::span<const Box> gts) {
  std::map<std::size_t, std::size_t> out;
  for (std::size_t p : positives) {
    const auto best = ArgmaxIoU(proposals[p], gts, std::nullopt);
    if (!best) throw std::invalid_argument("cannot designate without gts");
    out[p] = *best;
  }
  return out;
}

std::map<std::size_t, std::optional<std::size_t>> RepulsionTargets(
    std::span<const std::size_t> positives, std::span<const Box> proposals,
    std::span<const Box> gts,
    const std::map<std::size_t, std::size_t>& target_of) {
  std::map<std::size_t, std::optional<std::size_t>> out;
  for (std::size_t p : positives) {
    out[p] = ArgmaxIoU(proposals[p], gts, target_of.at(p));
  }
  return out;
}

std::map<std::size_t, std::size_t> PartitionByTarget(
    const std::map<std::size_t, std::size_t>& target_of) {
  return target_of;
}

AssignmentSet Assign(std::span<const Box> proposals, std::span<const Box> gts,
                     double iou_threshold) {
  AssignmentSet a;
  a.positive_indices = SelectPositives(proposals, gts, iou_threshold);
  a.target_of = DesignateTargets(a.positive_indices, proposals, gts);
  a.rep_target_of =
      RepulsionTargets(a.positive_indices, proposals, gts, a.target_of);
  a.partition = PartitionByTarget(a.target_of);
  return a;
}

PositiveBatch GatherPositives(const AssignmentSet& assignment,
                              std::span<const Box> predicted,
                              std::span<const Box> gts) {
  PositiveBatch batch;
  for (std::size_t p : assignment.positive_indices) {
    if (p >= predicted.size()) {
      throw std::invalid_argument("predicted list shorter than proposals");
    }
    batch.predicted.push_back(predicted[p]);
    batch.targets.push_back(gts[assignment.target_of.at(p)]);
    const auto& rep = assignment.rep_target_of.at(p);
    batch.rep_targets.push_back(rep ? std::optional<Box>(gts[*rep])
                                    : std::nullopt);
    batch.partition.push_back(assignment.partition.at(p));
  }
  return batch;
}

}  // namespace repulse
