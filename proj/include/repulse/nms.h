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

#ifndef REPULSE_NMS_H_
#define REPULSE_NMS_H_

#include <span>
#include <vector>

#include "repulse/geometry.h"

namespace repulse {

struct Detection {
  Box box;
  double score = 0.0;

  // Throws std::invalid_argument unless score is finite and in [0,1].
  static Detection Make(const Box& box, double score);

  friend bool operator==(const Detection&, const Detection&) = default;
};

// Greedy NMS: visit detections by descending score (stable on ties), keep
// each one not suppressed by an already kept detection with
// IoU > iou_threshold. The result is in visiting order.
std::vector<Detection> GreedyNms(std::span<const Detection> dets,
                                 double iou_threshold = 0.5);

}  // namespace repulse

#endif  // REPULSE_NMS_H_
