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

#include "repulse/losses.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace repulse {

namespace {

void Require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) {
    throw std::invalid_argument("LossConfig." + field + " " + what);
  }
}

// Order-independent sum: terms are sorted before a compensated accumulation,
// so any permutation of the inputs gives a bit-identical result.
double SortedSum(std::vector<double> terms) {
  std::sort(terms.begin(), terms.end());
  double sum = 0.0;
  double c = 0.0;
  for (double t : terms) {
    const double y = sum + t;
    if (std::abs(sum) >= std::abs(t)) {
      c += (sum - y) + t;
    } else {
      c += (t - y) + sum;
    }
    sum = y;
  }
  return sum + c;
}

bool ClampActive(double x, double sigma, double ln_clamp) {
  return x <= sigma && x > 1.0 - ln_clamp;
}

// Separation below which perturbing either box can change which overlap
// expression is active. Disjoint pairs stay disjoint for perturbations
// smaller than their gap.
double PairMargin(const Box& a, const Box& b) {
  const double gap_x =
      std::max(a.left(), b.left()) - std::min(a.right(), b.right());
  const double gap_y =
      std::max(a.top(), b.top()) - std::min(a.bottom(), b.bottom());
  if (gap_x > 0.0 || gap_y > 0.0) return std::max(gap_x, gap_y);
  return EdgeSeparation(a, b);
}

void CheckLengths(const LossInputs& in) {
  const std::size_t n = in.predicted.size();
  if (in.targets.size() != n || in.rep_targets.size() != n ||
      in.partition.size() != n) {
    throw std::invalid_argument(
        "loss inputs must have one entry per predicted box");
  }
}

}  // namespace

void LossConfig::Validate() const {
  Require(std::isfinite(alpha) && alpha >= 0.0, "alpha", "must be >= 0");
  Require(std::isfinite(beta) && beta >= 0.0, "beta", "must be >= 0");
  Require(sigma_gt >= 0.0 && sigma_gt <= 1.0, "sigma_gt", "must be in [0,1]");
  Require(sigma_box >= 0.0 && sigma_box <= 1.0, "sigma_box",
          "must be in [0,1]");
  Require(std::isfinite(smooth_l1_sigma) && smooth_l1_sigma > 0.0,
          "smooth_l1_sigma", "must be > 0");
  Require(std::isfinite(epsilon) && epsilon > 0.0, "epsilon", "must be > 0");
  Require(ln_clamp > 0.0 && ln_clamp < 1.0, "ln_clamp", "must be in (0,1)");
}

double SmoothL1(double x, double sigma) {
  const double s2 = sigma * sigma;
  const double ax = std::abs(x);
  if (ax < 1.0 / s2) return 0.5 * s2 * x * x;
  return ax - 0.5 / s2;
}

double SmoothL1Derivative(double x, double sigma) {
  const double s2 = sigma * sigma;
  if (std::abs(x) < 1.0 / s2) return s2 * x;
  return x > 0.0 ? 1.0 : -1.0;
}

double SmoothLn(double x, double sigma, double ln_clamp) {
  if (x <= sigma) {
    return -std::log1p(-std::min(x, 1.0 - ln_clamp));
  }
  return (x - sigma) / (1.0 - sigma) - std::log1p(-sigma);
}

double SmoothLnDerivative(double x, double sigma, double ln_clamp) {
  if (x <= sigma) {
    if (x > 1.0 - ln_clamp) return 0.0;
    return 1.0 / (1.0 - x);
  }
  return 1.0 / (1.0 - sigma);
}

double AttractionLoss(std::span<const Box> predicted,
                      std::span<const Box> targets, const LossConfig& cfg) {
  if (predicted.size() != targets.size()) {
    throw std::invalid_argument("attraction: predicted/targets size mismatch");
  }
  if (predicted.empty()) return 0.0;
  std::vector<double> terms;
  terms.reserve(predicted.size());
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const auto p = predicted[i].coords();
    const auto g = targets[i].coords();
    double d = 0.0;
    for (int k = 0; k < 4; ++k) d += SmoothL1(p[k] - g[k], cfg.smooth_l1_sigma);
    terms.push_back(d);
  }
  return SortedSum(std::move(terms)) / static_cast<double>(predicted.size());
}

double RepGtLoss(std::span<const Box> predicted,
                 std::span<const std::optional<Box>> rep_targets,
                 const LossConfig& cfg) {
  if (predicted.size() != rep_targets.size()) {
    throw std::invalid_argument("repgt: predicted/rep_targets size mismatch");
  }
  if (predicted.empty()) return 0.0;
  std::vector<double> terms;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (!rep_targets[i]) continue;
    const double x = IoG(predicted[i], *rep_targets[i]);
    terms.push_back(SmoothLn(x, cfg.sigma_gt, cfg.ln_clamp));
  }
  return SortedSum(std::move(terms)) / static_cast<double>(predicted.size());
}

double RepBoxLoss(std::span<const Box> predicted,
                  std::span<const std::size_t> partition,
                  const LossConfig& cfg) {
  if (predicted.size() != partition.size()) {
    throw std::invalid_argument("repbox: predicted/partition size mismatch");
  }
  std::vector<double> terms;
  std::size_t overlapping = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    for (std::size_t j = i + 1; j < predicted.size(); ++j) {
      if (partition[i] == partition[j]) continue;
      const double x = IoU(predicted[i], predicted[j]);
      if (x > 0.0) ++overlapping;
      terms.push_back(SmoothLn(x, cfg.sigma_box, cfg.ln_clamp));
    }
  }
  if (terms.empty()) return 0.0;
  return SortedSum(std::move(terms)) /
         (static_cast<double>(overlapping) + cfg.epsilon);
}

LossBreakdown TotalLoss(const LossInputs& in, const LossConfig& cfg) {
  CheckLengths(in);
  LossBreakdown out;
  out.no_positives = in.predicted.empty();
  out.attraction = AttractionLoss(in.predicted, in.targets, cfg);
  out.rep_gt = RepGtLoss(in.predicted, in.rep_targets, cfg);
  out.rep_box = RepBoxLoss(in.predicted, in.partition, cfg);
  out.total = out.attraction + cfg.alpha * out.rep_gt + cfg.beta * out.rep_box;
  return out;
}

LossGradients TotalLossGradient(const LossInputs& in, const LossConfig& cfg) {
  CheckLengths(in);
  const std::size_t n = in.predicted.size();
  LossGradients out;
  out.per_box.resize(n);
  if (n == 0) return out;
  const double inv_n = 1.0 / static_cast<double>(n);

  for (std::size_t i = 0; i < n; ++i) {
    const auto p = in.predicted[i].coords();
    const auto g = in.targets[i].coords();
    BoxGradient attr;
    attr.d_left = SmoothL1Derivative(p[0] - g[0], cfg.smooth_l1_sigma);
    attr.d_top = SmoothL1Derivative(p[1] - g[1], cfg.smooth_l1_sigma);
    attr.d_width = SmoothL1Derivative(p[2] - g[2], cfg.smooth_l1_sigma);
    attr.d_height = SmoothL1Derivative(p[3] - g[3], cfg.smooth_l1_sigma);
    out.per_box[i] += attr * inv_n;
  }

  if (cfg.alpha != 0.0) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!in.rep_targets[i]) continue;
      const Box& rep = *in.rep_targets[i];
      const double x = IoG(in.predicted[i], rep);
      BoxGradient g = IoGGradient(in.predicted[i], rep);
      if (ClampActive(x, cfg.sigma_gt, cfg.ln_clamp)) g.non_smooth = true;
      out.per_box[i] +=
          g * (cfg.alpha * SmoothLnDerivative(x, cfg.sigma_gt, cfg.ln_clamp) *
               inv_n);
    }
  }

  if (cfg.beta != 0.0) {
    std::size_t overlapping = 0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        if (in.partition[i] != in.partition[j] &&
            IoU(in.predicted[i], in.predicted[j]) > 0.0) {
          ++overlapping;
        }
      }
    }
    const double scale =
        cfg.beta / (static_cast<double>(overlapping) + cfg.epsilon);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        if (in.partition[i] == in.partition[j]) continue;
        const Box& a = in.predicted[i];
        const Box& b = in.predicted[j];
        const double x = IoU(a, b);
        const double w = scale * SmoothLnDerivative(x, cfg.sigma_box,
                                                    cfg.ln_clamp);
        BoxGradient ga = IoUGradient(a, b) * w;
        BoxGradient gb = IoUGradient(b, a) * w;
        if (ClampActive(x, cfg.sigma_box, cfg.ln_clamp)) {
          ga.non_smooth = gb.non_smooth = true;
        }
        out.per_box[i] += ga;
        out.per_box[j] += gb;
      }
    }
  }

  for (const BoxGradient& g : out.per_box) {
    out.non_smooth = out.non_smooth || g.non_smooth;
  }
  return out;
}

double SmoothnessMargin(const LossInputs& in, const LossConfig& cfg) {
  CheckLengths(in);
  double margin = std::numeric_limits<double>::infinity();
  const double clamp_at = 1.0 - cfg.ln_clamp;
  const std::size_t n = in.predicted.size();
  if (cfg.alpha != 0.0) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!in.rep_targets[i]) continue;
      margin = std::min(margin, PairMargin(in.predicted[i], *in.rep_targets[i]));
      if (cfg.sigma_gt >= clamp_at) {
        const double x = IoG(in.predicted[i], *in.rep_targets[i]);
        margin = std::min(margin, std::abs(x - clamp_at));
      }
    }
  }
  if (cfg.beta != 0.0) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        if (in.partition[i] == in.partition[j]) continue;
        margin = std::min(margin, PairMargin(in.predicted[i], in.predicted[j]));
        if (cfg.sigma_box >= clamp_at) {
          const double x = IoU(in.predicted[i], in.predicted[j]);
          margin = std::min(margin, std::abs(x - clamp_at));
        }
      }
    }
  }
  return margin;
}

}  // namespace repulse
