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

#include "repulse/geometry.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace repulse {

Box::Box(double left, double top, double width, double height)
    : left_(left), top_(top), width_(width), height_(height) {
  if (!std::isfinite(left) || !std::isfinite(top) || !std::isfinite(width) ||
      !std::isfinite(height)) {
    throw std::invalid_argument("Box coordinates must be finite");
  }
  if (width < 0.0 || height < 0.0) {
    throw std::invalid_argument("Box extent must be non-negative, got w=" +
                                std::to_string(width) +
                                " h=" + std::to_string(height));
  }
}

Box Box::FromCorners(double left, double top, double right, double bottom) {
  return Box(left, top, right - left, bottom - top);
}

Box Box::Translated(double dx, double dy) const {
  return Box(left_ + dx, top_ + dy, width_, height_);
}

std::ostream& operator<<(std::ostream& os, const Box& b) {
  return os << "Box(" << b.left() << ", " << b.top() << ", " << b.width()
            << ", " << b.height() << ")";
}

BoxGradient& BoxGradient::operator+=(const BoxGradient& o) {
  d_left += o.d_left;
  d_top += o.d_top;
  d_width += o.d_width;
  d_height += o.d_height;
  non_smooth = non_smooth || o.non_smooth;
  return *this;
}

BoxGradient BoxGradient::operator*(double s) const {
  return {d_left * s, d_top * s, d_width * s, d_height * s, non_smooth};
}

double Area(const Box& b) { return b.width() * b.height(); }

namespace {

// Overlap of [lo_a, hi_a] and [lo_b, hi_b] along one axis, with derivatives
// of the overlap length w.r.t. a's start coordinate and a's extent.
struct AxisOverlap {
  double length = 0.0;
  double d_start = 0.0;
  double d_extent = 0.0;
  bool tie = false;
};

// Signed overlap length. When one interval contains the other the inner
// extent is returned as is, so a box overlaps itself by exactly its size.
double OverlapLength(double start_a, double extent_a, double start_b,
                     double extent_b) {
  const double end_a = start_a + extent_a;
  const double end_b = start_b + extent_b;
  if (start_a >= start_b && end_a <= end_b) return extent_a;
  if (start_b >= start_a && end_b <= end_a) return extent_b;
  return std::min(end_a, end_b) - std::max(start_a, start_b);
}

AxisOverlap Overlap1D(double start_a, double extent_a, double start_b,
                      double extent_b) {
  const double end_a = start_a + extent_a;
  const double end_b = start_b + extent_b;
  AxisOverlap out;
  out.length = OverlapLength(start_a, extent_a, start_b, extent_b);
  if (out.length < 0.0) {
    out.length = 0.0;
    return out;
  }
  // On a tie the other box's edge is taken as the active one, so a's
  // coordinate does not move the overlap.
  const double end_active = end_a < end_b ? 1.0 : 0.0;
  const double start_active = start_a > start_b ? 1.0 : 0.0;
  out.tie = end_a == end_b || start_a == start_b || out.length == 0.0;
  if (out.length == 0.0) return out;
  out.d_start = end_active - start_active;
  out.d_extent = end_active;
  return out;
}

// Intersection area and its gradient w.r.t. a.
struct IntersectionWithGradient {
  double area = 0.0;
  BoxGradient grad;
};

IntersectionWithGradient IntersectionGradient(const Box& a, const Box& b) {
  const AxisOverlap x = Overlap1D(a.left(), a.width(), b.left(), b.width());
  const AxisOverlap y = Overlap1D(a.top(), a.height(), b.top(), b.height());
  IntersectionWithGradient out;
  out.area = x.length * y.length;
  out.grad.d_left = y.length * x.d_start;
  out.grad.d_width = y.length * x.d_extent;
  out.grad.d_top = x.length * y.d_start;
  out.grad.d_height = x.length * y.d_extent;
  // A tie only matters if the other axis overlaps; otherwise the area stays
  // zero on both sides.
  out.grad.non_smooth =
      (x.tie && y.length > 0.0) || (y.tie && x.length > 0.0);
  return out;
}

}  // namespace

double IntersectionArea(const Box& a, const Box& b) {
  const double w = OverlapLength(a.left(), a.width(), b.left(), b.width());
  const double h = OverlapLength(a.top(), a.height(), b.top(), b.height());
  if (w <= 0.0 || h <= 0.0) return 0.0;
  return w * h;
}

double IoU(const Box& a, const Box& b) {
  const double inter = IntersectionArea(a, b);
  // The union is never smaller than either box; the max guards against
  // rounding when one box contains the other.
  const double uni =
      std::max({Area(a) + Area(b) - inter, Area(a), Area(b)});
  if (uni <= 0.0) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

double IoG(const Box& b, const Box& g) {
  const double ag = Area(g);
  if (ag <= 0.0) {
    throw std::invalid_argument("IoG undefined for zero-area ground truth");
  }
  return std::clamp(IntersectionArea(b, g) / ag, 0.0, 1.0);
}

BoxGradient IoUGradient(const Box& a, const Box& b) {
  const IntersectionWithGradient ig = IntersectionGradient(a, b);
  const double area_a = Area(a);
  const double uni = area_a + Area(b) - ig.area;
  if (uni <= 0.0) return {};
  // IoU = I / U with U = A_a + A_b - I:
  //   dIoU = (dI * (A_a + A_b) - I * dA_a) / U^2
  const double sum = area_a + Area(b);
  const double inv_u2 = 1.0 / (uni * uni);
  BoxGradient g;
  g.d_left = ig.grad.d_left * sum * inv_u2;
  g.d_top = ig.grad.d_top * sum * inv_u2;
  g.d_width = (ig.grad.d_width * sum - ig.area * a.height()) * inv_u2;
  g.d_height = (ig.grad.d_height * sum - ig.area * a.width()) * inv_u2;
  g.non_smooth = ig.grad.non_smooth;
  return g;
}

BoxGradient IoGGradient(const Box& b, const Box& g) {
  const double ag = Area(g);
  if (ag <= 0.0) {
    throw std::invalid_argument("IoG undefined for zero-area ground truth");
  }
  const IntersectionWithGradient ig = IntersectionGradient(b, g);
  return ig.grad * (1.0 / ag);
}

double EdgeSeparation(const Box& a, const Box& b) {
  const double xs_a[2] = {a.left(), a.right()};
  const double xs_b[2] = {b.left(), b.right()};
  const double ys_a[2] = {a.top(), a.bottom()};
  const double ys_b[2] = {b.top(), b.bottom()};
  double sep = std::abs(xs_a[0] - xs_b[0]);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      sep = std::min(sep, std::abs(xs_a[i] - xs_b[j]));
      sep = std::min(sep, std::abs(ys_a[i] - ys_b[j]));
    }
  }
  return sep;
}

}  // namespace repulse
