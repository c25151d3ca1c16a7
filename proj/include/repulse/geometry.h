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

#ifndef REPULSE_GEOMETRY_H_
#define REPULSE_GEOMETRY_H_

#include <array>
#include <ostream>

namespace repulse {

// Axis-aligned rectangle stored as (left, top, width, height). The y axis
// points down, so `bottom() >= top()`.
class Box {
 public:
  Box() = default;
  // Throws std::invalid_argument for negative extents or non-finite values.
  Box(double left, double top, double width, double height);

  static Box FromCorners(double left, double top, double right,
                         double bottom);

  double left() const { return left_; }
  double top() const { return top_; }
  double width() const { return width_; }
  double height() const { return height_; }
  double right() const { return left_ + width_; }
  double bottom() const { return top_ + height_; }

  // Coordinates in (l, t, w, h) order.
  std::array<double, 4> coords() const {
    return {left_, top_, width_, height_};
  }

  Box Translated(double dx, double dy) const;

  friend bool operator==(const Box&, const Box&) = default;

 private:
  double left_ = 0.0;
  double top_ = 0.0;
  double width_ = 0.0;
  double height_ = 0.0;
};

std::ostream& operator<<(std::ostream& os, const Box& b);

// Partial derivatives of a scalar overlap measure with respect to the
// (left, top, width, height) of one box.
struct BoxGradient {
  double d_left = 0.0;
  double d_top = 0.0;
  double d_width = 0.0;
  double d_height = 0.0;
  // Set when an edge of the differentiated box coincides with an edge of the
  // other box, i.e. the measure has a kink here and the value above is the
  // derivative of the currently active overlap expression.
  bool non_smooth = false;

  std::array<double, 4> components() const {
    return {d_left, d_top, d_width, d_height};
  }

  BoxGradient& operator+=(const BoxGradient& o);
  BoxGradient operator*(double s) const;
};

double Area(const Box& b);
double IntersectionArea(const Box& a, const Box& b);

// Intersection over union. Two zero-area boxes have IoU 0.
double IoU(const Box& a, const Box& b);

// Intersection over the area of `g`. Throws std::invalid_argument when
// area(g) == 0.
double IoG(const Box& b, const Box& g);

// d IoU(a, b) / d a.
BoxGradient IoUGradient(const Box& a, const Box& b);

// d IoG(b, g) / d b. area(g) is constant in b.
BoxGradient IoGGradient(const Box& b, const Box& g);

// Smallest distance between any x-edge of `a` and any x-edge of `b` (and
// likewise for y). Overlap measures are smooth in the coordinates of either
// box whenever this is positive.
double EdgeSeparation(const Box& a, const Box& b);

}  // namespace repulse

#endif  // REPULSE_GEOMETRY_H_
