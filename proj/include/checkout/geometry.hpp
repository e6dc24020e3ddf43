#pragma once

#include <algorithm>
#include <cmath>

#include "checkout/errors.hpp"

namespace checkout {

// Axis-aligned box, corner format, continuous pixel coordinates, origin top-left.
// Degenerate (zero width/height) and non-finite boxes are rejected at construction.
struct BBox {
  double x1 = 0.0;
  double y1 = 0.0;
  double x2 = 1.0;
  double y2 = 1.0;

  BBox() = default;  // unit box; every constructed BBox satisfies the invariants

  BBox(double x1_, double y1_, double x2_, double y2_) : x1(x1_), y1(y1_), x2(x2_), y2(y2_) {
    if (!std::isfinite(x1) || !std::isfinite(y1) || !std::isfinite(x2) || !std::isfinite(y2))
      throw ValidationError("bbox: coordinates must be finite");
    if (!(x2 > x1) || !(y2 > y1))
      throw ValidationError("bbox: requires x2 > x1 and y2 > y1");
  }

  double width() const { return x2 - x1; }
  double height() const { return y2 - y1; }
  double cx() const { return 0.5 * (x1 + x2); }
  double cy() const { return 0.5 * (y1 + y2); }
};

inline double area(const BBox& b) { return b.width() * b.height(); }

inline double iou(const BBox& a, const BBox& b) {
  const double ix1 = std::max(a.x1, b.x1);
  const double iy1 = std::max(a.y1, b.y1);
  const double ix2 = std::min(a.x2, b.x2);
  const double iy2 = std::min(a.y2, b.y2);
  const double iw = ix2 - ix1;
  const double ih = iy2 - iy1;
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  return inter / (area(a) + area(b) - inter);
}

}  // namespace checkout
