#pragma once

#include <vector>

namespace mtmc::geom {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

// Axis-aligned box, top-left origin.
struct BBox {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;

  double cx() const { return x + w / 2.0; }
  double cy() const { return y + h / 2.0; }
  Point bottom_center() const { return {x + w / 2.0, y + h}; }

  friend bool operator==(const BBox&, const BBox&) = default;
};

// Intersection-over-union of two boxes; 0 when the union is degenerate.
double iou(const BBox& a, const BBox& b);

// Twice the signed area of the polygon (shoelace).
double polygon_signed_area2(const std::vector<Point>& polygon);

// True when the polygon has >= 3 vertices, nonzero area, and no pair of
// non-adjacent edges intersects (adjacent edges may only share their
// common endpoint).
bool polygon_is_simple(const std::vector<Point>& polygon);

// Even-odd (ray casting) containment test. Points on the boundary count
// as inside.
bool point_in_polygon(const Point& p, const std::vector<Point>& polygon);

// True when p lies on the closed segment [a, b].
bool point_on_segment(const Point& p, const Point& a, const Point& b);

}  // namespace mtmc::geom
