#include "mtmc/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

namespace mtmc::geom {

double iou(const BBox& a, const BBox& b) {
  const double ix1 = std::max(a.x, b.x);
  const double iy1 = std::max(a.y, b.y);
  const double ix2 = std::min(a.x + a.w, b.x + b.w);
  const double iy2 = std::min(a.y + a.h, b.y + b.h);
  const double iw = std::max(0.0, ix2 - ix1);
  const double ih = std::max(0.0, iy2 - iy1);
  const double inter = iw * ih;
  const double uni = a.w * a.h + b.w * b.h - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

double polygon_signed_area2(const std::vector<Point>& polygon) {
  double acc = 0.0;
  const std::size_t n = polygon.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point& p = polygon[i];
    const Point& q = polygon[(i + 1) % n];
    acc += p.x * q.y - q.x * p.y;
  }
  return acc;
}

namespace {

double cross(const Point& o, const Point& a, const Point& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

bool on_segment_collinear(const Point& p, const Point& a, const Point& b) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) &&
         std::min(a.y, b.y) <= p.y && p.y <= std::max(a.y, b.y);
}

// Closed-segment intersection test, including collinear overlap.
bool segments_intersect(const Point& a, const Point& b, const Point& c,
                        const Point& d) {
  const double d1 = cross(c, d, a);
  const double d2 = cross(c, d, b);
  const double d3 = cross(a, b, c);
  const double d4 = cross(a, b, d);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
      ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) {
    return true;
  }
  if (d1 == 0 && on_segment_collinear(a, c, d)) return true;
  if (d2 == 0 && on_segment_collinear(b, c, d)) return true;
  if (d3 == 0 && on_segment_collinear(c, a, b)) return true;
  if (d4 == 0 && on_segment_collinear(d, a, b)) return true;
  return false;
}

bool points_equal(const Point& a, const Point& b) {
  return a.x == b.x && a.y == b.y;
}

}  // namespace

bool point_on_segment(const Point& p, const Point& a, const Point& b) {
  return cross(a, b, p) == 0.0 && on_segment_collinear(p, a, b);
}

bool polygon_is_simple(const std::vector<Point>& polygon) {
  const std::size_t n = polygon.size();
  if (n < 3) return false;
  if (polygon_signed_area2(polygon) == 0.0) return false;
  for (std::size_t i = 0; i < n; ++i) {
    if (points_equal(polygon[i], polygon[(i + 1) % n])) return false;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const Point& a = polygon[i];
    const Point& b = polygon[(i + 1) % n];
    for (std::size_t j = i + 1; j < n; ++j) {
      const Point& c = polygon[j];
      const Point& d = polygon[(j + 1) % n];
      const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
      if (adjacent) {
        // Adjacent edges share one endpoint; any further contact means a
        // degenerate spike or collinear overlap.
        const Point& shared = (j == i + 1) ? b : a;
        const Point& a_far = (j == i + 1) ? a : b;
        const Point& c_far = (j == i + 1) ? d : c;
        if (point_on_segment(a_far, c, d) && !points_equal(a_far, shared))
          return false;
        if (point_on_segment(c_far, a, b) && !points_equal(c_far, shared))
          return false;
        continue;
      }
      if (segments_intersect(a, b, c, d)) return false;
    }
  }
  return true;
}

bool point_in_polygon(const Point& p, const std::vector<Point>& polygon) {
  const std::size_t n = polygon.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    if (point_on_segment(p, polygon[i], polygon[(i + 1) % n])) return true;
  }
  // Even-odd rule: count edges crossing the horizontal ray to +x. The
  // half-open vertex rule (y1 <= p.y < y2) counts each vertex once.
  bool inside = false;
  for (std::size_t i = 0; i < n; ++i) {
    const Point& a = polygon[i];
    const Point& b = polygon[(i + 1) % n];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x_at = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
      if (p.x < x_at) inside = !inside;
    }
  }
  return inside;
}

}  // namespace mtmc::geom
