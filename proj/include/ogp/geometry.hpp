#pragma once

#include <array>
#include <cmath>
#include <vector>

namespace ogp {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2() = default;
  Vec2(double x_, double y_) : x(x_), y(y_) {}

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double k) const { return {x * k, y * k}; }
  Vec2& operator+=(const Vec2& o) {
    x += o.x;
    y += o.y;
    return *this;
  }

  double Dot(const Vec2& o) const { return x * o.x + y * o.y; }
  double Cross(const Vec2& o) const { return x * o.y - y * o.x; }
  double Norm() const { return std::hypot(x, y); }
  double SquaredNorm() const { return x * x + y * y; }
  Vec2 Rotated(double angle) const {
    const double c = std::cos(angle), s = std::sin(angle);
    return {c * x - s * y, s * x + c * y};
  }
};

inline Vec2 operator*(double k, const Vec2& v) { return {k * v.x, k * v.y}; }

// Wraps an angle into (-pi, pi].
double WrapAngle(double a);

// Unit vector at the given heading.
inline Vec2 Heading(double theta) { return {std::cos(theta), std::sin(theta)}; }

// Left normal of a heading (left-positive lateral convention).
inline Vec2 LeftNormal(double theta) { return {-std::sin(theta), std::cos(theta)}; }

// Distance from point p to segment [a, b]; also returns the parameter
// t in [0, 1] of the closest point through *t_out when non-null.
double PointSegmentDistance(const Vec2& p, const Vec2& a, const Vec2& b,
                            double* t_out = nullptr);

// Proper or touching intersection of segments [a0,a1] and [b0,b1].
// When they intersect, *t_out receives the parameter along [a0,a1].
bool SegmentsIntersect(const Vec2& a0, const Vec2& a1, const Vec2& b0,
                       const Vec2& b1, double* t_out = nullptr);

// A rectangular vehicle footprint. The pose refers to the rear axle
// center; the geometric center sits rear_axle_offset ahead of it.
struct FootprintPolygon {
  double length = 4.7;
  double width = 2.0;
  double rear_axle_offset = 1.4;
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;

  Vec2 Center() const { return Vec2(x, y) + rear_axle_offset * Heading(theta); }

  // Corners in counterclockwise order, optionally inflated by margin on
  // every side (square corner caps).
  std::array<Vec2, 4> Corners(double margin = 0.0) const;
};

// Convex polygon given by counterclockwise corners.
using ConvexPolygon = std::vector<Vec2>;

// True when the two convex polygons overlap with positive area
// (separating axis test with strict inequalities; boundary contact
// alone does not count).
bool ConvexOverlap(const std::array<Vec2, 4>& a, const std::array<Vec2, 4>& b);
bool ConvexOverlap(const ConvexPolygon& a, const ConvexPolygon& b);

// True when segment [a, b] crosses the boundary of the convex polygon
// at some parameter t < t_max (measured along [a, b] with t in [0,1]).
bool SegmentHitsPolygonBefore(const Vec2& a, const Vec2& b,
                              const ConvexPolygon& poly, double t_max);

// Point-in-convex-polygon (counterclockwise corners, boundary counts).
bool PointInConvexPolygon(const Vec2& p, const ConvexPolygon& poly);

}  // namespace ogp
