#include "ogp/geometry.hpp"

#include <algorithm>
#include <limits>

namespace ogp {

double WrapAngle(double a) {
  a = std::fmod(a + M_PI, 2.0 * M_PI);
  if (a <= 0.0) a += 2.0 * M_PI;
  return a - M_PI;
}

double PointSegmentDistance(const Vec2& p, const Vec2& a, const Vec2& b,
                            double* t_out) {
  const Vec2 ab = b - a;
  const double len2 = ab.SquaredNorm();
  double t = 0.0;
  if (len2 > 0.0) {
    t = std::clamp((p - a).Dot(ab) / len2, 0.0, 1.0);
  }
  if (t_out != nullptr) *t_out = t;
  return (p - (a + t * ab)).Norm();
}

bool SegmentsIntersect(const Vec2& a0, const Vec2& a1, const Vec2& b0,
                       const Vec2& b1, double* t_out) {
  const Vec2 r = a1 - a0;
  const Vec2 s = b1 - b0;
  const double denom = r.Cross(s);
  const Vec2 qp = b0 - a0;
  if (std::abs(denom) < 1e-15) {
    return false;  // parallel (collinear overlap treated as no crossing)
  }
  const double t = qp.Cross(s) / denom;
  const double u = qp.Cross(r) / denom;
  if (t < 0.0 || t > 1.0 || u < 0.0 || u > 1.0) return false;
  if (t_out != nullptr) *t_out = t;
  return true;
}

std::array<Vec2, 4> FootprintPolygon::Corners(double margin) const {
  const Vec2 c = Center();
  const Vec2 fwd = Heading(theta);
  const Vec2 left = LeftNormal(theta);
  const double hl = 0.5 * length + margin;
  const double hw = 0.5 * width + margin;
  return {c + hl * fwd + hw * left, c - hl * fwd + hw * left,
          c - hl * fwd - hw * left, c + hl * fwd - hw * left};
}

namespace {

template <typename PolyA, typename PolyB>
bool SeparatedOnAxes(const PolyA& a, const PolyB& b) {
  const size_t n = a.size();
  for (size_t i = 0; i < n; ++i) {
    const Vec2 edge = a[(i + 1) % n] - a[i];
    const Vec2 axis{-edge.y, edge.x};
    double amin = std::numeric_limits<double>::infinity(), amax = -amin;
    for (const Vec2& p : a) {
      const double d = p.Dot(axis);
      amin = std::min(amin, d);
      amax = std::max(amax, d);
    }
    double bmin = std::numeric_limits<double>::infinity(), bmax = -bmin;
    for (const Vec2& p : b) {
      const double d = p.Dot(axis);
      bmin = std::min(bmin, d);
      bmax = std::max(bmax, d);
    }
    if (amax <= bmin || bmax <= amin) return true;
  }
  return false;
}

}  // namespace

bool ConvexOverlap(const std::array<Vec2, 4>& a, const std::array<Vec2, 4>& b) {
  return !SeparatedOnAxes(a, b) && !SeparatedOnAxes(b, a);
}

bool ConvexOverlap(const ConvexPolygon& a, const ConvexPolygon& b) {
  if (a.size() < 3 || b.size() < 3) return false;
  return !SeparatedOnAxes(a, b) && !SeparatedOnAxes(b, a);
}

bool SegmentHitsPolygonBefore(const Vec2& a, const Vec2& b,
                              const ConvexPolygon& poly, double t_max) {
  const size_t n = poly.size();
  for (size_t i = 0; i < n; ++i) {
    double t = 0.0;
    if (SegmentsIntersect(a, b, poly[i], poly[(i + 1) % n], &t) && t < t_max) {
      return true;
    }
  }
  return false;
}

bool PointInConvexPolygon(const Vec2& p, const ConvexPolygon& poly) {
  const size_t n = poly.size();
  if (n < 3) return false;
  for (size_t i = 0; i < n; ++i) {
    const Vec2 edge = poly[(i + 1) % n] - poly[i];
    if (edge.Cross(p - poly[i]) < 0.0) return false;
  }
  return true;
}

}  // namespace ogp
