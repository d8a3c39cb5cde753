#include "ogp/driving_path.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ogp {

namespace {

std::vector<Vec2> Resample(const std::vector<Vec2>& points, double spacing) {
  std::vector<Vec2> out;
  out.push_back(points.front());
  double carry = 0.0;
  for (size_t i = 0; i + 1 < points.size(); ++i) {
    const Vec2 a = points[i];
    const Vec2 b = points[i + 1];
    const double len = (b - a).Norm();
    if (len < 1e-12) continue;
    double pos = spacing - carry;
    while (pos < len) {
      out.push_back(a + (pos / len) * (b - a));
      pos += spacing;
    }
    carry = len - (pos - spacing);
  }
  if ((out.back() - points.back()).Norm() > 1e-9) {
    out.push_back(points.back());
  }
  return out;
}

}  // namespace

DrivingPath DrivingPath::FromPolyline(const std::vector<Vec2>& points,
                                      double spacing) {
  if (points.size() < 2) {
    throw InvalidInputError("driving path needs at least 2 points");
  }
  DrivingPath path;
  path.vertices_ = Resample(points, spacing);
  const size_t n = path.vertices_.size();
  if (n < 2) throw InvalidInputError("degenerate driving path");

  path.FinalizeArcLengths();

  // Headings from chords, unwrapped to stay continuous.
  path.headings_.resize(n);
  for (size_t i = 0; i < n; ++i) {
    const Vec2 d = (i == 0)       ? path.vertices_[1] - path.vertices_[0]
                   : (i == n - 1) ? path.vertices_[n - 1] - path.vertices_[n - 2]
                                  : path.vertices_[i + 1] - path.vertices_[i - 1];
    path.headings_[i] = std::atan2(d.y, d.x);
  }
  for (size_t i = 1; i < n; ++i) {
    double h = path.headings_[i];
    while (h - path.headings_[i - 1] > M_PI) h -= 2.0 * M_PI;
    while (h - path.headings_[i - 1] < -M_PI) h += 2.0 * M_PI;
    path.headings_[i] = h;
  }

  path.curvatures_.resize(n);
  for (size_t i = 0; i < n; ++i) {
    const size_t lo = (i == 0) ? 0 : i - 1;
    const size_t hi = (i == n - 1) ? n - 1 : i + 1;
    const double ds = path.s_[hi] - path.s_[lo];
    path.curvatures_[i] =
        ds > 1e-12 ? (path.headings_[hi] - path.headings_[lo]) / ds : 0.0;
  }
  return path;
}

DrivingPath DrivingPath::FromSamples(std::vector<Vec2> vertices,
                                     std::vector<double> headings,
                                     std::vector<double> curvatures) {
  if (vertices.size() < 2 || vertices.size() != headings.size() ||
      vertices.size() != curvatures.size()) {
    throw InvalidInputError("inconsistent driving path samples");
  }
  DrivingPath path;
  path.vertices_ = std::move(vertices);
  path.headings_ = std::move(headings);
  path.curvatures_ = std::move(curvatures);
  path.FinalizeArcLengths();
  return path;
}

void DrivingPath::FinalizeArcLengths() {
  const size_t n = vertices_.size();
  s_.resize(n);
  s_[0] = 0.0;
  for (size_t i = 1; i < n; ++i) {
    const double ds = (vertices_[i] - vertices_[i - 1]).Norm();
    if (ds <= 1e-12) {
      throw InvalidInputError("driving path arc length must strictly increase");
    }
    s_[i] = s_[i - 1] + ds;
  }
}

size_t DrivingPath::SegmentIndex(double s) const {
  const auto it = std::upper_bound(s_.begin(), s_.end(), s);
  const size_t idx = static_cast<size_t>(it - s_.begin());
  if (idx == 0) return 0;
  return std::min(idx - 1, s_.size() - 2);
}

PathPoint DrivingPath::At(double s) const {
  if (Empty()) throw InvalidInputError("empty driving path");
  s = std::clamp(s, 0.0, Length());
  const size_t i = SegmentIndex(s);
  const double ds = s_[i + 1] - s_[i];
  const double t = (s - s_[i]) / ds;
  PathPoint p;
  p.position = vertices_[i] + t * (vertices_[i + 1] - vertices_[i]);
  p.heading = headings_[i] + t * (headings_[i + 1] - headings_[i]);
  p.curvature = curvatures_[i] + t * (curvatures_[i + 1] - curvatures_[i]);
  p.curvature_rate = (curvatures_[i + 1] - curvatures_[i]) / ds;
  return p;
}

void DrivingPath::Project(const Vec2& p, double* s_out, double* d_out,
                          double hint_s, double hint_window) const {
  if (Empty()) throw InvalidInputError("empty driving path");
  const size_t n = vertices_.size();

  size_t lo_seg = 0, hi_seg = n - 2;
  if (hint_s >= 0.0) {
    lo_seg = SegmentIndex(std::max(0.0, hint_s - hint_window));
    hi_seg = SegmentIndex(std::min(Length(), hint_s + hint_window));
  }

  // Coarse pass: closest point over polyline segments.
  double best_dist = std::numeric_limits<double>::infinity();
  double best_s = 0.0;
  for (size_t i = lo_seg; i <= hi_seg; ++i) {
    double t = 0.0;
    const double dist = PointSegmentDistance(p, vertices_[i], vertices_[i + 1], &t);
    if (dist < best_dist) {
      best_dist = dist;
      best_s = s_[i] + t * (s_[i + 1] - s_[i]);
    }
  }

  // Refine: solve g(s) = (p - r(s)) . t(s) = 0 by bisection. g is
  // strictly decreasing near a valid foot point (slope -(1 - d*kappa)),
  // so a sign change brackets the root.
  auto g = [&](double s) {
    const PathPoint q = At(s);
    return (p - q.position).Dot(Heading(q.heading));
  };

  const double step = std::max(1e-3, s_[1] - s_[0]);
  double lo = std::max(0.0, best_s - step);
  double hi = std::min(Length(), best_s + step);
  double glo = g(lo), ghi = g(hi);
  for (int expand = 0; expand < 8 && glo * ghi > 0.0; ++expand) {
    if (glo < 0.0) {
      lo = std::max(0.0, lo - step);
      glo = g(lo);
    } else {
      hi = std::min(Length(), hi + step);
      ghi = g(hi);
    }
    if (lo == 0.0 && hi == Length()) break;
  }

  double s_star = best_s;
  if (glo >= 0.0 && ghi <= 0.0) {
    for (int it = 0; it < 64; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (g(mid) >= 0.0) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    s_star = 0.5 * (lo + hi);
  } else if (glo < 0.0) {
    s_star = lo;  // beyond the start: clamp
  } else {
    s_star = hi;  // beyond the end: clamp
  }

  const PathPoint q = At(s_star);
  if (s_out != nullptr) *s_out = s_star;
  if (d_out != nullptr) *d_out = (p - q.position).Dot(LeftNormal(q.heading));
}

}  // namespace ogp
