#include "ogp/grid_geometry.hpp"

#include <algorithm>
#include <limits>

namespace ogp {

namespace {

// Positive-area overlap requires clearing this much on every axis;
// exact boundary contact (and sub-nanometre slivers from gridline
// rounding) does not count as coverage.
constexpr double kTouchEpsilon = 1e-9;

}  // namespace

std::vector<CellIndex> PolygonCells(const std::array<Vec2, 4>& corners,
                                    const GridGeometry& grid) {
  double gx_min = std::numeric_limits<double>::infinity(), gx_max = -gx_min;
  double gy_min = gx_min, gy_max = -gx_min;
  for (const Vec2& c : corners) {
    gx_min = std::min(gx_min, c.x);
    gx_max = std::max(gx_max, c.x);
    gy_min = std::min(gy_min, c.y);
    gy_max = std::max(gy_max, c.y);
  }
  const int i0 = std::max(0, static_cast<int>(std::floor((gx_min - grid.x_min) / grid.resolution)));
  const int i1 = std::min(grid.nx - 1, static_cast<int>(std::floor((gx_max - grid.x_min) / grid.resolution)));
  const int j0 = std::max(0, static_cast<int>(std::floor((gy_min - grid.y_min) / grid.resolution)));
  const int j1 = std::min(grid.ny - 1, static_cast<int>(std::floor((gy_max - grid.y_min) / grid.resolution)));

  std::vector<CellIndex> out;
  if (i1 < i0 || j1 < j0) return out;
  out.reserve(static_cast<size_t>(i1 - i0 + 1) * static_cast<size_t>(j1 - j0 + 1) / 2 + 4);

  // Separating axes: the cell's x/y axes plus the quad's two (unit
  // normalized) edge directions, with the quad's own projections
  // precomputed once.
  std::array<Vec2, 2> axes;
  {
    const Vec2 e0 = corners[1] - corners[0];
    const Vec2 e1 = corners[2] - corners[1];
    const double n0 = e0.Norm(), n1 = e1.Norm();
    axes[0] = n0 > 0.0 ? Vec2{-e0.y / n0, e0.x / n0} : Vec2{1.0, 0.0};
    axes[1] = n1 > 0.0 ? Vec2{-e1.y / n1, e1.x / n1} : Vec2{0.0, 1.0};
  }
  double qlo[2], qhi[2];
  for (int k = 0; k < 2; ++k) {
    qlo[k] = std::numeric_limits<double>::infinity();
    qhi[k] = -qlo[k];
    for (const Vec2& c : corners) {
      const double d = c.Dot(axes[k]);
      qlo[k] = std::min(qlo[k], d);
      qhi[k] = std::max(qhi[k], d);
    }
  }

  const double res = grid.resolution;
  for (int i = i0; i <= i1; ++i) {
    const double cx0 = grid.x_min + i * res;
    const double cx1 = cx0 + res;
    if (gx_max <= cx0 + kTouchEpsilon || cx1 <= gx_min + kTouchEpsilon) continue;
    for (int j = j0; j <= j1; ++j) {
      const double cy0 = grid.y_min + j * res;
      const double cy1 = cy0 + res;
      if (gy_max <= cy0 + kTouchEpsilon || cy1 <= gy_min + kTouchEpsilon) continue;
      bool separated = false;
      for (int k = 0; k < 2 && !separated; ++k) {
        const Vec2& u = axes[k];
        double clo = std::numeric_limits<double>::infinity(), chi = -clo;
        for (const Vec2 corner : {Vec2{cx0, cy0}, Vec2{cx1, cy0},
                                  Vec2{cx1, cy1}, Vec2{cx0, cy1}}) {
          const double d = corner.Dot(u);
          clo = std::min(clo, d);
          chi = std::max(chi, d);
        }
        separated = chi <= qlo[k] + kTouchEpsilon || qhi[k] <= clo + kTouchEpsilon;
      }
      if (!separated) out.push_back({i, j});
    }
  }
  return out;
}

std::vector<CellIndex> FootprintCells(const FootprintPolygon& fp,
                                      const GridGeometry& grid, double lambda) {
  if (lambda < 0.0) throw InvalidInputError("negative safety margin");
  std::array<Vec2, 4> corners = fp.Corners(lambda);
  for (Vec2& c : corners) c = grid.WorldToGrid(c);
  return PolygonCells(corners, grid);
}

namespace {

struct ObstacleCone {
  ConvexPolygon poly;     // grid frame
  Vec2 origin;            // grid frame
  Vec2 ray_lo, ray_hi;    // cone edges (ccw from lo to hi), span < pi
  double min_dist2 = 0.0;
  bool origin_inside = false;
};

ObstacleCone MakeCone(const ConvexPolygon& poly, const Vec2& origin) {
  ObstacleCone cone;
  cone.poly = poly;
  cone.origin = origin;
  cone.origin_inside = PointInConvexPolygon(origin, poly);
  if (cone.origin_inside) return cone;

  // Extreme directions: the pair of corner rays with every other corner
  // between them (valid while the subtended angle is below pi, which
  // holds whenever the origin lies outside the convex polygon).
  cone.ray_lo = poly[0] - origin;
  cone.ray_hi = poly[0] - origin;
  for (size_t k = 1; k < poly.size(); ++k) {
    const Vec2 r = poly[k] - origin;
    if (cone.ray_lo.Cross(r) < 0.0) cone.ray_lo = r;
    if (cone.ray_hi.Cross(r) > 0.0) cone.ray_hi = r;
  }
  double dmin = std::numeric_limits<double>::infinity();
  const size_t n = poly.size();
  for (size_t k = 0; k < n; ++k) {
    dmin = std::min(dmin, PointSegmentDistance(origin, poly[k], poly[(k + 1) % n]));
  }
  cone.min_dist2 = dmin * dmin;
  return cone;
}

}  // namespace

std::vector<uint8_t> OcclusionMask(const Vec2& origin,
                                   const std::vector<ConvexPolygon>& obstacles,
                                   const GridGeometry& grid) {
  const Vec2 o = grid.WorldToGrid(origin);
  if (o.x < grid.x_min || o.x >= grid.x_min + grid.nx * grid.resolution ||
      o.y < grid.y_min || o.y >= grid.y_min + grid.ny * grid.resolution) {
    throw InvalidInputError("occlusion origin outside grid");
  }

  std::vector<uint8_t> mask(static_cast<size_t>(grid.NumCells()), 0);
  std::vector<ObstacleCone> cones;
  cones.reserve(obstacles.size());
  for (const ConvexPolygon& w : obstacles) {
    ConvexPolygon g;
    g.reserve(w.size());
    for (const Vec2& p : w) g.push_back(grid.WorldToGrid(p));
    cones.push_back(MakeCone(g, o));
  }

  for (const ObstacleCone& cone : cones) {
    for (int i = 0; i < grid.nx; ++i) {
      for (int j = 0; j < grid.ny; ++j) {
        const size_t idx = static_cast<size_t>(grid.Flatten(i, j));
        if (mask[idx]) continue;
        const Vec2 c = grid.CellCenter(i, j);
        const Vec2 v = c - o;
        if (!cone.origin_inside) {
          if (cone.ray_lo.Cross(v) < 0.0 || v.Cross(cone.ray_hi) < 0.0) continue;
          if (v.SquaredNorm() <= cone.min_dist2) continue;
        }
        if (SegmentHitsPolygonBefore(o, c, cone.poly, 1.0)) mask[idx] = 1;
      }
    }
  }
  return mask;
}

bool PointVisible(const Vec2& origin, const Vec2& target,
                  const std::vector<ConvexPolygon>& obstacles) {
  for (const ConvexPolygon& poly : obstacles) {
    if (SegmentHitsPolygonBefore(origin, target, poly, 1.0)) return false;
  }
  return true;
}

}  // namespace ogp
