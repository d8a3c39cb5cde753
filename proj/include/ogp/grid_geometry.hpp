#pragma once

#include <cstdint>
#include <vector>

#include "ogp/driving_path.hpp"
#include "ogp/geometry.hpp"

namespace ogp {

// Spatial layout of the occupancy grid. The grid frame is anchored to
// the SDV pose at plan time: SDV at the frame origin heading +x, cells
// axis-aligned in that frame, 70 m ahead/behind and 40 m to each side.
struct GridGeometry {
  Vec2 center;           // world position of the SDV rear axle
  double heading = 0.0;  // world heading of the SDV
  double resolution = 0.4;
  int nx = 350;  // cells along the driving direction (140 m)
  int ny = 200;  // cells across (80 m)
  double x_min = -70.0;
  double y_min = -40.0;
  int num_horizons = 11;
  double horizon_step = 0.5;

  int NumCells() const { return nx * ny; }
  double HorizonTime(int k) const { return horizon_step * k; }

  Vec2 WorldToGrid(const Vec2& w) const { return (w - center).Rotated(-heading); }
  Vec2 GridToWorld(const Vec2& g) const { return center + g.Rotated(heading); }

  bool Contains(int i, int j) const {
    return i >= 0 && i < nx && j >= 0 && j < ny;
  }
  int CellOf(const Vec2& grid_frame, int* i, int* j) const {
    *i = static_cast<int>(std::floor((grid_frame.x - x_min) / resolution));
    *j = static_cast<int>(std::floor((grid_frame.y - y_min) / resolution));
    return Contains(*i, *j);
  }
  Vec2 CellCenter(int i, int j) const {
    return {x_min + (i + 0.5) * resolution, y_min + (j + 0.5) * resolution};
  }
  int Flatten(int i, int j) const { return i * ny + j; }
};

struct CellIndex {
  int i = 0;
  int j = 0;
  bool operator==(const CellIndex&) const = default;
};

// All cells whose square overlaps (with positive area) the footprint
// inflated by margin lambda on every side. Cells are emitted in
// ascending (i, j) scan order. Footprint corners are given in world
// coordinates and tested in the grid frame.
std::vector<CellIndex> FootprintCells(const FootprintPolygon& fp,
                                      const GridGeometry& grid, double lambda);

// Same test for an arbitrary convex polygon already in the grid frame.
std::vector<CellIndex> PolygonCells(const std::array<Vec2, 4>& grid_corners,
                                    const GridGeometry& grid);

// Boolean occlusion mask (1 = occluded): a cell is occluded iff the ray
// from the sensor origin to the cell center crosses some obstacle
// boundary strictly before reaching the center. Origin and obstacles in
// world coordinates; origin must lie inside the grid.
std::vector<uint8_t> OcclusionMask(const Vec2& origin,
                                   const std::vector<ConvexPolygon>& obstacles,
                                   const GridGeometry& grid);

// Visibility of a single target point given occluding polygons
// (world frame); used to decide whether an actor is seen at plan time.
bool PointVisible(const Vec2& origin, const Vec2& target,
                  const std::vector<ConvexPolygon>& obstacles);

}  // namespace ogp
