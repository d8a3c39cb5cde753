#include "ogp/render.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ogp/scenario_io.hpp"

namespace ogp {

namespace {

// Subclass palette: oncoming red, conflicting orange, on-route dark
// green, stationary dark blue, others purple; pedestrians light green,
// bikes brown, occlusion cyan for every class.
const char* VehicleColor(int sub) {
  switch (sub) {
    case 0: return "#d62728";
    case 1: return "#ff7f0e";
    case 2: return "#1b5e20";
    case 3: return "#1a237e";
    case 4: return "#7b1fa2";
    case kVehicleOccludedIndex: return "#00bcd4";
  }
  return "#000000";
}

const char* SmallClassColor(RootClass c, int sub) {
  if (sub == kSmallOccludedIndex) return "#00bcd4";
  return c == RootClass::kPedestrian ? "#8bc34a" : "#795548";
}

struct Mapper {
  double min_x = 0.0, min_y = 0.0, max_x = 0.0, max_y = 0.0, scale = 4.0;
  double Width() const { return (max_x - min_x) * scale; }
  double Height() const { return (max_y - min_y) * scale; }
  double X(double wx) const { return (wx - min_x) * scale; }
  double Y(double wy) const { return (max_y - wy) * scale; }
};

void Polyline(std::ostringstream& svg, const Mapper& m,
              const std::vector<Vec2>& pts, const char* style) {
  svg << "<polyline fill=\"none\" " << style << " points=\"";
  for (const Vec2& p : pts) svg << m.X(p.x) << "," << m.Y(p.y) << " ";
  svg << "\"/>\n";
}

template <typename Corners>
void Polygon(std::ostringstream& svg, const Mapper& m, const Corners& corners,
             const std::string& style) {
  svg << "<polygon " << style << " points=\"";
  for (const Vec2& p : corners) svg << m.X(p.x) << "," << m.Y(p.y) << " ";
  svg << "\"/>\n";
}

}  // namespace

void RenderSvg(const Scenario& scenario, const SemanticOccupancyGrid* grid,
               const std::vector<Trajectory>* candidates,
               const Trajectory* chosen, const RenderOptions& options,
               const std::string& path) {
  Mapper m;
  m.scale = options.pixels_per_meter;
  m.min_x = std::numeric_limits<double>::infinity();
  m.min_y = m.min_x;
  m.max_x = -m.min_x;
  m.max_y = -m.min_x;
  for (const Lane& lane : scenario.map.lanes()) {
    for (const Vec2& p : lane.centerline.vertices()) {
      m.min_x = std::min(m.min_x, p.x - lane.width);
      m.max_x = std::max(m.max_x, p.x + lane.width);
      m.min_y = std::min(m.min_y, p.y - lane.width);
      m.max_y = std::max(m.max_y, p.y + lane.width);
    }
  }
  m.min_x -= 5.0;
  m.min_y -= 5.0;
  m.max_x += 5.0;
  m.max_y += 5.0;

  std::ostringstream svg;
  svg.precision(7);
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << m.Width()
      << "\" height=\"" << m.Height() << "\" viewBox=\"0 0 " << m.Width() << " "
      << m.Height() << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"#fafafa\"/>\n";

  // Lane strips with boundary styling (dashed = crossable).
  for (const Lane& lane : scenario.map.lanes()) {
    std::vector<Vec2> left, right;
    const auto& verts = lane.centerline.vertices();
    for (size_t i = 0; i < verts.size(); ++i) {
      const double s = lane.centerline.arc_lengths()[i];
      const PathPoint p = lane.centerline.At(s);
      left.push_back(p.position + 0.5 * lane.width * LeftNormal(p.heading));
      right.push_back(p.position - 0.5 * lane.width * LeftNormal(p.heading));
    }
    std::vector<Vec2> strip = left;
    strip.insert(strip.end(), right.rbegin(), right.rend());
    Polygon(svg, m, strip, "fill=\"#e0e0e0\" stroke=\"none\"");
    Polyline(svg, m, lane.centerline.vertices(),
             "stroke=\"#bdbdbd\" stroke-width=\"1\" stroke-dasharray=\"6,6\"");
    const char* solid = "stroke=\"#616161\" stroke-width=\"1.5\"";
    const char* dashed =
        "stroke=\"#9e9e9e\" stroke-width=\"1\" stroke-dasharray=\"8,8\"";
    Polyline(svg, m, left, lane.left_crossable ? dashed : solid);
    Polyline(svg, m, right, lane.right_crossable ? dashed : solid);
  }

  // Occupancy heat layers.
  if (grid != nullptr) {
    const GridGeometry& geom = grid->geometry();
    const double res = geom.resolution;
    for (int i = 0; i < geom.nx; ++i) {
      for (int j = 0; j < geom.ny; ++j) {
        for (RootClass c :
             {RootClass::kVehicle, RootClass::kPedestrian, RootClass::kBike}) {
          const int n = SubclassCount(c);
          for (int k = 0; k < n; ++k) {
            if (k == FreeIndex(c)) continue;
            const double p = grid->Prob(c, options.horizon, i, j, k);
            if (p < options.min_prob) continue;
            const Vec2 c0 = geom.GridToWorld(geom.CellCenter(i, j));
            const char* color = c == RootClass::kVehicle
                                    ? VehicleColor(k)
                                    : SmallClassColor(c, k);
            std::array<Vec2, 4> cell;
            const Vec2 ex = 0.5 * res * Heading(geom.heading);
            const Vec2 ey = 0.5 * res * LeftNormal(geom.heading);
            cell[0] = c0 + ex + ey;
            cell[1] = c0 - ex + ey;
            cell[2] = c0 - ex - ey;
            cell[3] = c0 + ex - ey;
            std::ostringstream style;
            style << "fill=\"" << color << "\" fill-opacity=\"" << 0.85 * p
                  << "\" stroke=\"none\"";
            Polygon(svg, m, cell, style.str());
          }
        }
      }
    }
  }

  // Candidate fan and the chosen trajectory.
  if (candidates != nullptr && options.draw_candidates) {
    for (const Trajectory& traj : *candidates) {
      std::vector<Vec2> pts;
      for (const BicycleState& b : traj.states) pts.push_back(b.Position());
      Polyline(svg, m, pts, "stroke=\"#90a4ae\" stroke-width=\"0.6\" stroke-opacity=\"0.5\"");
    }
  }
  if (chosen != nullptr) {
    std::vector<Vec2> pts;
    for (const BicycleState& b : chosen->states) pts.push_back(b.Position());
    Polyline(svg, m, pts, "stroke=\"#000000\" stroke-width=\"2\"");
  }

  // Ground-truth actor boxes and the SDV.
  for (const Actor& actor : scenario.actors) {
    Polygon(svg, m, actor.FootprintAt(options.time).Corners(),
            "fill=\"none\" stroke=\"#212121\" stroke-width=\"1.2\"");
  }
  FootprintPolygon sdv;
  sdv.x = scenario.sdv.x;
  sdv.y = scenario.sdv.y;
  sdv.theta = scenario.sdv.theta;
  Polygon(svg, m, sdv.Corners(), "fill=\"#212121\" stroke=\"none\"");

  svg << "</svg>\n";
  WriteTextFile(path, svg.str());
}

}  // namespace ogp
