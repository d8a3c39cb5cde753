#pragma once

#include <string>
#include <vector>

#include "ogp/occupancy.hpp"
#include "ogp/sampler.hpp"
#include "ogp/world.hpp"

namespace ogp {

struct RenderOptions {
  int horizon = 0;            // occupancy horizon index to draw
  double min_prob = 0.05;     // cells below this stay blank
  double pixels_per_meter = 4.0;
  bool draw_candidates = true;
  double time = 0.0;          // actor poses drawn at this time
};

// Top-down SVG frame: lane strips, occupancy heat layers (subclass
// palette matching the class hierarchy figures), ground-truth actor
// boxes, candidate set and the chosen trajectory.
void RenderSvg(const Scenario& scenario, const SemanticOccupancyGrid* grid,
               const std::vector<Trajectory>* candidates,
               const Trajectory* chosen, const RenderOptions& options,
               const std::string& path);

}  // namespace ogp
