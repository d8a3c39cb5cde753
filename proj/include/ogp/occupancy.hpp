#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ogp/grid_geometry.hpp"
#include "ogp/world.hpp"

namespace ogp {

// Simulated-perception parameters: isotropic positional blur growing
// with the horizon, and the probability assigned to occluded cells.
struct ProducerParams {
  double sigma0 = 0.2;   // m at t = 0
  double sigma1 = 0.3;   // m per second of horizon
  double p_occ = 0.5;
};

// Subclass identifier within a root class layer.
struct SubclassRef {
  RootClass root = RootClass::kVehicle;
  int index = 0;
};

// Vehicle layer: oncoming, conflicting, on_route, stationary, others,
// occluded, free. Pedestrian/bike layers: occupied, occluded, free.
constexpr int kVehicleSubclassCount = 7;
constexpr int kSmallSubclassCount = 3;
constexpr int kVehicleOccludedIndex = 5;
constexpr int kVehicleFreeIndex = 6;
constexpr int kSmallOccupiedIndex = 0;
constexpr int kSmallOccludedIndex = 1;
constexpr int kSmallFreeIndex = 2;

int SubclassCount(RootClass c);
int OccludedIndex(RootClass c);
int FreeIndex(RootClass c);
const std::vector<std::string>& SubclassNames(RootClass c);

// Parses "vehicle.oncoming", "pedestrian.occupied", ... Throws
// InvalidInputError for unknown names.
SubclassRef ParseSubclass(const std::string& name);
std::string SubclassName(const SubclassRef& ref);

// Per-root-class categorical occupancy over (horizon, i, j). Layers
// with no visible actors are kept implicit: either uniformly free, or
// fully determined by the plan-time occlusion mask.
class SemanticOccupancyGrid {
 public:
  enum class LayerState { kUniformFree, kOcclusionOnly, kDense };

  SemanticOccupancyGrid() = default;
  explicit SemanticOccupancyGrid(const GridGeometry& geom) { Reset(geom); }

  void Reset(const GridGeometry& geom);

  const GridGeometry& geometry() const { return geom_; }
  const std::vector<uint8_t>& occlusion_mask() const { return occlusion_; }
  LayerState layer_state(RootClass c) const { return state_[Idx(c)]; }
  double p_occ() const { return p_occ_; }

  double Prob(RootClass c, int horizon, int i, int j, int sub) const;

  // Max probability of each subclass of the root class over a cell
  // set at one horizon; out must hold SubclassCount(c) doubles.
  void MaxOverCells(RootClass c, int horizon, const std::vector<CellIndex>& cells,
                    double* out) const;

  uint64_t Signature() const { return signature_; }
  uint32_t clipped_paintings() const { return clipped_paintings_; }

 private:
  friend SemanticOccupancyGrid& RasterizeSceneInto(const Scenario&, double,
                                                   const GridGeometry&,
                                                   const ProducerParams&,
                                                   SemanticOccupancyGrid&);
  static int Idx(RootClass c) { return static_cast<int>(c); }
  double* DensePtr(RootClass c, int horizon, int i, int j) {
    const int n = SubclassCount(c);
    return dense_[Idx(c)].data() +
           (static_cast<size_t>(horizon) * geom_.NumCells() +
            static_cast<size_t>(geom_.Flatten(i, j))) * n;
  }
  const double* DensePtr(RootClass c, int horizon, int i, int j) const {
    return const_cast<SemanticOccupancyGrid*>(this)->DensePtr(c, horizon, i, j);
  }
  void Materialize(RootClass c);

  GridGeometry geom_;
  std::vector<uint8_t> occlusion_;
  std::vector<double> dense_[3];
  LayerState state_[3] = {LayerState::kUniformFree, LayerState::kUniformFree,
                          LayerState::kUniformFree};
  double p_occ_ = 0.5;
  uint64_t signature_ = 0;
  uint32_t clipped_paintings_ = 0;
};

// Builds the grid from scripted ground truth: visible actor footprints
// painted per subclass at each horizon, blurred by sigma(t) = sigma0 +
// sigma1*t, occlusion seeded from plan-time visibility, free holding
// the residual mass.
SemanticOccupancyGrid RasterizeScene(const Scenario& scenario, double plan_time,
                                     const GridGeometry& geom,
                                     const ProducerParams& params);
SemanticOccupancyGrid& RasterizeSceneInto(const Scenario& scenario,
                                          double plan_time,
                                          const GridGeometry& geom,
                                          const ProducerParams& params,
                                          SemanticOccupancyGrid& grid);

// Max subclass probability over the (lambda-inflated) footprint cells
// at one horizon; 0 when the footprint misses the grid entirely.
double QueryMaxOccupancy(const SemanticOccupancyGrid& grid, const SubclassRef& c,
                         const FootprintPolygon& fp, int horizon, double lambda);
double QueryMaxOccupancy(const SemanticOccupancyGrid& grid,
                         const std::string& subclass_name,
                         const FootprintPolygon& fp, int horizon, double lambda);

// Debug dump: one file per (class, horizon), row-major probabilities
// behind a self-describing header.
void DumpGridLayer(const SemanticOccupancyGrid& grid, RootClass c, int horizon,
                   const std::string& path);

}  // namespace ogp
