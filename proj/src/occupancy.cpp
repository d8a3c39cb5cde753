#include "ogp/occupancy.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

namespace ogp {

namespace {

const std::vector<std::string> kVehicleNames = {
    "oncoming", "conflicting", "on_route", "stationary",
    "others",   "occluded",    "free"};
const std::vector<std::string> kSmallNames = {"occupied", "occluded", "free"};

uint64_t FnvMix(uint64_t h, uint64_t v) {
  h ^= v;
  return h * 1099511628211ULL;
}

uint64_t FnvDouble(uint64_t h, double d) {
  uint64_t bits = 0;
  static_assert(sizeof(bits) == sizeof(d));
  std::memcpy(&bits, &d, sizeof(bits));
  return FnvMix(h, bits);
}

}  // namespace

int SubclassCount(RootClass c) {
  return c == RootClass::kVehicle ? kVehicleSubclassCount : kSmallSubclassCount;
}
int OccludedIndex(RootClass c) {
  return c == RootClass::kVehicle ? kVehicleOccludedIndex : kSmallOccludedIndex;
}
int FreeIndex(RootClass c) {
  return c == RootClass::kVehicle ? kVehicleFreeIndex : kSmallFreeIndex;
}

const std::vector<std::string>& SubclassNames(RootClass c) {
  return c == RootClass::kVehicle ? kVehicleNames : kSmallNames;
}

SubclassRef ParseSubclass(const std::string& name) {
  const size_t dot = name.find('.');
  if (dot != std::string::npos) {
    const std::string root = name.substr(0, dot);
    const std::string sub = name.substr(dot + 1);
    RootClass c;
    if (root == "vehicle") {
      c = RootClass::kVehicle;
    } else if (root == "pedestrian") {
      c = RootClass::kPedestrian;
    } else if (root == "bike") {
      c = RootClass::kBike;
    } else {
      throw InvalidInputError("unknown root class '" + root + "'");
    }
    const auto& names = SubclassNames(c);
    const auto it = std::find(names.begin(), names.end(), sub);
    if (it == names.end()) {
      throw InvalidInputError("unknown subclass '" + name + "'");
    }
    return {c, static_cast<int>(it - names.begin())};
  }
  throw InvalidInputError("subclass name must be 'class.subclass': " + name);
}

std::string SubclassName(const SubclassRef& ref) {
  return std::string(ToString(ref.root)) + "." +
         SubclassNames(ref.root)[static_cast<size_t>(ref.index)];
}

void SemanticOccupancyGrid::Reset(const GridGeometry& geom) {
  geom_ = geom;
  occlusion_.assign(static_cast<size_t>(geom.NumCells()), 0);
  for (auto& layer : dense_) layer.clear();
  state_[0] = state_[1] = state_[2] = LayerState::kUniformFree;
  signature_ = 1469598103934665603ULL;
  clipped_paintings_ = 0;
}

void SemanticOccupancyGrid::Materialize(RootClass c) {
  if (state_[Idx(c)] == LayerState::kDense) return;
  const int n = SubclassCount(c);
  const size_t total = static_cast<size_t>(geom_.num_horizons) *
                       static_cast<size_t>(geom_.NumCells()) * n;
  auto& layer = dense_[Idx(c)];
  layer.assign(total, 0.0);
  const int free_idx = FreeIndex(c);
  for (size_t cell = 0; cell < total / n; ++cell) {
    layer[cell * n + free_idx] = 1.0;
  }
  state_[Idx(c)] = LayerState::kDense;
}

double SemanticOccupancyGrid::Prob(RootClass c, int horizon, int i, int j,
                                   int sub) const {
  if (!geom_.Contains(i, j)) throw InvalidInputError("cell outside grid");
  if (sub < 0 || sub >= SubclassCount(c)) throw InvalidInputError("bad subclass index");
  switch (state_[Idx(c)]) {
    case LayerState::kUniformFree:
      return sub == FreeIndex(c) ? 1.0 : 0.0;
    case LayerState::kOcclusionOnly: {
      const bool occ = occlusion_[static_cast<size_t>(geom_.Flatten(i, j))] != 0;
      if (sub == OccludedIndex(c)) return occ ? p_occ_ : 0.0;
      if (sub == FreeIndex(c)) return occ ? 1.0 - p_occ_ : 1.0;
      return 0.0;
    }
    case LayerState::kDense:
      return DensePtr(c, horizon, i, j)[sub];
  }
  return 0.0;
}

void SemanticOccupancyGrid::MaxOverCells(RootClass c, int horizon,
                                         const std::vector<CellIndex>& cells,
                                         double* out) const {
  const int n = SubclassCount(c);
  std::fill(out, out + n, 0.0);
  if (cells.empty()) return;
  switch (state_[Idx(c)]) {
    case LayerState::kUniformFree:
      out[FreeIndex(c)] = 1.0;
      return;
    case LayerState::kOcclusionOnly: {
      bool any_occ = false, any_vis = false;
      for (const CellIndex& cell : cells) {
        (occlusion_[static_cast<size_t>(geom_.Flatten(cell.i, cell.j))] ? any_occ
                                                                        : any_vis) = true;
      }
      if (any_occ) out[OccludedIndex(c)] = p_occ_;
      out[FreeIndex(c)] = any_vis ? 1.0 : (any_occ ? 1.0 - p_occ_ : 0.0);
      return;
    }
    case LayerState::kDense:
      for (const CellIndex& cell : cells) {
        const double* p = DensePtr(c, horizon, cell.i, cell.j);
        for (int k = 0; k < n; ++k) out[k] = std::max(out[k], p[k]);
      }
      return;
  }
}

namespace {

struct BlurKernel {
  int radius = 0;
  std::vector<double> weights;  // size 2*radius + 1, sums to 1
};

BlurKernel MakeKernel(double sigma, double resolution) {
  BlurKernel k;
  if (sigma <= 1e-12) {
    k.weights = {1.0};
    return k;
  }
  k.radius = static_cast<int>(std::ceil(3.0 * sigma / resolution));
  k.weights.resize(2 * k.radius + 1);
  double sum = 0.0;
  for (int i = -k.radius; i <= k.radius; ++i) {
    const double x = i * resolution;
    const double w = std::exp(-0.5 * x * x / (sigma * sigma));
    k.weights[static_cast<size_t>(i + k.radius)] = w;
    sum += w;
  }
  for (double& w : k.weights) w /= sum;
  return k;
}

}  // namespace

SemanticOccupancyGrid& RasterizeSceneInto(const Scenario& scenario,
                                          double plan_time,
                                          const GridGeometry& geom,
                                          const ProducerParams& params,
                                          SemanticOccupancyGrid& grid) {
  grid.Reset(geom);
  grid.p_occ_ = params.p_occ;

  // Plan-time occlusion from every actor body.
  std::vector<ConvexPolygon> obstacles;
  obstacles.reserve(scenario.actors.size());
  for (const Actor& actor : scenario.actors) {
    obstacles.push_back(actor.PolygonAt(plan_time));
  }
  const Vec2 sensor{geom.center};
  bool any_occlusion = false;
  if (!obstacles.empty()) {
    grid.occlusion_ = OcclusionMask(sensor, obstacles, geom);
    any_occlusion = std::find(grid.occlusion_.begin(), grid.occlusion_.end(),
                              uint8_t{1}) != grid.occlusion_.end();
  }

  // An actor is seen when any probe point of its plan-time footprint
  // has a clear ray from the sensor (its own body never blocks itself).
  std::vector<bool> visible(scenario.actors.size(), true);
  for (size_t a = 0; a < scenario.actors.size(); ++a) {
    std::vector<ConvexPolygon> others;
    for (size_t b = 0; b < scenario.actors.size(); ++b) {
      if (b != a) others.push_back(obstacles[b]);
    }
    const auto corners = scenario.actors[a].FootprintAt(plan_time).Corners();
    bool seen = PointVisible(sensor, scenario.actors[a].PoseAt(plan_time).position, others);
    for (const Vec2& corner : corners) {
      if (seen) break;
      seen = PointVisible(sensor, corner, others);
    }
    visible[a] = seen;
  }

  bool any_visible[3] = {false, false, false};
  for (size_t a = 0; a < scenario.actors.size(); ++a) {
    if (visible[a]) any_visible[static_cast<int>(scenario.actors[a].root)] = true;
  }
  for (RootClass c : {RootClass::kVehicle, RootClass::kPedestrian, RootClass::kBike}) {
    const int idx = static_cast<int>(c);
    if (any_visible[idx]) {
      grid.Materialize(c);
    } else if (any_occlusion) {
      grid.state_[idx] = SemanticOccupancyGrid::LayerState::kOcclusionOnly;
    }
  }

  std::vector<size_t> occluded_cells;
  if (any_occlusion) {
    for (size_t idx = 0; idx < grid.occlusion_.size(); ++idx) {
      if (grid.occlusion_[idx]) occluded_cells.push_back(idx);
    }
  }

  uint64_t sig = grid.signature_;
  std::vector<double> tile;
  std::vector<double> tile_tmp;
  std::vector<size_t> touched;

  for (RootClass c : {RootClass::kVehicle, RootClass::kPedestrian, RootClass::kBike}) {
    if (grid.state_[static_cast<int>(c)] != SemanticOccupancyGrid::LayerState::kDense) {
      continue;
    }
    const int n_sub = SubclassCount(c);
    const int free_idx = FreeIndex(c);
    const int occ_idx = OccludedIndex(c);

    for (int h = 0; h < geom.num_horizons; ++h) {
      const double t = plan_time + geom.HorizonTime(h);
      const BlurKernel kernel = MakeKernel(params.sigma0 + params.sigma1 * geom.HorizonTime(h),
                                           geom.resolution);
      touched.clear();

      for (size_t a = 0; a < scenario.actors.size(); ++a) {
        const Actor& actor = scenario.actors[a];
        if (actor.root != c || !visible[a]) continue;
        int sub = kSmallOccupiedIndex;
        if (c == RootClass::kVehicle) {
          sub = static_cast<int>(ClassifyVehicle(actor, t, scenario.map, scenario.route));
        }
        const std::vector<CellIndex> cells =
            FootprintCells(actor.FootprintAt(t), geom, 0.0);
        if (cells.empty()) {
          ++grid.clipped_paintings_;
          continue;
        }
        if (kernel.radius == 0) {
          for (const CellIndex& cell : cells) {
            const size_t flat = static_cast<size_t>(geom.Flatten(cell.i, cell.j));
            grid.dense_[static_cast<int>(c)]
                       [(static_cast<size_t>(h) * geom.NumCells() + flat) * n_sub + sub] += 1.0;
            touched.push_back(flat);
          }
          continue;
        }
        // Separable truncated Gaussian over a local tile.
        int imin = cells.front().i, imax = cells.front().i;
        int jmin = cells.front().j, jmax = cells.front().j;
        for (const CellIndex& cell : cells) {
          imin = std::min(imin, cell.i);
          imax = std::max(imax, cell.i);
          jmin = std::min(jmin, cell.j);
          jmax = std::max(jmax, cell.j);
        }
        const int r = kernel.radius;
        const int ti0 = imin - r, ti1 = imax + r;
        const int tj0 = jmin - r, tj1 = jmax + r;
        const int tw = ti1 - ti0 + 1, th = tj1 - tj0 + 1;
        tile.assign(static_cast<size_t>(tw) * th, 0.0);
        tile_tmp.assign(tile.size(), 0.0);
        for (const CellIndex& cell : cells) {
          tile[static_cast<size_t>(cell.i - ti0) * th + (cell.j - tj0)] = 1.0;
        }
        // Pass along i.
        for (int ti = 0; ti < tw; ++ti) {
          for (int tj = 0; tj < th; ++tj) {
            const double m = tile[static_cast<size_t>(ti) * th + tj];
            if (m == 0.0) continue;
            for (int k = -r; k <= r; ++k) {
              const int di = ti + k;
              if (di < 0 || di >= tw) continue;
              tile_tmp[static_cast<size_t>(di) * th + tj] +=
                  m * kernel.weights[static_cast<size_t>(k + r)];
            }
          }
        }
        // Pass along j, accumulate into the layer.
        for (int ti = 0; ti < tw; ++ti) {
          const int gi = ti0 + ti;
          if (gi < 0 || gi >= geom.nx) continue;
          for (int tj = 0; tj < th; ++tj) {
            const double m = tile_tmp[static_cast<size_t>(ti) * th + tj];
            if (m == 0.0) continue;
            for (int k = -r; k <= r; ++k) {
              const int gj = tj0 + tj + k;
              if (gj < 0 || gj >= geom.ny) continue;
              const size_t flat = static_cast<size_t>(geom.Flatten(gi, gj));
              auto& slot = grid.dense_[static_cast<int>(c)]
                  [(static_cast<size_t>(h) * geom.NumCells() + flat) * n_sub + sub];
              if (slot == 0.0) touched.push_back(flat);
              slot += m * kernel.weights[static_cast<size_t>(k + r)];
            }
          }
        }
      }

      std::sort(touched.begin(), touched.end());
      touched.erase(std::unique(touched.begin(), touched.end()), touched.end());

      // Combine masses, occlusion and free into one categorical per cell.
      double* base = grid.dense_[static_cast<int>(c)].data() +
                     static_cast<size_t>(h) * geom.NumCells() * n_sub;
      double painted_mass = 0.0;
      auto finalize = [&](size_t flat) {
        double* p = base + flat * n_sub;
        const double p_occl = grid.occlusion_[flat] ? params.p_occ : 0.0;
        double mass = 0.0;
        for (int k = 0; k < n_sub; ++k) {
          if (k == free_idx || k == occ_idx) continue;
          mass += p[k];
        }
        const double avail = 1.0 - p_occl;
        const double scale = mass > avail ? avail / mass : 1.0;
        double occupied = 0.0;
        for (int k = 0; k < n_sub; ++k) {
          if (k == free_idx || k == occ_idx) continue;
          p[k] *= scale;
          occupied += p[k];
        }
        p[occ_idx] = p_occl;
        p[free_idx] = std::max(0.0, 1.0 - p_occl - occupied);
        painted_mass += occupied;
      };
      for (size_t flat : touched) {
        if (!grid.occlusion_[flat]) finalize(flat);
      }
      for (size_t flat : occluded_cells) finalize(flat);

      sig = FnvDouble(sig, painted_mass);
      sig = FnvMix(sig, static_cast<uint64_t>(touched.size()));
    }
  }
  sig = FnvMix(sig, static_cast<uint64_t>(occluded_cells.size()));
  grid.signature_ = sig;
  return grid;
}

SemanticOccupancyGrid RasterizeScene(const Scenario& scenario, double plan_time,
                                     const GridGeometry& geom,
                                     const ProducerParams& params) {
  SemanticOccupancyGrid grid;
  RasterizeSceneInto(scenario, plan_time, geom, params, grid);
  return grid;
}

double QueryMaxOccupancy(const SemanticOccupancyGrid& grid, const SubclassRef& c,
                         const FootprintPolygon& fp, int horizon, double lambda) {
  if (horizon < 0 || horizon >= grid.geometry().num_horizons) {
    throw InvalidInputError("horizon index out of range");
  }
  if (c.index < 0 || c.index >= SubclassCount(c.root)) {
    throw InvalidInputError("bad subclass index");
  }
  const std::vector<CellIndex> cells = FootprintCells(fp, grid.geometry(), lambda);
  if (cells.empty()) return 0.0;
  double out[kVehicleSubclassCount];
  grid.MaxOverCells(c.root, horizon, cells, out);
  return out[c.index];
}

double QueryMaxOccupancy(const SemanticOccupancyGrid& grid,
                         const std::string& subclass_name,
                         const FootprintPolygon& fp, int horizon, double lambda) {
  return QueryMaxOccupancy(grid, ParseSubclass(subclass_name), fp, horizon, lambda);
}

void DumpGridLayer(const SemanticOccupancyGrid& grid, RootClass c, int horizon,
                   const std::string& path) {
  const GridGeometry& geom = grid.geometry();
  std::ofstream out(path);
  if (!out) throw InvalidInputError("cannot write grid dump: " + path);
  out << "# ogp occupancy grid dump v1\n";
  out << "# class " << ToString(c) << "\n";
  out << "# horizon_index " << horizon << "\n";
  out << "# horizon_time " << geom.HorizonTime(horizon) << "\n";
  out << "# center_x " << geom.center.x << " center_y " << geom.center.y
      << " heading " << geom.heading << "\n";
  out << "# resolution " << geom.resolution << " nx " << geom.nx << " ny "
      << geom.ny << " x_min " << geom.x_min << " y_min " << geom.y_min << "\n";
  out << "# subclasses";
  for (const std::string& name : SubclassNames(c)) out << " " << name;
  out << "\n";
  out.precision(17);
  for (int i = 0; i < geom.nx; ++i) {
    for (int j = 0; j < geom.ny; ++j) {
      for (int k = 0; k < SubclassCount(c); ++k) {
        if (j > 0 || k > 0) out << " ";
        out << grid.Prob(c, horizon, i, j, k);
      }
    }
    out << "\n";
  }
}

}  // namespace ogp
