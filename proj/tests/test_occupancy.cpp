#include <cmath>
#include <random>

#include "doctest.h"
#include "ogp/occupancy.hpp"
#include "oracles.hpp"

using namespace ogp;

namespace {

Lane StraightLane(int id, Vec2 from, Vec2 to) {
  Lane lane;
  lane.id = id;
  lane.raw_centerline = {from, to};
  lane.centerline = DrivingPath::FromPolyline(lane.raw_centerline);
  return lane;
}

Scenario BaseScenario() {
  Scenario sc;
  sc.map.Add(StraightLane(1, {-80.0, 0.0}, {120.0, 0.0}));
  sc.route.lane_ids = {1};
  sc.sdv = BicycleState{0.0, 0.0, 0.0, 10.0, 0.0, 0.0};
  sc.duration = 20.0;
  return sc;
}

Actor VehicleActor(int id, Vec2 start, double heading, double v,
                   double duration = 20.0) {
  Actor actor;
  actor.id = id;
  actor.root = RootClass::kVehicle;
  for (double t = 0.0; t <= duration + 1e-9; t += 0.5) {
    actor.waypoints.push_back({t, start.x + v * t * std::cos(heading),
                               start.y + v * t * std::sin(heading), heading, v});
  }
  return actor;
}

GridGeometry GeomFor(const Scenario& sc) {
  GridGeometry geom;
  geom.center = sc.sdv.Position();
  geom.heading = sc.sdv.theta;
  return geom;
}

double SumCategorical(const SemanticOccupancyGrid& grid, RootClass c, int h,
                      int i, int j) {
  double sum = 0.0;
  for (int k = 0; k < SubclassCount(c); ++k) sum += grid.Prob(c, h, i, j, k);
  return sum;
}

}  // namespace

TEST_SUITE("occupancy") {

TEST_CASE("subclass name parsing") {
  const SubclassRef ref = ParseSubclass("vehicle.oncoming");
  CHECK(ref.root == RootClass::kVehicle);
  CHECK(ref.index == 0);
  CHECK(ParseSubclass("pedestrian.occupied").index == kSmallOccupiedIndex);
  CHECK(ParseSubclass("bike.occluded").index == kSmallOccludedIndex);
  CHECK_THROWS_AS(ParseSubclass("vehicle.nonsense"), InvalidInputError);
  CHECK_THROWS_AS(ParseSubclass("plane.occupied"), InvalidInputError);
}

TEST_CASE("empty scene is uniformly free") {
  const Scenario sc = BaseScenario();
  const SemanticOccupancyGrid grid =
      RasterizeScene(sc, 0.0, GeomFor(sc), ProducerParams{});
  CHECK(grid.layer_state(RootClass::kVehicle) ==
        SemanticOccupancyGrid::LayerState::kUniformFree);
  for (RootClass c : {RootClass::kVehicle, RootClass::kPedestrian, RootClass::kBike}) {
    CHECK(grid.Prob(c, 0, 10, 10, FreeIndex(c)) == 1.0);
    CHECK(grid.Prob(c, 10, 300, 150, FreeIndex(c)) == 1.0);
  }
  FootprintPolygon fp;
  fp.x = 20.0;
  CHECK(QueryMaxOccupancy(grid, "vehicle.stationary", fp, 0, 0.0) == 0.0);
  CHECK(QueryMaxOccupancy(grid, "pedestrian.occupied", fp, 5, 0.5) == 0.0);
}

TEST_CASE("stationary vehicle paints its footprint at every horizon") {
  Scenario sc = BaseScenario();
  sc.actors.push_back(VehicleActor(1, {20.0, 0.0}, 0.0, 0.0));
  ProducerParams params;
  params.sigma0 = 0.0;
  params.sigma1 = 0.0;
  params.p_occ = 0.0;  // no occlusion mixing in this check
  const GridGeometry geom = GeomFor(sc);
  const SemanticOccupancyGrid grid = RasterizeScene(sc, 0.0, geom, params);

  const auto cells = FootprintCells(sc.actors[0].FootprintAt(0.0), geom, 0.0);
  REQUIRE(!cells.empty());
  const int stationary = static_cast<int>(VehicleSubclass::kStationary);
  for (int h = 0; h < geom.num_horizons; ++h) {
    for (const CellIndex& cell : cells) {
      CHECK(grid.Prob(RootClass::kVehicle, h, cell.i, cell.j, stationary) == 1.0);
    }
  }
  // A cell far away stays free.
  CHECK(grid.Prob(RootClass::kVehicle, 0, 10, 10, kVehicleFreeIndex) == 1.0);

  // Conservation with zero blur: total painted mass equals cell count.
  for (int h = 0; h < geom.num_horizons; ++h) {
    double mass = 0.0;
    for (int i = 0; i < geom.nx; ++i) {
      for (int j = 0; j < geom.ny; ++j) {
        mass += grid.Prob(RootClass::kVehicle, h, i, j, stationary);
      }
    }
    CHECK(mass == doctest::Approx(static_cast<double>(cells.size())).epsilon(1e-12));
  }
}

TEST_CASE("moving vehicle: centroid advances and spread grows") {
  Scenario sc = BaseScenario();
  // 9.6 m/s advances exactly 12 cells per horizon, so the painted
  // pattern translates rigidly and variance growth isolates the blur.
  sc.actors.push_back(VehicleActor(1, {10.0, 0.0}, 0.0, 9.6));
  ProducerParams params;
  params.sigma0 = 0.2;
  params.sigma1 = 0.3;
  const GridGeometry geom = GeomFor(sc);
  const SemanticOccupancyGrid grid = RasterizeScene(sc, 0.0, geom, params);

  const int on_route = static_cast<int>(VehicleSubclass::kOnRoute);
  double prev_centroid = -1e9, prev_spread = -1e9;
  for (int h = 0; h < geom.num_horizons; ++h) {
    // Brute-force first and second moments over the whole grid.
    double mass = 0.0, mx = 0.0;
    for (int i = 0; i < geom.nx; ++i) {
      for (int j = 0; j < geom.ny; ++j) {
        const double p = grid.Prob(RootClass::kVehicle, h, i, j, on_route);
        mass += p;
        mx += p * geom.CellCenter(i, j).x;
      }
    }
    REQUIRE(mass > 0.0);
    const double centroid = mx / mass;
    double var = 0.0;
    for (int i = 0; i < geom.nx; ++i) {
      for (int j = 0; j < geom.ny; ++j) {
        const double p = grid.Prob(RootClass::kVehicle, h, i, j, on_route);
        const double dx = geom.CellCenter(i, j).x - centroid;
        var += p * dx * dx;
      }
    }
    const double spread = var / mass;
    if (h > 0) {
      CHECK(centroid - prev_centroid == doctest::Approx(4.8).epsilon(0.02));
      CHECK(spread > prev_spread);
    }
    prev_centroid = centroid;
    prev_spread = spread;
  }
}

TEST_CASE("normalization holds everywhere with blur and occlusion") {
  Scenario sc = BaseScenario();
  sc.actors.push_back(VehicleActor(1, {15.0, 1.0}, 0.1, 6.0));
  sc.actors.push_back(VehicleActor(2, {25.0, -2.0}, 0.0, 0.0));
  Actor ped;
  ped.id = 3;
  ped.root = RootClass::kPedestrian;
  ped.length = 0.6;
  ped.width = 0.6;
  for (double t = 0.0; t <= 20.0; t += 0.5) {
    ped.waypoints.push_back({t, 30.0, -4.0 + 1.2 * t, 0.5 * M_PI, 1.2});
  }
  sc.actors.push_back(ped);

  const GridGeometry geom = GeomFor(sc);
  const SemanticOccupancyGrid grid = RasterizeScene(sc, 0.0, geom, ProducerParams{});

  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> ui(0, geom.nx - 1);
  std::uniform_int_distribution<int> uj(0, geom.ny - 1);
  std::uniform_int_distribution<int> uh(0, geom.num_horizons - 1);
  for (RootClass c : {RootClass::kVehicle, RootClass::kPedestrian, RootClass::kBike}) {
    for (int trial = 0; trial < 4000; ++trial) {
      const int h = uh(rng);
      const int i = ui(rng);
      const int j = uj(rng);
      CHECK(SumCategorical(grid, c, h, i, j) == doctest::Approx(1.0).epsilon(1e-6));
      for (int k = 0; k < SubclassCount(c); ++k) {
        const double p = grid.Prob(c, h, i, j, k);
        CHECK(p >= 0.0);
        CHECK(p <= 1.0 + 1e-12);
      }
    }
  }
  // Dense sweep across one horizon of the vehicle layer.
  for (int i = 0; i < geom.nx; ++i) {
    for (int j = 0; j < geom.ny; ++j) {
      const double sum = SumCategorical(grid, RootClass::kVehicle, 4, i, j);
      REQUIRE(std::abs(sum - 1.0) <= 1e-6);
    }
  }
}

TEST_CASE("occlusion seeds the occluded subclass and hides actors") {
  Scenario sc = BaseScenario();
  // A wall-like parked truck close to the sensor, and a car far behind it.
  Actor truck = VehicleActor(1, {15.0, 0.0}, 0.5 * M_PI, 0.0);
  truck.length = 12.0;
  truck.width = 2.5;
  sc.actors.push_back(truck);
  sc.actors.push_back(VehicleActor(2, {30.0, 0.0}, 0.0, 0.0));

  ProducerParams params;
  params.sigma0 = 0.0;
  params.sigma1 = 0.0;
  params.p_occ = 0.5;
  const GridGeometry geom = GeomFor(sc);
  const SemanticOccupancyGrid grid = RasterizeScene(sc, 0.0, geom, params);

  // The hidden car paints nothing; its cells read occluded instead.
  int i = 0, j = 0;
  REQUIRE(geom.CellOf(geom.WorldToGrid({30.0, 0.0}), &i, &j));
  const int stationary = static_cast<int>(VehicleSubclass::kStationary);
  CHECK(grid.Prob(RootClass::kVehicle, 0, i, j, stationary) == 0.0);
  CHECK(grid.Prob(RootClass::kVehicle, 0, i, j, kVehicleOccludedIndex) ==
        doctest::Approx(0.5));
  CHECK(grid.Prob(RootClass::kPedestrian, 0, i, j, kSmallOccludedIndex) ==
        doctest::Approx(0.5));
  // Occlusion persists across horizons.
  CHECK(grid.Prob(RootClass::kVehicle, 10, i, j, kVehicleOccludedIndex) ==
        doctest::Approx(0.5));
  // The truck itself is visible and painted. Its interior cells sit
  // behind its own near face, so painted mass shares the categorical
  // with the occluded subclass there.
  const auto truck_cells = FootprintCells(sc.actors[0].FootprintAt(0.0), geom, 0.0);
  bool any_painted = false;
  for (const CellIndex& cell : truck_cells) {
    any_painted = any_painted ||
                  grid.Prob(RootClass::kVehicle, 0, cell.i, cell.j, stationary) >= 0.45;
  }
  CHECK(any_painted);
}

TEST_CASE("query max occupancy") {
  Scenario sc = BaseScenario();
  sc.actors.push_back(VehicleActor(1, {20.0, 0.0}, 0.0, 0.0));
  ProducerParams params;  // defaults: some blur
  const GridGeometry geom = GeomFor(sc);
  const SemanticOccupancyGrid grid = RasterizeScene(sc, 0.0, geom, params);

  FootprintPolygon fp;
  fp.x = 18.0;
  fp.y = 0.0;

  SUBCASE("matches the exhaustive cell-set oracle") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> ux(10.0, 30.0);
    std::uniform_real_distribution<double> uy(-4.0, 4.0);
    std::uniform_real_distribution<double> uang(0.0, 2.0 * M_PI);
    for (int trial = 0; trial < 40; ++trial) {
      FootprintPolygon probe;
      probe.x = ux(rng);
      probe.y = uy(rng);
      probe.theta = uang(rng);
      const int h = trial % geom.num_horizons;
      const double got =
          QueryMaxOccupancy(grid, "vehicle.stationary", probe, h, 0.3);
      const auto cells = oracle::FootprintCellsExhaustive(probe, geom, 0.3);
      double expected = 0.0;
      const int stationary = static_cast<int>(VehicleSubclass::kStationary);
      for (const CellIndex& cell : cells) {
        expected = std::max(
            expected, grid.Prob(RootClass::kVehicle, h, cell.i, cell.j, stationary));
      }
      CHECK(got == expected);
    }
  }

  SUBCASE("non-decreasing in lambda") {
    for (double lambda = 0.0; lambda <= 2.0; lambda += 0.1) {
      const double a = QueryMaxOccupancy(grid, "vehicle.stationary", fp, 3, lambda);
      const double b =
          QueryMaxOccupancy(grid, "vehicle.stationary", fp, 3, lambda + 0.1);
      CHECK(b >= a);
    }
  }

  SUBCASE("outside the grid yields zero") {
    FootprintPolygon far;
    far.x = 500.0;
    CHECK(QueryMaxOccupancy(grid, "vehicle.stationary", far, 0, 0.0) == 0.0);
  }

  SUBCASE("unknown subclass is an error") {
    CHECK_THROWS_AS(QueryMaxOccupancy(grid, "vehicle.bogus", fp, 0, 0.0),
                    InvalidInputError);
  }
}

TEST_CASE("determinism: identical scenario gives bit-identical grids") {
  Scenario sc = BaseScenario();
  sc.actors.push_back(VehicleActor(1, {15.0, 1.0}, 0.2, 7.0));
  sc.actors.push_back(VehicleActor(2, {40.0, -2.0}, 0.0, 0.0));
  const GridGeometry geom = GeomFor(sc);
  const SemanticOccupancyGrid g1 = RasterizeScene(sc, 0.0, geom, ProducerParams{});
  const SemanticOccupancyGrid g2 = RasterizeScene(sc, 0.0, geom, ProducerParams{});
  CHECK(g1.Signature() == g2.Signature());
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<int> ui(0, geom.nx - 1);
  std::uniform_int_distribution<int> uj(0, geom.ny - 1);
  for (int trial = 0; trial < 2000; ++trial) {
    const int i = ui(rng), j = uj(rng), h = trial % geom.num_horizons;
    for (int k = 0; k < kVehicleSubclassCount; ++k) {
      CHECK(g1.Prob(RootClass::kVehicle, h, i, j, k) ==
            g2.Prob(RootClass::kVehicle, h, i, j, k));
    }
  }
}

}  // TEST_SUITE
