#include <cmath>

#include "doctest.h"
#include "ogp/scenario_io.hpp"
#include "ogp/world.hpp"

using namespace ogp;

namespace {

Lane StraightLane(int id, Vec2 from, Vec2 to, double width = 3.7,
                  double limit = 13.0) {
  Lane lane;
  lane.id = id;
  lane.raw_centerline = {from, to};
  lane.centerline = DrivingPath::FromPolyline(lane.raw_centerline);
  lane.width = width;
  lane.speed_limit = limit;
  return lane;
}

Actor ConstantSpeedActor(int id, Vec2 start, double heading, double v,
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

// A two-way road (route lane 1 eastbound, lane 2 the adjacent opposing
// lane, lane 3 a far opposing lane), a same-direction right neighbor
// (lane 5), and one crossing lane (lane 4). Route on lane 1. Opposing
// adjacency is geometric only; lanes 1 and 2 are not linked as
// neighbors (no lane changes into oncoming traffic).
struct TestWorld {
  LaneMap map;
  Route route;

  TestWorld() {
    Lane l1 = StraightLane(1, {0.0, 0.0}, {200.0, 0.0});
    Lane l2 = StraightLane(2, {200.0, 3.7}, {0.0, 3.7});
    Lane l3 = StraightLane(3, {200.0, 7.4}, {0.0, 7.4});
    Lane l4 = StraightLane(4, {100.0, -50.0}, {100.0, 50.0});
    Lane l5 = StraightLane(5, {0.0, -3.7}, {200.0, -3.7});
    l1.right_neighbor = 5;
    l1.right_crossable = true;
    l5.left_neighbor = 1;
    l5.left_crossable = true;
    map.Add(l1);
    map.Add(l2);
    map.Add(l3);
    map.Add(l4);
    map.Add(l5);
    route.lane_ids = {1};
  }
};

}  // namespace

TEST_SUITE("world") {

TEST_CASE("light schedule lookup") {
  TrafficControl light;
  light.kind = ControlKind::kTrafficLight;
  light.schedule = {{0.0, LightState::kRed},
                    {5.0, LightState::kGreen},
                    {20.0, LightState::kYellow}};
  CHECK(light.StateAt(0.0) == LightState::kRed);
  CHECK(light.StateAt(4.9) == LightState::kRed);
  CHECK(light.StateAt(5.0) == LightState::kGreen);
  CHECK(light.StateAt(100.0) == LightState::kYellow);
}

TEST_CASE("actor interpolation stays within waypoint hulls") {
  Actor actor = ConstantSpeedActor(1, {0.0, 0.0}, 0.0, 10.0);
  const ActorPose pose = actor.PoseAt(1.23);
  CHECK(pose.position.x == doctest::Approx(12.3));
  CHECK(pose.position.y == doctest::Approx(0.0));
  CHECK(pose.v == doctest::Approx(10.0));
  // Clamped beyond the script, speed zeroed.
  CHECK(actor.PoseAt(1000.0).v == 0.0);
}

TEST_CASE("vehicle subclass classification") {
  const TestWorld world;

  SUBCASE("parked car is stationary") {
    Actor parked = ConstantSpeedActor(1, {50.0, 0.0}, 0.0, 0.0);
    CHECK(ClassifyVehicle(parked, 5.0, world.map, world.route) ==
          VehicleSubclass::kStationary);
  }
  SUBCASE("car on the route lane is on_route") {
    Actor car = ConstantSpeedActor(1, {30.0, 0.2}, 0.0, 8.0);
    CHECK(ClassifyVehicle(car, 2.0, world.map, world.route) ==
          VehicleSubclass::kOnRoute);
  }
  SUBCASE("car in the adjacent same-direction lane is others") {
    Actor car = ConstantSpeedActor(1, {30.0, -3.7}, 0.0, 8.0);
    CHECK(ClassifyVehicle(car, 2.0, world.map, world.route) ==
          VehicleSubclass::kOthers);
  }
  SUBCASE("car in the touching opposite-direction lane is oncoming") {
    Actor car = ConstantSpeedActor(1, {120.0, 3.7}, M_PI, 8.0);
    CHECK(ClassifyVehicle(car, 2.0, world.map, world.route) ==
          VehicleSubclass::kOncoming);
  }
  SUBCASE("far opposite lane does not overlap the route: others") {
    Actor car = ConstantSpeedActor(1, {120.0, 7.4}, M_PI, 8.0);
    CHECK(ClassifyVehicle(car, 2.0, world.map, world.route) ==
          VehicleSubclass::kOthers);
  }
  SUBCASE("car on the crossing lane is conflicting") {
    Actor car = ConstantSpeedActor(1, {100.0, -20.0}, 0.5 * M_PI, 6.0);
    CHECK(ClassifyVehicle(car, 2.0, world.map, world.route) ==
          VehicleSubclass::kConflicting);

    // Oracle: brute-force segment crossing between the involved lanes.
    const auto& a = world.map.At(4).centerline.vertices();
    const auto& b = world.map.At(1).centerline.vertices();
    bool crosses = false;
    for (size_t i = 0; i + 1 < a.size(); ++i) {
      for (size_t j = 0; j + 1 < b.size(); ++j) {
        crosses = crosses || SegmentsIntersect(a[i], a[i + 1], b[j], b[j + 1]);
      }
    }
    CHECK(crosses);
  }
  SUBCASE("off-map actor is others") {
    Actor car = ConstantSpeedActor(1, {50.0, -30.0}, 0.0, 8.0);
    CHECK(ClassifyVehicle(car, 2.0, world.map, world.route) ==
          VehicleSubclass::kOthers);
  }
  SUBCASE("classification is total and deterministic over time") {
    Actor car = ConstantSpeedActor(1, {100.0, -20.0}, 0.5 * M_PI, 6.0);
    for (double t = 0.0; t <= 10.0; t += 0.5) {
      const VehicleSubclass sub = ClassifyVehicle(car, t, world.map, world.route);
      CHECK(static_cast<int>(sub) >= 0);
      CHECK(static_cast<int>(sub) <= 4);
      CHECK(ClassifyVehicle(car, t, world.map, world.route) == sub);
    }
  }
}

TEST_CASE("lead vehicle selection") {
  const TestWorld world;
  BicycleState sdv;
  sdv.x = 10.0;
  sdv.y = 0.0;
  sdv.v = 10.0;

  SUBCASE("single lead ahead with bumper gap") {
    std::vector<Actor> actors = {ConstantSpeedActor(1, {31.4, 0.0}, 0.0, 5.0)};
    const auto lead = FindLeadForState(world.map, world.route, sdv, 4.7, 1.4,
                                       actors, 0.0);
    REQUIRE(lead.has_value());
    CHECK(lead->actor_id == 1);
    // Centers 20 m apart (SDV center at x=11.4) minus the half lengths.
    CHECK(lead->gap == doctest::Approx(20.0 - 4.7).epsilon(1e-6));
    CHECK(lead->lead_speed == doctest::Approx(5.0));
  }
  SUBCASE("adjacent lane actor is not a lead") {
    std::vector<Actor> actors = {ConstantSpeedActor(1, {40.0, -3.7}, 0.0, 5.0)};
    CHECK(!FindLeadForState(world.map, world.route, sdv, 4.7, 1.4, actors, 0.0)
               .has_value());
  }
  SUBCASE("nearer of two leads wins") {
    std::vector<Actor> actors = {ConstantSpeedActor(1, {60.0, 0.0}, 0.0, 5.0),
                                 ConstantSpeedActor(2, {35.0, 0.0}, 0.0, 7.0)};
    const auto lead = FindLeadForState(world.map, world.route, sdv, 4.7, 1.4,
                                       actors, 0.0);
    REQUIRE(lead.has_value());
    CHECK(lead->actor_id == 2);
  }
}

TEST_CASE("lane chains follow successors") {
  LaneMap map;
  Lane l1 = StraightLane(1, {0.0, 0.0}, {100.0, 0.0});
  Lane l2 = StraightLane(2, {100.0, 0.0}, {250.0, 0.0});
  l1.successors = {2};
  map.Add(l1);
  map.Add(l2);
  Route route;
  route.lane_ids = {1, 2};

  const LaneChain chain = BuildChain(map, route, 1, 200.0);
  CHECK(chain.path.Length() == doctest::Approx(250.0).epsilon(1e-3));
  REQUIRE(chain.spans.size() == 2);
  CHECK(chain.SpanAt(50.0).lane_id == 1);
  CHECK(chain.SpanAt(150.0).lane_id == 2);
  const auto s2 = chain.ChainS(2, 10.0);
  REQUIRE(s2.has_value());
  CHECK(*s2 == doctest::Approx(110.0).epsilon(1e-2));
}

TEST_CASE("map validation rejects broken structures") {
  SUBCASE("asymmetric neighbors") {
    LaneMap map;
    Lane l1 = StraightLane(1, {0.0, 0.0}, {100.0, 0.0});
    Lane l2 = StraightLane(2, {0.0, 3.7}, {100.0, 3.7});
    l1.left_neighbor = 2;  // missing the reciprocal link
    map.Add(l1);
    map.Add(l2);
    CHECK_THROWS_AS(map.Validate(), InvalidInputError);
  }
  SUBCASE("successor gap") {
    LaneMap map;
    Lane l1 = StraightLane(1, {0.0, 0.0}, {100.0, 0.0});
    Lane l2 = StraightLane(2, {103.0, 0.0}, {200.0, 0.0});
    l1.successors = {2};
    map.Add(l1);
    map.Add(l2);
    CHECK_THROWS_AS(map.Validate(), InvalidInputError);
  }
  SUBCASE("disconnected route is rejected, not patched") {
    Scenario sc;
    sc.map.Add(StraightLane(1, {0.0, 0.0}, {100.0, 0.0}));
    sc.map.Add(StraightLane(2, {0.0, 30.0}, {100.0, 30.0}));
    sc.route.lane_ids = {1, 2};
    sc.sdv = BicycleState{5.0, 0.0, 0.0, 5.0, 0.0, 0.0};
    CHECK_THROWS_AS(sc.Validate(), InvalidInputError);
  }
}

}  // TEST_SUITE
