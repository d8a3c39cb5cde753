#include <cmath>
#include <random>

#include "doctest.h"
#include "ogp/sampler.hpp"
#include "oracles.hpp"

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

struct ThreeLaneWorld {
  LaneMap map;
  Route route;
  ThreeLaneWorld() {
    Lane l1 = StraightLane(1, {0.0, 0.0}, {400.0, 0.0});
    Lane l2 = StraightLane(2, {0.0, 3.7}, {400.0, 3.7});
    Lane l3 = StraightLane(3, {0.0, -3.7}, {400.0, -3.7});
    l1.left_neighbor = 2;
    l1.right_neighbor = 3;
    l1.left_crossable = true;
    l1.right_crossable = true;
    l2.right_neighbor = 1;
    l2.right_crossable = true;
    l3.left_neighbor = 1;
    l3.left_crossable = true;
    map.Add(l1);
    map.Add(l2);
    map.Add(l3);
    route.lane_ids = {1};
  }
};

}  // namespace

TEST_SUITE("sampler") {

TEST_CASE("constant-speed boundary problem reproduces s(t) = v t") {
  const auto profiles =
      SampleLongitudinal(0.0, 10.0, 0.0, {10.0}, {2.5}, {10.0}, 5.0);
  REQUIRE(profiles.size() == 1);
  const LongitudinalProfile& lon = profiles[0];
  for (double t = 0.0; t <= 5.0; t += 0.1) {
    CHECK(lon.S(t) == doctest::Approx(10.0 * t).epsilon(1e-9));
    CHECK(lon.V(t) == doctest::Approx(10.0).epsilon(1e-9));
    CHECK(std::abs(lon.A(t)) < 1e-9);
  }
}

TEST_CASE("stop profile meets end conditions exactly") {
  const auto profiles = SampleLongitudinal(0.0, 5.0, 0.0, {2.0}, {1.5}, {0.0}, 5.0);
  REQUIRE(!profiles.empty());
  const LongitudinalProfile& lon = profiles[0];
  CHECK(std::abs(lon.V(5.0)) < 1e-9);
  CHECK(std::abs(lon.A(5.0)) < 1e-9);
  CHECK(std::abs(lon.A(1.5)) < 1e-9);  // stitch acceleration pinned to 0
}

TEST_CASE("boundary residuals match the full Vandermonde solve") {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> uv(0.0, 15.0);
  std::uniform_real_distribution<double> ua(-2.0, 2.0);
  std::uniform_real_distribution<double> ut(1.0, 3.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double v0 = uv(rng), a0 = ua(rng), vm = uv(rng), ve = uv(rng);
    const double t1 = ut(rng);
    const auto profiles = SampleLongitudinal(3.0, v0, a0, {vm}, {t1}, {ve}, 5.0);
    if (profiles.empty()) continue;  // reverse-motion prune
    const LongitudinalProfile& lon = profiles[0];

    CHECK(std::abs(lon.S(0.0) - 3.0) < 1e-9);
    CHECK(std::abs(lon.V(0.0) - v0) < 1e-9);
    CHECK(std::abs(lon.A(0.0) - a0) < 1e-9);
    CHECK(std::abs(lon.V(t1) - vm) < 1e-9);
    CHECK(std::abs(lon.A(t1)) < 1e-9);
    CHECK(std::abs(lon.V(5.0) - ve) < 1e-9);
    CHECK(std::abs(lon.A(5.0)) < 1e-9);

    // First segment equals the independent 5x5 Vandermonde solution.
    const auto coeffs = oracle::QuarticByVandermonde(3.0, v0, a0, vm, 0.0, t1);
    for (double t = 0.0; t <= t1; t += 0.1 * t1) {
      double s_ref = 0.0;
      for (int k = 4; k >= 0; --k) s_ref = s_ref * t + coeffs[size_t(k)];
      CHECK(lon.S(t) == doctest::Approx(s_ref).epsilon(1e-9));
    }

    // C2 continuity at the stitch.
    const double eps = 1e-7;
    CHECK(std::abs(lon.V(t1 - eps) - lon.V(t1 + eps)) < 1e-5);
    CHECK(std::abs(lon.A(t1 - eps) - lon.A(t1 + eps)) < 1e-4);
  }
}

TEST_CASE("profiles with reverse motion are discarded") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> uv(0.0, 12.0);
  int emitted = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto profiles = SampleLongitudinal(0.0, uv(rng), 0.0, {0.0, uv(rng)},
                                             {1.5, 2.5}, {0.0, uv(rng)}, 5.0);
    for (const LongitudinalProfile& lon : profiles) {
      ++emitted;
      for (double t = 0.0; t <= 5.0; t += 0.01) {
        CHECK(lon.V(t) >= -1e-9);
      }
    }
  }
  CHECK(emitted > 0);
}

TEST_CASE("lateral profiles meet mid and end conditions exactly") {
  const auto lons = SampleLongitudinal(0.0, 8.0, 0.0, {8.0}, {2.5}, {8.0}, 5.0);
  REQUIRE(!lons.empty());
  const LongitudinalProfile& lon = lons[0];

  SUBCASE("zero initial offset and zero target is identically zero") {
    const auto lats = SampleLateral(lon, 0.0, 0.0, 0.0, {0.0}, {2.0});
    REQUIRE(lats.size() == 1);
    for (double s = lats[0].s_begin; s <= lats[0].s_end; s += 1.0) {
      CHECK(std::abs(lats[0].D(s)) < 1e-12);
    }
  }
  SUBCASE("offset start returns to the path") {
    const auto lats = SampleLateral(lon, 1.0, 0.0, 0.0, {0.0}, {2.0});
    REQUIRE(lats.size() == 1);
    const LateralProfile& lat = lats[0];
    CHECK(std::abs(lat.D(lat.s1)) < 1e-9);
    CHECK(std::abs(lat.Dp(lat.s1)) < 1e-9);
    CHECK(std::abs(lat.Dpp(lat.s1)) < 1e-9);
    CHECK(std::abs(lat.D(lat.s_end)) < 1e-9);
    CHECK(std::abs(lat.Dp(lat.s_end)) < 1e-9);
    CHECK(std::abs(lat.Dpp(lat.s_end)) < 1e-9);
  }
  SUBCASE("generic mid offset residuals below 1e-9") {
    const auto lats = SampleLateral(lon, 0.5, 0.1, 0.0, {1.5}, {2.5});
    REQUIRE(lats.size() == 1);
    const LateralProfile& lat = lats[0];
    CHECK(std::abs(lat.D(lat.s_begin) - 0.5) < 1e-9);
    CHECK(std::abs(lat.Dp(lat.s_begin) - 0.1) < 1e-9);
    CHECK(std::abs(lat.D(lat.s1) - 1.5) < 1e-9);
    CHECK(std::abs(lat.D(lat.s_end)) < 1e-9);
    const double eps = 1e-7;
    CHECK(std::abs(lat.D(lat.s1 - eps) - lat.D(lat.s1 + eps)) < 1e-6);
    CHECK(std::abs(lat.Dpp(lat.s1 - eps) - lat.Dpp(lat.s1 + eps)) < 1e-4);
  }
  SUBCASE("mid point beyond the profile is skipped") {
    const auto slow = SampleLongitudinal(0.0, 1.0, 0.0, {0.0}, {1.5}, {0.0}, 5.0);
    REQUIRE(!slow.empty());
    // s(T) is about 1 m; a 4.9 s mid time lands beyond the usable arc.
    const auto lats = SampleLateral(slow[0], 0.0, 0.0, 0.0, {1.0}, {4.9});
    CHECK(lats.empty());
  }
}

TEST_CASE("candidate generation on a three-lane road") {
  const ThreeLaneWorld world;
  BicycleState sdv{20.0, 0.0, 0.0, 10.0, 0.0, 0.0};
  SamplerConfig config;

  CandidateSet set = GenerateCandidates(sdv, world.map, world.route, config);
  REQUIRE(!set.trajectories.empty());

  SUBCASE("every candidate starts at the SDV state") {
    for (const Trajectory& traj : set.trajectories) {
      const BicycleState& b = traj.states.front();
      CHECK(std::abs(b.x - sdv.x) < 1e-6);
      CHECK(std::abs(b.y - sdv.y) < 1e-6);
      CHECK(std::abs(b.theta - sdv.theta) < 1e-6);
      CHECK(std::abs(b.v - sdv.v) < 1e-6);
      CHECK(std::abs(b.kappa - sdv.kappa) < 1e-6);
      CHECK(std::abs(b.a - sdv.a) < 1e-6);
    }
  }
  SUBCASE("no emitted candidate violates the pruning limits") {
    for (const Trajectory& traj : set.trajectories) {
      REQUIRE(traj.states.size() == 51);
      for (const BicycleState& b : traj.states) {
        CHECK(b.a <= config.a_max + 1e-9);
        CHECK(b.a >= config.a_min - 1e-9);
        CHECK(std::abs(b.kappa) <= config.kappa_max + 1e-9);
        CHECK(b.v >= -1e-9);
      }
    }
  }
  SUBCASE("emitted count matches the prune bookkeeping") {
    CHECK(static_cast<int>(set.trajectories.size()) ==
          set.stats.raw_combinations - set.stats.pruned_accel -
              set.stats.pruned_curvature - set.stats.pruned_singular);
  }
  SUBCASE("deterministic ordering across runs") {
    CandidateSet again = GenerateCandidates(sdv, world.map, world.route, config);
    REQUIRE(again.trajectories.size() == set.trajectories.size());
    for (size_t k = 0; k < set.trajectories.size(); ++k) {
      CHECK(again.trajectories[k].id == set.trajectories[k].id);
      CHECK(again.trajectories[k].provenance.lane_id ==
            set.trajectories[k].provenance.lane_id);
      CHECK(again.trajectories[k].states.back().x ==
            set.trajectories[k].states.back().x);
    }
  }
  SUBCASE("lane-change candidates exist for both neighbors") {
    bool left = false, right = false;
    for (const Trajectory& traj : set.trajectories) {
      left = left || traj.provenance.lane_slot == 1;
      right = right || traj.provenance.lane_slot == 2;
    }
    CHECK(left);
    CHECK(right);
  }
}

TEST_CASE("stationary SDV with stop targets stays at rest") {
  const ThreeLaneWorld world;
  BicycleState sdv{20.0, 0.0, 0.0, 0.0, 0.0, 0.0};
  SamplerConfig config;
  config.fixed_speed_targets = {0.0};
  config.include_neighbor_lanes = false;

  const CandidateSet set = GenerateCandidates(sdv, world.map, world.route, config);
  REQUIRE(!set.trajectories.empty());
  for (const Trajectory& traj : set.trajectories) {
    for (const BicycleState& b : traj.states) {
      CHECK(std::abs(b.x - 20.0) < 1e-9);
      CHECK(std::abs(b.y) < 1e-9);
      CHECK(b.v < 1e-9);
    }
  }
}

TEST_CASE("tight lateral demands at high speed are pruned by curvature") {
  const ThreeLaneWorld world;
  BicycleState sdv{20.0, 0.0, 0.0, 13.0, 0.0, 0.0};
  SamplerConfig config;
  config.kappa_max = 0.02;  // artificially tight
  config.lateral_offsets = {-1.5, 0.0, 1.5};
  const CandidateSet set = GenerateCandidates(sdv, world.map, world.route, config);
  CHECK(set.stats.pruned_curvature > 0);
  for (const Trajectory& traj : set.trajectories) {
    for (const BicycleState& b : traj.states) {
      CHECK(std::abs(b.kappa) <= config.kappa_max + 1e-9);
    }
  }
}

TEST_CASE("emergency stop profile brakes to rest on a straight line") {
  BicycleState sdv{5.0, 2.0, 0.3, 10.0, 0.05, 0.0};
  const Trajectory traj = EmergencyStopTrajectory(sdv, 6.0, 0.1, 5.0);
  REQUIRE(traj.states.size() == 51);
  CHECK(traj.states.front().v == doctest::Approx(10.0));
  CHECK(traj.states.back().v == 0.0);
  for (const BicycleState& b : traj.states) {
    CHECK(b.theta == doctest::Approx(0.3));  // heading held
    CHECK(b.kappa == 0.0);
  }
}

}  // TEST_SUITE
