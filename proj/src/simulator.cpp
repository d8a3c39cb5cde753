#include "ogp/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <random>
#include <sstream>

#include "ogp/occupancy.hpp"

namespace ogp {

namespace {

uint64_t FnvMix(uint64_t h, uint64_t v) {
  h ^= v;
  return h * 1099511628211ULL;
}

uint64_t FnvDouble(uint64_t h, double d) {
  uint64_t bits = 0;
  std::memcpy(&bits, &d, sizeof(bits));
  return FnvMix(h, bits);
}

constexpr uint64_t kFnvOffset = 1469598103934665603ULL;

FootprintPolygon SdvFootprint(const BicycleState& b, const VehicleParams& vp) {
  FootprintPolygon fp;
  fp.length = vp.length;
  fp.width = vp.width;
  fp.rear_axle_offset = vp.rear_axle_offset;
  fp.x = b.x;
  fp.y = b.y;
  fp.theta = b.theta;
  return fp;
}

bool CollidesWithAnyActor(const BicycleState& sdv, const VehicleParams& vp,
                          const std::vector<Actor>& actors, double t) {
  const auto sdv_corners = SdvFootprint(sdv, vp).Corners();
  for (const Actor& actor : actors) {
    if (ConvexOverlap(sdv_corners, actor.FootprintAt(t).Corners())) return true;
  }
  return false;
}

}  // namespace

uint64_t SimulationRun::Hash() const {
  uint64_t h = kFnvOffset;
  for (const StepRecord& r : steps) {
    h = FnvDouble(h, r.t);
    h = FnvDouble(h, r.sdv.x);
    h = FnvDouble(h, r.sdv.y);
    h = FnvDouble(h, r.sdv.theta);
    h = FnvDouble(h, r.sdv.v);
    h = FnvDouble(h, r.sdv.kappa);
    h = FnvDouble(h, r.sdv.a);
    h = FnvMix(h, static_cast<uint64_t>(static_cast<int64_t>(r.plan_id)));
    h = FnvMix(h, r.grid_signature);
    h = FnvMix(h, (r.fallback ? 2ULL : 0ULL) | (r.collision ? 1ULL : 0ULL));
  }
  return h;
}

SimulationRun RunClosedLoop(const Scenario& scenario, const CostWeights& weights,
                            const SimConfig& sim, const SamplerConfig& sampler,
                            const CostConfig& costs, const ProducerParams& producer) {
  SimulationRun run;
  run.scenario_name = scenario.name;
  run.seed = scenario.seed;

  BicycleState sdv = scenario.sdv;
  std::vector<uint8_t> cleared(scenario.controls.size(), 0);
  SemanticOccupancyGrid grid;
  const bool occupancy_unused = weights.AllOccupancyZero();
  const int num_steps = static_cast<int>(std::lround(sim.duration / sim.step));
  run.steps.reserve(static_cast<size_t>(num_steps));

  for (int k = 0; k < num_steps; ++k) {
    const double t = sim.step * k;

    // Stop signs count as satisfied once the SDV has stopped at the line.
    for (size_t ci = 0; ci < scenario.controls.size(); ++ci) {
      const TrafficControl& control = scenario.controls[ci];
      if (control.kind != ControlKind::kStopSign || cleared[ci]) continue;
      if (sdv.v >= 0.3) continue;
      double s = 0.0, d = 0.0;
      scenario.map.At(control.lane_id).centerline.Project(sdv.Position(), &s, &d);
      if (std::abs(s - control.s_stop) < 3.0 && std::abs(d) < 3.0) cleared[ci] = 1;
    }

    GridGeometry geom;
    geom.center = sdv.Position();
    geom.heading = sdv.theta;
    if (occupancy_unused) {
      grid.Reset(geom);
    } else {
      RasterizeSceneInto(scenario, t, geom, producer, grid);
    }

    PlanInput input;
    input.scenario = &scenario;
    input.plan_time = t;
    input.grid = &grid;
    input.weights = weights;
    input.sampler = sampler;
    input.costs = costs;
    input.cleared_stop_signs = &cleared;
    input.allow_occupancy_skip = true;

    StepRecord record;
    record.t = t;
    record.sdv = sdv;
    record.grid_signature = grid.Signature();

    Trajectory executed;
    try {
      PlanResult result = Plan(sdv, input);
      record.plan_id = result.chosen.id;
      executed = std::move(result.chosen);
    } catch (const PlanningFailure&) {
      executed = EmergencyStopTrajectory(sdv, sim.emergency_decel, sampler.dt,
                                         sampler.horizon);
      record.plan_id = -1;
      record.fallback = true;
      ++run.fallback_count;
    }

    record.collision = CollidesWithAnyActor(sdv, costs.vehicle, scenario.actors, t);
    if (record.collision && !run.had_collision) {
      run.had_collision = true;
      run.first_collision_step = k;
    }
    run.steps.push_back(record);

    sdv = executed.states.size() > 1 ? executed.states[1] : executed.states.front();
  }
  return run;
}

ClosedLoopReport SummarizeRuns(const std::vector<SimulationRun>& runs) {
  ClosedLoopReport report;
  report.num_runs = static_cast<int>(runs.size());
  if (runs.empty()) return report;

  int collided = 0;
  double jerk_sum = 0.0, lat_sum = 0.0, speed_sum = 0.0;
  double accel_sum = 0.0, decel_sum = 0.0;
  size_t jerk_n = 0, step_n = 0, accel_n = 0, decel_n = 0;

  for (const SimulationRun& run : runs) {
    collided += run.had_collision ? 1 : 0;
    for (size_t k = 0; k < run.steps.size(); ++k) {
      const BicycleState& b = run.steps[k].sdv;
      speed_sum += b.v;
      lat_sum += std::abs(b.v * b.v * b.kappa);
      ++step_n;
      if (b.a > 0.0) {
        accel_sum += b.a;
        ++accel_n;
      } else if (b.a < 0.0) {
        decel_sum += b.a;
        ++decel_n;
      }
      if (k > 0) {
        const double dt = run.steps[k].t - run.steps[k - 1].t;
        jerk_sum += std::abs((b.a - run.steps[k - 1].sdv.a) / dt);
        ++jerk_n;
      }
    }
  }
  report.collision_rate_percent = 100.0 * collided / static_cast<double>(runs.size());
  report.mean_abs_jerk = jerk_n > 0 ? jerk_sum / static_cast<double>(jerk_n) : 0.0;
  report.mean_abs_lat_acc = step_n > 0 ? lat_sum / static_cast<double>(step_n) : 0.0;
  report.mean_accel = accel_n > 0 ? accel_sum / static_cast<double>(accel_n) : 0.0;
  report.mean_decel = decel_n > 0 ? decel_sum / static_cast<double>(decel_n) : 0.0;
  report.mean_speed = step_n > 0 ? speed_sum / static_cast<double>(step_n) : 0.0;
  return report;
}

std::string ClosedLoopReport::ToCsv() const {
  std::ostringstream out;
  out.precision(17);
  out << "num_runs,collision_rate_percent,mean_abs_jerk,mean_abs_lat_acc,"
         "mean_accel,mean_decel,mean_speed\n";
  out << num_runs << "," << collision_rate_percent << "," << mean_abs_jerk << ","
      << mean_abs_lat_acc << "," << mean_accel << "," << mean_decel << ","
      << mean_speed << "\n";
  return out.str();
}

std::string ClosedLoopReport::ToText() const {
  std::ostringstream out;
  out.precision(6);
  out << "closed-loop report over " << num_runs << " runs\n"
      << "  collision rate: " << collision_rate_percent << " %\n"
      << "  mean |jerk|:    " << mean_abs_jerk << " m/s^3\n"
      << "  mean |lat acc|: " << mean_abs_lat_acc << " m/s^2\n"
      << "  mean accel:     " << mean_accel << " m/s^2\n"
      << "  mean decel:     " << mean_decel << " m/s^2\n"
      << "  mean speed:     " << mean_speed << " m/s\n";
  return out.str();
}

uint64_t ClosedLoopReport::Hash() const {
  uint64_t h = kFnvOffset;
  h = FnvMix(h, static_cast<uint64_t>(num_runs));
  for (double v : {collision_rate_percent, mean_abs_jerk, mean_abs_lat_acc,
                   mean_accel, mean_decel, mean_speed}) {
    h = FnvDouble(h, v);
  }
  return h;
}

OpenLoopReport OpenLoopEval(const std::vector<Scenario>& dataset,
                            const CostWeights& weights,
                            const SamplerConfig& sampler, const CostConfig& costs,
                            const ProducerParams& producer) {
  OpenLoopReport report;
  report.num_examples = static_cast<int>(dataset.size());
  if (dataset.empty()) return report;

  int coll_1 = 0, coll_3 = 0, coll_5 = 0;
  double l2_1 = 0.0, l2_3 = 0.0, l2_5 = 0.0;
  double jerk_sum = 0.0, lat_sum = 0.0, progress_sum = 0.0;
  size_t jerk_n = 0, lat_n = 0;

  for (const Scenario& scenario : dataset) {
    if (scenario.expert.empty()) {
      throw InvalidInputError("open-loop dataset scenario lacks an expert");
    }
    GridGeometry geom;
    geom.center = scenario.sdv.Position();
    geom.heading = scenario.sdv.theta;
    const SemanticOccupancyGrid grid = RasterizeScene(scenario, 0.0, geom, producer);

    PlanInput input;
    input.scenario = &scenario;
    input.plan_time = 0.0;
    input.grid = &grid;
    input.weights = weights;
    input.sampler = sampler;
    input.costs = costs;
    const PlanResult result = Plan(scenario.sdv, input);
    const std::vector<BicycleState>& states = result.chosen.states;

    int first_collision = -1;
    for (size_t k = 0; k < states.size(); ++k) {
      if (CollidesWithAnyActor(states[k], costs.vehicle, scenario.actors,
                               sampler.dt * static_cast<double>(k))) {
        first_collision = static_cast<int>(k);
        break;
      }
    }
    if (first_collision >= 0) {
      if (first_collision <= 10) ++coll_1;
      if (first_collision <= 30) ++coll_3;
      if (first_collision <= 50) ++coll_5;
    }

    auto l2_at = [&](size_t k) {
      const double dx = states[k].x - scenario.expert[k].x;
      const double dy = states[k].y - scenario.expert[k].y;
      return std::hypot(dx, dy);
    };
    l2_1 += l2_at(10);
    l2_3 += l2_at(30);
    l2_5 += l2_at(50);

    for (size_t k = 0; k + 1 < states.size(); ++k) {
      jerk_sum += std::abs((states[k + 1].a - states[k].a) / sampler.dt);
      ++jerk_n;
      lat_sum += std::abs(states[k].v * states[k].v * states[k].kappa);
      ++lat_n;
    }
    progress_sum += result.chosen.frenet.back().s - result.chosen.frenet.front().s;
  }

  const double n = static_cast<double>(dataset.size());
  report.collision_rate_1s = 100.0 * coll_1 / n;
  report.collision_rate_3s = 100.0 * coll_3 / n;
  report.collision_rate_5s = 100.0 * coll_5 / n;
  report.l2_human_1s = l2_1 / n;
  report.l2_human_3s = l2_3 / n;
  report.l2_human_5s = l2_5 / n;
  report.mean_abs_jerk = jerk_n > 0 ? jerk_sum / static_cast<double>(jerk_n) : 0.0;
  report.mean_abs_lat_acc = lat_n > 0 ? lat_sum / static_cast<double>(lat_n) : 0.0;
  report.mean_progress = progress_sum / n;
  return report;
}

std::string OpenLoopReport::ToCsv() const {
  std::ostringstream out;
  out.precision(17);
  out << "num_examples,collision_rate_1s,collision_rate_3s,collision_rate_5s,"
         "l2_human_1s,l2_human_3s,l2_human_5s,mean_abs_jerk,mean_abs_lat_acc,"
         "mean_progress\n";
  out << num_examples << "," << collision_rate_1s << "," << collision_rate_3s
      << "," << collision_rate_5s << "," << l2_human_1s << "," << l2_human_3s
      << "," << l2_human_5s << "," << mean_abs_jerk << "," << mean_abs_lat_acc
      << "," << mean_progress << "\n";
  return out.str();
}

std::string OpenLoopReport::ToText() const {
  std::ostringstream out;
  out.precision(6);
  out << "open-loop report over " << num_examples << " examples\n"
      << "  cumulative collision rate @1/3/5 s: " << collision_rate_1s << " / "
      << collision_rate_3s << " / " << collision_rate_5s << " %\n"
      << "  L2 to expert @1/3/5 s: " << l2_human_1s << " / " << l2_human_3s
      << " / " << l2_human_5s << " m\n"
      << "  mean |jerk|: " << mean_abs_jerk << " m/s^3\n"
      << "  mean |lat acc|: " << mean_abs_lat_acc << " m/s^2\n"
      << "  mean progress: " << mean_progress << " m\n";
  return out.str();
}

uint64_t OpenLoopReport::Hash() const {
  uint64_t h = kFnvOffset;
  h = FnvMix(h, static_cast<uint64_t>(num_examples));
  for (double v : {collision_rate_1s, collision_rate_3s, collision_rate_5s,
                   l2_human_1s, l2_human_3s, l2_human_5s, mean_abs_jerk,
                   mean_abs_lat_acc, mean_progress}) {
    h = FnvDouble(h, v);
  }
  return h;
}

namespace {

Lane MakeStraightLane(int id, Vec2 from, Vec2 to, double width, double limit) {
  Lane lane;
  lane.id = id;
  lane.raw_centerline = {from, to};
  lane.centerline = DrivingPath::FromPolyline(lane.raw_centerline);
  lane.width = width;
  lane.speed_limit = limit;
  return lane;
}

Actor MakeParkedTruck(int id, Vec2 pos, double heading, double length,
                      double duration) {
  Actor truck;
  truck.id = id;
  truck.root = RootClass::kVehicle;
  truck.length = length;
  truck.width = 2.5;
  truck.compliant = true;
  truck.waypoints.push_back({0.0, pos.x, pos.y, heading, 0.0});
  truck.waypoints.push_back({duration, pos.x, pos.y, heading, 0.0});
  return truck;
}

// Scripted waypoints for the side-road actor. Straight approach along
// +y; optionally a right turn onto the main road through a circular
// arc, then a slow lead along the main lane.
Actor MakeConflictActor(int id, double offset, double speed, bool turns,
                        double duration) {
  Actor actor;
  actor.id = id;
  actor.root = RootClass::kVehicle;
  actor.length = 4.7;
  actor.width = 2.0;
  actor.compliant = false;

  const double junction_x = 110.0;
  const double turn_start_y = -10.0;
  const double turn_radius = 10.0;
  const double turn_speed = std::min(speed, 5.0);

  double t = 0.0;
  double y = -offset + turn_start_y;  // start 'offset' metres before the turn-in
  const double dt = 0.2;
  enum Phase { kApproach, kTurn, kLead } phase = kApproach;
  double arc = 0.0;
  Vec2 pos{junction_x, y};
  double heading = 0.5 * M_PI;
  double v = speed;

  while (t <= duration + 1e-9) {
    actor.waypoints.push_back({t, pos.x, pos.y, heading, v});
    t += dt;
    switch (phase) {
      case kApproach: {
        pos.y += v * dt;
        if (pos.y >= turn_start_y) {
          if (turns) {
            phase = kTurn;
            v = turn_speed;
          } else if (pos.y > 60.0) {
            v = 0.0;  // ran off the mapped area; hold
          }
        }
        break;
      }
      case kTurn: {
        arc += v * dt;
        const double span = 0.5 * M_PI * turn_radius;
        const double u = std::min(1.0, arc / span);
        const double psi = M_PI - u * 0.5 * M_PI;
        pos = Vec2{junction_x + turn_radius, turn_start_y} +
              turn_radius * Vec2{std::cos(psi), std::sin(psi)};
        heading = psi - 0.5 * M_PI;
        if (u >= 1.0) {
          phase = kLead;
          heading = 0.0;
          pos.y = 0.0;
        }
        break;
      }
      case kLead: {
        pos.x += v * dt;
        break;
      }
    }
    if (!turns && pos.y > 80.0) pos.y = 80.0;
  }
  return actor;
}

}  // namespace

SuiteVariations DefaultConflictVariations() {
  SuiteVariations v;
  v.speeds = {4.0, 6.0, 8.0, 10.0};
  v.offsets = {15.0, 20.0, 25.0, 30.0, 35.0, 40.0, 45.0, 50.0, 55.0, 60.0};
  v.counts = {1, 2};
  return v;
}

std::vector<Scenario> MakeOccludedConflictSuite(const SuiteVariations& variations,
                                                uint64_t seed) {
  std::vector<Scenario> suite;
  std::vector<std::tuple<double, double, int>> combos;
  for (int count : variations.counts) {
    for (double speed : variations.speeds) {
      for (double offset : variations.offsets) {
        const auto combo = std::make_tuple(speed, offset, count);
        if (std::find(combos.begin(), combos.end(), combo) == combos.end()) {
          combos.push_back(combo);
        }
      }
    }
  }

  int index = 0;
  for (const auto& [speed, offset, count] : combos) {
    Scenario sc;
    const double duration = 26.0;
    Lane lane1 = MakeStraightLane(1, {0.0, 0.0}, {260.0, 0.0}, 3.7, 13.0);
    Lane lane2 = MakeStraightLane(2, {0.0, 3.7}, {260.0, 3.7}, 3.7, 13.0);
    lane1.left_neighbor = 2;
    lane1.left_crossable = true;
    lane2.right_neighbor = 1;
    lane2.right_crossable = true;
    Lane lane3 = MakeStraightLane(3, {110.0, -60.0}, {110.0, 60.0}, 3.7, 10.0);
    sc.map.Add(lane1);
    sc.map.Add(lane2);
    sc.map.Add(lane3);
    sc.route.lane_ids = {1};
    sc.sdv = BicycleState{10.0, 0.0, 0.0, 12.0, 0.0, 0.0};
    sc.duration = duration;
    sc.seed = seed + static_cast<uint64_t>(index);
    sc.name = "occluded_conflict_" + std::to_string(index);

    // Parked trucks fencing off the view into the lower side road.
    int next_id = 100;
    for (double cx : {48.0, 62.0, 76.0, 90.0, 101.5}) {
      sc.actors.push_back(
          MakeParkedTruck(next_id++, {cx, -6.8}, 0.0, cx > 95.0 ? 9.0 : 12.0, duration));
    }
    sc.actors.push_back(MakeConflictActor(1, offset, speed, /*turns=*/true, duration));
    if (count >= 2) {
      sc.actors.push_back(
          MakeConflictActor(2, offset + 18.0, speed, /*turns=*/false, duration));
    }
    sc.Validate();
    suite.push_back(std::move(sc));
    ++index;
  }
  return suite;
}

std::vector<Scenario> MakeLaneDrivingSuite(int count, uint64_t seed) {
  std::vector<Scenario> suite;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);

  for (int i = 0; i < count; ++i) {
    Scenario sc;
    const double duration = 26.0;
    const double limit = 10.0 + 4.0 * uni(rng);
    Lane lane1 = MakeStraightLane(1, {0.0, 0.0}, {400.0, 0.0}, 3.7, limit);
    Lane lane2 = MakeStraightLane(2, {0.0, 3.7}, {400.0, 3.7}, 3.7, limit);
    Lane lane3 = MakeStraightLane(3, {0.0, -3.7}, {400.0, -3.7}, 3.7, limit);
    lane1.left_neighbor = 2;
    lane1.right_neighbor = 3;
    lane1.left_crossable = true;
    lane1.right_crossable = true;
    lane2.right_neighbor = 1;
    lane2.right_crossable = true;
    lane3.left_neighbor = 1;
    lane3.left_crossable = true;
    sc.map.Add(lane1);
    sc.map.Add(lane2);
    sc.map.Add(lane3);
    sc.route.lane_ids = {1};
    sc.duration = duration;
    sc.seed = seed + static_cast<uint64_t>(i) + 1;
    sc.name = "lane_driving_" + std::to_string(i);
    sc.sdv = BicycleState{8.0, 0.0, 0.0, 6.0 + 7.0 * uni(rng), 0.0, 0.0};

    int next_id = 1;
    if (uni(rng) < 0.8) {  // lead vehicle
      const double gap = 18.0 + 37.0 * uni(rng);
      const double v_lead = 2.0 + 9.0 * uni(rng);
      Actor lead;
      lead.id = next_id++;
      lead.root = RootClass::kVehicle;
      lead.length = 4.7;
      lead.width = 2.0;
      for (double t = 0.0; t <= duration + 1e-9; t += 0.5) {
        lead.waypoints.push_back({t, sc.sdv.x + gap + v_lead * t, 0.0, 0.0, v_lead});
      }
      sc.actors.push_back(std::move(lead));
    }
    if (uni(rng) < 0.5) {  // blocker parked in the route lane
      const double ahead = 30.0 + 45.0 * uni(rng);
      sc.actors.push_back(
          MakeParkedTruck(next_id++, {sc.sdv.x + ahead, 0.35}, 0.0, 6.0, duration));
    }
    if (uni(rng) < 0.4) {  // adjacent-lane traffic
      const double along = -5.0 + 30.0 * uni(rng);
      const double v_adj = 4.0 + 8.0 * uni(rng);
      Actor adj;
      adj.id = next_id++;
      adj.root = RootClass::kVehicle;
      adj.length = 4.7;
      adj.width = 2.0;
      for (double t = 0.0; t <= duration + 1e-9; t += 0.5) {
        adj.waypoints.push_back({t, sc.sdv.x + along + v_adj * t, 3.7, 0.0, v_adj});
      }
      sc.actors.push_back(std::move(adj));
    }
    sc.Validate();
    suite.push_back(std::move(sc));
  }
  return suite;
}

void AttachExpert(Scenario* scenario, const CostWeights& weights,
                  const SamplerConfig& sampler, const CostConfig& costs,
                  const ProducerParams& producer) {
  GridGeometry geom;
  geom.center = scenario->sdv.Position();
  geom.heading = scenario->sdv.theta;
  const SemanticOccupancyGrid grid = RasterizeScene(*scenario, 0.0, geom, producer);
  PlanInput input;
  input.scenario = scenario;
  input.plan_time = 0.0;
  input.grid = &grid;
  input.weights = weights;
  input.sampler = sampler;
  input.costs = costs;
  const PlanResult result = Plan(scenario->sdv, input);
  scenario->expert = result.chosen.states;
}

ClosedLoopReport RunSuite(const std::vector<Scenario>& suite,
                          const CostWeights& weights, const SimConfig& sim,
                          const SamplerConfig& sampler, const CostConfig& costs,
                          const ProducerParams& producer,
                          std::vector<SimulationRun>* runs_out) {
  std::vector<SimulationRun> runs;
  runs.reserve(suite.size());
  for (const Scenario& scenario : suite) {
    runs.push_back(RunClosedLoop(scenario, weights, sim, sampler, costs, producer));
  }
  const ClosedLoopReport report = SummarizeRuns(runs);
  if (runs_out != nullptr) *runs_out = std::move(runs);
  return report;
}

}  // namespace ogp
