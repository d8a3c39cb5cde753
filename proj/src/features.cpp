#include "ogp/features.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ogp {

const std::array<SubclassRef, kNumOccupancySubclasses>& OccupancySubclasses() {
  static const std::array<SubclassRef, kNumOccupancySubclasses> kRefs = {{
      {RootClass::kVehicle, 0},
      {RootClass::kVehicle, 1},
      {RootClass::kVehicle, 2},
      {RootClass::kVehicle, 3},
      {RootClass::kVehicle, 4},
      {RootClass::kVehicle, kVehicleOccludedIndex},
      {RootClass::kPedestrian, kSmallOccupiedIndex},
      {RootClass::kPedestrian, kSmallOccludedIndex},
      {RootClass::kBike, kSmallOccupiedIndex},
      {RootClass::kBike, kSmallOccludedIndex},
  }};
  return kRefs;
}

const std::vector<std::string>& FeatureNames() {
  static const std::vector<std::string> kNames = [] {
    std::vector<std::string> names;
    for (const SubclassRef& ref : OccupancySubclasses()) {
      const std::string base = std::string("occ_") + ToString(ref.root) + "_" +
                               SubclassNames(ref.root)[static_cast<size_t>(ref.index)];
      names.push_back(base);
      names.push_back(base + "_v");
    }
    const char* rest[] = {"headway",        "driving_path",
                          "lane_boundary",  "road_boundary",
                          "speed_limit",    "stop_line",
                          "route_lane_change", "dead_end",
                          "progress",       "cost_to_go",
                          "jerk",           "jerk_violation",
                          "accel",          "accel_violation",
                          "lat_acc",        "lat_acc_violation",
                          "curvature",      "curvature_rate",
                          "curvature_accel"};
    for (const char* name : rest) names.emplace_back(name);
    return names;
  }();
  return kNames;
}

int FeatureIndex(const std::string& name) {
  const auto& names = FeatureNames();
  const auto it = std::find(names.begin(), names.end(), name);
  return it == names.end() ? -1 : static_cast<int>(it - names.begin());
}

double FeatureSign(int idx) { return idx == kProgress ? -1.0 : 1.0; }
int ProgressFeatureIndex() { return kProgress; }

CostWeights CostWeights::Uniform(double value) {
  CostWeights w;
  w.w.fill(value);
  return w;
}

CostWeights CostWeights::FromMap(const std::map<std::string, double>& named) {
  const auto& names = FeatureNames();
  if (named.size() != names.size()) {
    throw ConfigurationError("weight map has " + std::to_string(named.size()) +
                             " entries, expected " + std::to_string(names.size()));
  }
  CostWeights w;
  for (const auto& [name, value] : named) {
    const int idx = FeatureIndex(name);
    if (idx < 0) throw ConfigurationError("unknown weight name '" + name + "'");
    w.w[static_cast<size_t>(idx)] = value;
  }
  return w;
}

std::map<std::string, double> CostWeights::ToMap() const {
  std::map<std::string, double> out;
  const auto& names = FeatureNames();
  for (size_t i = 0; i < names.size(); ++i) out[names[i]] = w[i];
  return out;
}

void CostWeights::ValidatePositive() const {
  for (size_t i = 0; i < w.size(); ++i) {
    if (!(w[i] > 0.0)) {
      throw ConfigurationError("weight '" + FeatureNames()[i] +
                               "' must be strictly positive");
    }
  }
}

bool CostWeights::AllOccupancyZero() const {
  for (int i = 0; i < kNumOccupancyFeatures; ++i) {
    if (w[static_cast<size_t>(i)] != 0.0) return false;
  }
  return true;
}

CostWeights CostWeights::WithOccupancyZeroed() const {
  CostWeights out = *this;
  for (int i = 0; i < kNumOccupancyFeatures; ++i) out.w[static_cast<size_t>(i)] = 0.0;
  return out;
}

double TotalCost(const FeatureVector& f, const CostWeights& w) {
  double cost = 0.0;
  for (int i = 0; i < kNumFeatures; ++i) {
    cost += FeatureSign(i) * w.w[static_cast<size_t>(i)] * f.values[static_cast<size_t>(i)];
  }
  return cost;
}

double RuleCost(const FeatureVector& f, const CostWeights& w) {
  double cost = 0.0;
  for (int i = kNumOccupancyFeatures; i < kNumFeatures; ++i) {
    cost += FeatureSign(i) * w.w[static_cast<size_t>(i)] * f.values[static_cast<size_t>(i)];
  }
  return cost;
}

double OccupancyCostAtHorizon(const FeatureVector& f, const CostWeights& w,
                              int horizon) {
  double cost = 0.0;
  const auto& slice = f.occ_slices[static_cast<size_t>(horizon)];
  for (int i = 0; i < kNumOccupancyFeatures; ++i) {
    cost += w.w[static_cast<size_t>(i)] * slice[static_cast<size_t>(i)];
  }
  return cost;
}

double SafeHeadwayDistance(double v_sdv, double v_lead, const CostConfig& cfg) {
  return cfg.headway_reaction_time * v_sdv +
         v_sdv * v_sdv / (2.0 * cfg.sdv_brake_decel) -
         v_lead * v_lead / (2.0 * cfg.lead_brake_decel);
}

ChainActorCache ChainActorCache::Build(const LaneChain& chain, const LaneMap& map,
                                       const std::vector<Actor>& actors,
                                       double plan_time, int num_horizons,
                                       double horizon_step) {
  ChainActorCache cache;
  cache.num_horizons = num_horizons;
  cache.num_actors = actors.size();
  cache.entries.resize(static_cast<size_t>(num_horizons) * actors.size());
  for (int h = 0; h < num_horizons; ++h) {
    const double t = plan_time + horizon_step * h;
    for (size_t a = 0; a < actors.size(); ++a) {
      Entry& e = cache.entries[static_cast<size_t>(h) * actors.size() + a];
      if (actors[a].root != RootClass::kVehicle) continue;
      const ActorPose pose = actors[a].PoseAt(t);
      double s = 0.0, d = 0.0;
      chain.path.Project(pose.position, &s, &d);
      const Lane& lane = map.At(chain.SpanAt(s).lane_id);
      e.s = s;
      e.v = pose.v;
      e.half_length = 0.5 * actors[a].length;
      e.in_lane = std::abs(d) <= 0.5 * lane.width;
      // Projections clamped to the chain ends are not real leads.
      if (s <= 1e-9 || s >= chain.path.Length() - 1e-9) e.in_lane = false;
    }
  }
  return cache;
}

namespace {

int HorizonStride(const FeatureContext& ctx, const Trajectory& traj) {
  const int n = static_cast<int>(traj.states.size());
  if (n < 2) return 1;
  const double dt = 5.0 / (n - 1);  // trajectories always span the horizon
  return std::max(1, static_cast<int>(std::lround(ctx.grid != nullptr
                                                      ? ctx.grid->geometry().horizon_step / dt
                                                      : 0.5 / dt)));
}

struct LaneLocal {
  const Lane* lane = nullptr;
  double d = 0.0;
};

LaneLocal Localize(const LaneMap& map, const Lane* base, double d) {
  LaneLocal out{base, d};
  for (int guard = 0; guard < 4; ++guard) {
    if (out.d > 0.5 * out.lane->width && out.lane->left_neighbor) {
      const Lane& left = map.At(*out.lane->left_neighbor);
      out.d -= 0.5 * (out.lane->width + left.width);
      out.lane = &left;
    } else if (out.d < -0.5 * out.lane->width && out.lane->right_neighbor) {
      const Lane& right = map.At(*out.lane->right_neighbor);
      out.d += 0.5 * (out.lane->width + right.width);
      out.lane = &right;
    } else {
      break;
    }
  }
  return out;
}

int LaneChangesToRoute(const LaneMap& map, const Route& route, int lane_id) {
  if (route.Contains(lane_id)) return 0;
  // Breadth-first over neighbor links.
  std::vector<int> layer{lane_id};
  std::vector<int> visited{lane_id};
  for (int depth = 1; depth <= 4; ++depth) {
    std::vector<int> next;
    for (int id : layer) {
      const Lane& l = map.At(id);
      for (const auto& n : {l.left_neighbor, l.right_neighbor}) {
        if (!n) continue;
        if (std::find(visited.begin(), visited.end(), *n) != visited.end()) continue;
        if (route.Contains(*n)) return depth;
        visited.push_back(*n);
        next.push_back(*n);
      }
    }
    if (next.empty()) break;
    layer = std::move(next);
  }
  return 5;  // no route lane reachable by lane changes
}

// Arc position of a stop line on this chain, when the control's lane
// (or one of its immediate neighbors, stop lines span the road) is
// part of the chain.
std::optional<double> ControlChainS(const LaneChain& chain, const LaneMap& map,
                                    const TrafficControl& control) {
  for (const LaneChainSpan& span : chain.spans) {
    if (span.lane_id == control.lane_id) {
      return span.s_begin + control.s_stop;
    }
    const Lane& lane = map.At(span.lane_id);
    if ((lane.left_neighbor && *lane.left_neighbor == control.lane_id) ||
        (lane.right_neighbor && *lane.right_neighbor == control.lane_id)) {
      return span.s_begin + control.s_stop;
    }
  }
  return std::nullopt;
}

}  // namespace

void AddOccupancyFeatures(const Trajectory& traj, const FeatureContext& ctx,
                          FeatureVector* out) {
  if (ctx.grid == nullptr || ctx.skip_occupancy) return;
  const GridGeometry& geom = ctx.grid->geometry();
  const CostConfig& cfg = *ctx.config;
  const int stride = HorizonStride(ctx, traj);
  const auto& refs = OccupancySubclasses();

  double max0[3][kVehicleSubclassCount];
  double maxl[3][kVehicleSubclassCount];

  for (int h = 0; h < geom.num_horizons; ++h) {
    const size_t k = static_cast<size_t>(h * stride);
    if (k >= traj.states.size()) break;
    const BicycleState& state = traj.states[k];
    FootprintPolygon fp;
    fp.length = cfg.vehicle.length;
    fp.width = cfg.vehicle.width;
    fp.rear_axle_offset = cfg.vehicle.rear_axle_offset;
    fp.x = state.x;
    fp.y = state.y;
    fp.theta = state.theta;

    const std::vector<CellIndex> cells0 = FootprintCells(fp, geom, 0.0);
    const std::vector<CellIndex> cells_l =
        cfg.lambda > 0.0 ? FootprintCells(fp, geom, cfg.lambda) : cells0;
    for (RootClass c : {RootClass::kVehicle, RootClass::kPedestrian, RootClass::kBike}) {
      ctx.grid->MaxOverCells(c, h, cells0, max0[static_cast<int>(c)]);
      ctx.grid->MaxOverCells(c, h, cells_l, maxl[static_cast<int>(c)]);
    }

    auto& slice = out->occ_slices[static_cast<size_t>(h)];
    for (int q = 0; q < kNumOccupancySubclasses; ++q) {
      const SubclassRef& ref = refs[static_cast<size_t>(q)];
      const double base = max0[static_cast<int>(ref.root)][ref.index];
      const double margin = maxl[static_cast<int>(ref.root)][ref.index] * state.v;
      slice[static_cast<size_t>(2 * q)] = base;
      slice[static_cast<size_t>(2 * q + 1)] = margin;
      out->values[static_cast<size_t>(2 * q)] += base;
      out->values[static_cast<size_t>(2 * q + 1)] += margin;
    }
  }
}

void AddRuleFeatures(const Trajectory& traj, const FeatureContext& ctx,
                     FeatureVector* out) {
  const Scenario& sc = *ctx.scenario;
  const CostConfig& cfg = *ctx.config;
  const LaneChain& chain = *ctx.chain;
  const size_t n = traj.states.size();
  if (n < 2) return;
  const double dt = 5.0 / static_cast<double>(n - 1);

  double driving_path = 0.0, lane_boundary = 0.0, road_boundary = 0.0;
  double speed_limit = 0.0;

  for (size_t k = 0; k < n; ++k) {
    // Trapezoid weights: state-sampled integrands.
    const double w = (k == 0 || k + 1 == n) ? 0.5 * dt : dt;
    const FrenetState& f = traj.frenet[k];
    const BicycleState& b = traj.states[k];
    driving_path += std::abs(f.d) * w;

    const PathPoint ref = chain.path.At(f.s);
    const double dtheta = WrapAngle(b.theta - ref.heading);
    const double sin_dt = std::sin(dtheta);
    const double half_lat = 0.5 * cfg.vehicle.length * std::abs(sin_dt) +
                            0.5 * cfg.vehicle.width * std::abs(std::cos(dtheta));
    const double d_center = f.d + cfg.vehicle.rear_axle_offset * sin_dt;

    const Lane* base = &sc.map.At(chain.SpanAt(f.s).lane_id);
    const LaneLocal local = Localize(sc.map, base, d_center);
    const double half_w = 0.5 * local.lane->width;
    const double left_exc = std::max(0.0, local.d + half_lat - half_w);
    const double right_exc = std::max(0.0, -local.d + half_lat - half_w);
    (local.lane->left_crossable ? lane_boundary : road_boundary) += left_exc * w;
    (local.lane->right_crossable ? lane_boundary : road_boundary) += right_exc * w;

    speed_limit += std::max(0.0, b.v - local.lane->speed_limit) * w;
  }
  out->values[kDrivingPath] += driving_path;
  out->values[kLaneBoundary] += lane_boundary;
  out->values[kRoadBoundary] += road_boundary;
  out->values[kSpeedLimit] += speed_limit;

  // Stop lines: worst overshoot while the control is active.
  const double s_start = traj.frenet.front().s;
  const double s_end = traj.frenet.back().s;
  double stop_line = 0.0;
  for (size_t ci = 0; ci < sc.controls.size(); ++ci) {
    const TrafficControl& control = sc.controls[ci];
    if (control.kind == ControlKind::kSpeedLimitChange) continue;
    if (ctx.cleared_stop_signs != nullptr &&
        control.kind == ControlKind::kStopSign &&
        (*ctx.cleared_stop_signs)[ci]) {
      continue;
    }
    const auto stop_s = ControlChainS(chain, sc.map, control);
    if (!stop_s || *stop_s < s_start - 2.0) continue;
    double worst = 0.0;
    for (size_t k = 0; k < n; ++k) {
      const double over = traj.frenet[k].s - *stop_s;
      if (over <= worst) continue;
      const bool active =
          control.kind == ControlKind::kStopSign ||
          control.StateAt(ctx.plan_time + dt * static_cast<double>(k)) == LightState::kRed;
      if (active) worst = over;
    }
    stop_line += worst;
  }
  out->values[kStopLine] += stop_line;

  // Route / dead-end / progress / cost-to-go at the end state.
  const Lane* end_base = &sc.map.At(chain.SpanAt(s_end).lane_id);
  const LaneLocal end_local = Localize(sc.map, end_base, traj.frenet.back().d);
  out->values[kRouteLaneChange] +=
      LaneChangesToRoute(sc.map, sc.route, end_local.lane->id);

  if (!sc.route.Contains(end_local.lane->id)) {
    double remaining = 0.0;
    const Lane* lane = end_local.lane;
    double lane_s = s_end - chain.SpanAt(s_end).s_begin;
    bool reaches_route = false;
    for (int guard = 0; guard < 8 && remaining < cfg.dead_end_threshold; ++guard) {
      remaining += std::max(0.0, lane->centerline.Length() - lane_s);
      lane_s = 0.0;
      if (lane->successors.empty()) break;
      lane = &sc.map.At(lane->successors.front());
      if (sc.route.Contains(lane->id)) {
        reaches_route = true;
        break;
      }
    }
    if (!reaches_route) {
      out->values[kDeadEnd] += std::max(0.0, cfg.dead_end_threshold - remaining);
    }
  }

  out->values[kProgress] += s_end - s_start;

  const double v_end = traj.states.back().v;
  double cost_to_go = 0.0;
  auto consider = [&](double v_allowed, double distance) {
    if (v_end <= v_allowed || distance > cfg.cost_to_go_lookahead) return;
    const double d_avail = std::max(distance, 1.0);
    cost_to_go = std::max(
        cost_to_go, (v_end * v_end - v_allowed * v_allowed) / (2.0 * d_avail));
  };
  for (size_t ci = 0; ci < sc.controls.size(); ++ci) {
    const TrafficControl& control = sc.controls[ci];
    const auto stop_s = ControlChainS(chain, sc.map, control);
    if (!stop_s || *stop_s <= s_end) continue;
    if (control.kind == ControlKind::kSpeedLimitChange) {
      consider(control.limit, *stop_s - s_end);
    } else {
      const bool active =
          control.kind == ControlKind::kStopSign
              ? !(ctx.cleared_stop_signs != nullptr && (*ctx.cleared_stop_signs)[ci])
              : control.StateAt(ctx.plan_time + 5.0) == LightState::kRed;
      if (active) consider(0.0, *stop_s - s_end);
    }
  }
  for (const LaneChainSpan& span : chain.spans) {
    if (span.s_begin <= s_end) continue;
    consider(sc.map.At(span.lane_id).speed_limit, span.s_begin - s_end);
  }
  out->values[kCostToGo] += cost_to_go;
}

void AddComfortFeatures(const Trajectory& traj, const FeatureContext& ctx,
                        FeatureVector* out) {
  (void)ctx;
  const size_t n = traj.states.size();
  if (n < 3) return;
  const double dt = 5.0 / static_cast<double>(n - 1);
  const CostConfig& cfg = *ctx.config;

  double jerk = 0.0, jerk_violation = 0.0;
  double accel = 0.0, accel_violation = 0.0;
  double lat = 0.0, lat_violation = 0.0;
  double curvature = 0.0, curvature_rate = 0.0, curvature_accel = 0.0;

  for (size_t k = 0; k < n; ++k) {
    // State-sampled quantities integrate with trapezoid weights;
    // interval-sampled finite differences (jerk, curvature rates) use
    // plain interval sums.
    const double w = (k == 0 || k + 1 == n) ? 0.5 * dt : dt;
    const double a = traj.states[k].a;
    accel += std::abs(a) * w;
    accel_violation += (std::max(0.0, a - cfg.accel_threshold) +
                        std::max(0.0, -a - cfg.decel_threshold)) * w;

    const double la = traj.states[k].v * traj.states[k].v * traj.states[k].kappa;
    lat += std::abs(la) * w;
    lat_violation += std::max(0.0, std::abs(la) - cfg.lat_acc_threshold) * w;

    curvature += std::abs(traj.states[k].kappa) * w;

    if (k + 1 < n) {
      const double j = (traj.states[k + 1].a - traj.states[k].a) / dt;
      jerk += std::abs(j) * dt;
      jerk_violation += std::max(0.0, std::abs(j) - cfg.jerk_threshold) * dt;
      const double kr = (traj.states[k + 1].kappa - traj.states[k].kappa) / dt;
      curvature_rate += std::abs(kr) * dt;
    }
    if (k + 2 < n) {
      const double kr2 = (traj.states[k + 2].kappa - 2.0 * traj.states[k + 1].kappa +
                          traj.states[k].kappa) / (dt * dt);
      curvature_accel += std::abs(kr2) * dt;
    }
  }
  out->values[kJerk] += jerk;
  out->values[kJerkViolation] += jerk_violation;
  out->values[kAccel] += accel;
  out->values[kAccelViolation] += accel_violation;
  out->values[kLatAcc] += lat;
  out->values[kLatAccViolation] += lat_violation;
  out->values[kCurvature] += curvature;
  out->values[kCurvatureRate] += curvature_rate;
  out->values[kCurvatureAccel] += curvature_accel;
}

void AddHeadwayFeature(const Trajectory& traj, const FeatureContext& ctx,
                       FeatureVector* out) {
  const Scenario& sc = *ctx.scenario;
  const CostConfig& cfg = *ctx.config;
  const LaneChain& chain = *ctx.chain;
  if (sc.actors.empty()) return;
  const int stride = HorizonStride(ctx, traj);
  const int num_horizons = ctx.grid != nullptr ? ctx.grid->geometry().num_horizons
                                               : kNumHorizons;
  const double step = ctx.grid != nullptr ? ctx.grid->geometry().horizon_step : 0.5;

  double headway = 0.0;
  for (int h = 0; h < num_horizons; ++h) {
    const size_t k = static_cast<size_t>(h * stride);
    if (k >= traj.states.size()) break;
    const double s_center = traj.frenet[k].s + cfg.vehicle.rear_axle_offset;
    const double v_sdv = traj.states[k].v;

    double best_s = std::numeric_limits<double>::infinity();
    double gap = 0.0, v_lead = 0.0;
    if (ctx.actor_cache != nullptr) {
      for (size_t a = 0; a < ctx.actor_cache->num_actors; ++a) {
        const ChainActorCache::Entry& e = ctx.actor_cache->At(h, a);
        if (!e.in_lane || e.s <= s_center || e.s - s_center > 60.0) continue;
        if (e.s < best_s) {
          best_s = e.s;
          gap = (e.s - s_center) - 0.5 * cfg.vehicle.length - e.half_length;
          v_lead = e.v;
        }
      }
    } else {
      const auto lead = FindLead(chain, sc.map, s_center, 0.5 * cfg.vehicle.length,
                                 sc.actors, ctx.plan_time + step * h);
      if (lead) {
        best_s = 0.0;
        gap = lead->gap;
        v_lead = lead->lead_speed;
      }
    }
    if (!std::isinf(best_s)) {
      headway += std::max(0.0, SafeHeadwayDistance(v_sdv, v_lead, cfg) - gap) * step;
    }
  }
  out->values[kHeadway] += headway;
}

FeatureVector ExtractFeatures(const Trajectory& traj, const FeatureContext& ctx) {
  if (ctx.scenario == nullptr || ctx.config == nullptr || ctx.chain == nullptr) {
    throw ConfigurationError("feature context is incomplete");
  }
  FeatureVector out;
  AddOccupancyFeatures(traj, ctx, &out);
  AddHeadwayFeature(traj, ctx, &out);
  AddRuleFeatures(traj, ctx, &out);
  AddComfortFeatures(traj, ctx, &out);
  return out;
}

}  // namespace ogp
