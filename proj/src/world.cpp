#include "ogp/world.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

namespace ogp {

const char* ToString(RootClass c) {
  switch (c) {
    case RootClass::kVehicle: return "vehicle";
    case RootClass::kPedestrian: return "pedestrian";
    case RootClass::kBike: return "bike";
  }
  return "?";
}

const char* ToString(VehicleSubclass s) {
  switch (s) {
    case VehicleSubclass::kOncoming: return "oncoming";
    case VehicleSubclass::kConflicting: return "conflicting";
    case VehicleSubclass::kOnRoute: return "on_route";
    case VehicleSubclass::kStationary: return "stationary";
    case VehicleSubclass::kOthers: return "others";
  }
  return "?";
}

LightState TrafficControl::StateAt(double t) const {
  if (schedule.empty()) return LightState::kRed;
  LightState state = schedule.front().second;
  for (const auto& [start, s] : schedule) {
    if (start <= t) state = s;
  }
  return state;
}

void LaneMap::Add(Lane lane) {
  index_[lane.id] = lanes_.size();
  lanes_.push_back(std::move(lane));
}

const Lane* LaneMap::Find(int id) const {
  const auto it = index_.find(id);
  return it == index_.end() ? nullptr : &lanes_[it->second];
}

const Lane& LaneMap::At(int id) const {
  const Lane* lane = Find(id);
  if (lane == nullptr) throw InvalidInputError("unknown lane id " + std::to_string(id));
  return *lane;
}

void LaneMap::Validate() const {
  for (const Lane& lane : lanes_) {
    if (lane.width <= 0.0) {
      throw InvalidInputError("lane " + std::to_string(lane.id) + ": width must be positive");
    }
    if (lane.centerline.Empty()) {
      throw InvalidInputError("lane " + std::to_string(lane.id) + ": empty centerline");
    }
    if (lane.left_neighbor) {
      const Lane& other = At(*lane.left_neighbor);
      if (!other.right_neighbor || *other.right_neighbor != lane.id) {
        throw InvalidInputError("lane " + std::to_string(lane.id) + ": left neighbor not symmetric");
      }
    }
    if (lane.right_neighbor) {
      const Lane& other = At(*lane.right_neighbor);
      if (!other.left_neighbor || *other.left_neighbor != lane.id) {
        throw InvalidInputError("lane " + std::to_string(lane.id) + ": right neighbor not symmetric");
      }
    }
    for (int succ_id : lane.successors) {
      const Lane& succ = At(succ_id);
      const PathPoint end = lane.centerline.At(lane.centerline.Length());
      const PathPoint begin = succ.centerline.At(0.0);
      if ((end.position - begin.position).Norm() > 0.5) {
        throw InvalidInputError("lane " + std::to_string(lane.id) +
                                ": successor gap exceeds 0.5 m");
      }
      if (std::abs(WrapAngle(end.heading - begin.heading)) > 10.0 * M_PI / 180.0) {
        throw InvalidInputError("lane " + std::to_string(lane.id) +
                                ": successor heading jump exceeds 10 deg");
      }
    }
  }
}

std::optional<LaneProjection> LaneMap::LocatePoint(const Vec2& p,
                                                   double lateral_slack) const {
  std::optional<LaneProjection> best;
  for (const Lane& lane : lanes_) {
    double s = 0.0, d = 0.0;
    lane.centerline.Project(p, &s, &d);
    // Reject matches clamped to an endpoint that are actually ahead of
    // or behind the lane extent.
    const PathPoint q = lane.centerline.At(s);
    const double along = (p - q.position).Dot(Heading(q.heading));
    if (std::abs(along) > 0.5) continue;
    if (std::abs(d) > 0.5 * lane.width + lateral_slack) continue;
    if (!best || std::abs(d) < std::abs(best->d)) {
      best = LaneProjection{lane.id, s, d};
    }
  }
  return best;
}

namespace {

bool Related(const Lane& a, const Lane& b) {
  if (a.id == b.id) return true;
  if (a.left_neighbor == b.id || a.right_neighbor == b.id) return true;
  if (b.left_neighbor == a.id || b.right_neighbor == a.id) return true;
  const auto has = [](const std::vector<int>& v, int id) {
    return std::find(v.begin(), v.end(), id) != v.end();
  };
  return has(a.successors, b.id) || has(b.successors, a.id);
}

}  // namespace

bool LaneMap::LanesCross(int a_id, int b_id) const {
  const Lane& a = At(a_id);
  const Lane& b = At(b_id);
  if (Related(a, b)) return false;
  const auto& va = a.centerline.vertices();
  const auto& vb = b.centerline.vertices();
  for (size_t i = 0; i + 1 < va.size(); ++i) {
    for (size_t j = 0; j + 1 < vb.size(); ++j) {
      if (SegmentsIntersect(va[i], va[i + 1], vb[j], vb[j + 1])) return true;
    }
  }
  return false;
}

bool LaneMap::LanesOverlap(int a_id, int b_id, double tol) const {
  const Lane& a = At(a_id);
  const Lane& b = At(b_id);
  const double reach = 0.5 * (a.width + b.width) + tol;
  for (const Vec2& p : a.centerline.vertices()) {
    double s = 0.0, d = 0.0;
    b.centerline.Project(p, &s, &d);
    if (std::abs(d) <= reach) return true;
  }
  return false;
}

bool Route::Contains(int lane_id) const {
  return std::find(lane_ids.begin(), lane_ids.end(), lane_id) != lane_ids.end();
}

ActorPose Actor::PoseAt(double t) const {
  if (waypoints.empty()) throw InvalidInputError("actor has no waypoints");
  if (t <= waypoints.front().t) {
    const ActorWaypoint& w = waypoints.front();
    return {{w.x, w.y}, w.theta, t < w.t ? 0.0 : w.v};
  }
  if (t >= waypoints.back().t) {
    const ActorWaypoint& w = waypoints.back();
    return {{w.x, w.y}, w.theta, t > w.t ? 0.0 : w.v};
  }
  const auto it = std::upper_bound(
      waypoints.begin(), waypoints.end(), t,
      [](double value, const ActorWaypoint& w) { return value < w.t; });
  const ActorWaypoint& b = *it;
  const ActorWaypoint& a = *(it - 1);
  const double u = (t - a.t) / (b.t - a.t);
  ActorPose pose;
  pose.position = {a.x + u * (b.x - a.x), a.y + u * (b.y - a.y)};
  pose.theta = a.theta + u * WrapAngle(b.theta - a.theta);
  pose.v = a.v + u * (b.v - a.v);
  return pose;
}

double Actor::MaxSpeedIn(double t0, double t1) const {
  double vmax = 0.0;
  for (double t = t0; t <= t1 + 1e-9; t += 0.1) {
    vmax = std::max(vmax, PoseAt(t).v);
  }
  return vmax;
}

FootprintPolygon Actor::FootprintAt(double t) const {
  const ActorPose pose = PoseAt(t);
  FootprintPolygon fp;
  fp.length = length;
  fp.width = width;
  fp.rear_axle_offset = 0.0;  // scripted poses refer to the center
  fp.x = pose.position.x;
  fp.y = pose.position.y;
  fp.theta = pose.theta;
  return fp;
}

ConvexPolygon Actor::PolygonAt(double t) const {
  const auto corners = FootprintAt(t).Corners();
  return ConvexPolygon(corners.begin(), corners.end());
}

Vec2 Actor::VelocityAt(double t) const {
  const ActorPose pose = PoseAt(t);
  return pose.v * Heading(pose.theta);
}

void Scenario::Validate() const {
  map.Validate();
  if (route.lane_ids.empty()) throw InvalidInputError("route is empty");
  for (int id : route.lane_ids) map.At(id);
  for (size_t k = 0; k + 1 < route.lane_ids.size(); ++k) {
    const Lane& cur = map.At(route.lane_ids[k]);
    const int next = route.lane_ids[k + 1];
    const bool connected =
        std::find(cur.successors.begin(), cur.successors.end(), next) !=
            cur.successors.end() ||
        cur.left_neighbor == next || cur.right_neighbor == next;
    if (!connected) {
      throw InvalidInputError("route lanes " + std::to_string(cur.id) + " -> " +
                              std::to_string(next) + " are not connected");
    }
  }
  for (const TrafficControl& control : controls) {
    const Lane& lane = map.At(control.lane_id);
    if (control.s_stop < 0.0 || control.s_stop > lane.centerline.Length()) {
      throw InvalidInputError("control stop line outside lane extent");
    }
    for (size_t k = 0; k + 1 < control.schedule.size(); ++k) {
      if (control.schedule[k + 1].first <= control.schedule[k].first) {
        throw InvalidInputError("control schedule times must strictly increase");
      }
    }
  }
  for (const Actor& actor : actors) {
    if (actor.waypoints.empty()) {
      throw InvalidInputError("actor " + std::to_string(actor.id) + " has no waypoints");
    }
    for (size_t k = 0; k + 1 < actor.waypoints.size(); ++k) {
      const ActorWaypoint& a = actor.waypoints[k];
      const ActorWaypoint& b = actor.waypoints[k + 1];
      if (b.t <= a.t) {
        throw InvalidInputError("actor " + std::to_string(actor.id) +
                                ": waypoint times must strictly increase");
      }
      const double dist = std::hypot(b.x - a.x, b.y - a.y);
      if (dist / (b.t - a.t) > 30.0) {
        throw InvalidInputError("actor " + std::to_string(actor.id) +
                                ": pose jump implies speed above 30 m/s");
      }
    }
  }
  // The SDV must start on (or laterally near) a route lane.
  bool on_route = false;
  for (int id : route.lane_ids) {
    double s = 0.0, d = 0.0;
    map.At(id).centerline.Project(sdv.Position(), &s, &d);
    if (std::abs(d) <= 0.5 * map.At(id).width + 1.0) on_route = true;
  }
  if (!on_route) throw InvalidInputError("SDV initial state is not on a route lane");
  if (!expert.empty() && expert.size() < 51) {
    throw InvalidInputError("expert trajectory does not cover the 5 s horizon");
  }
}

VehicleSubclass ClassifyVehicle(const Actor& actor, double t,
                                const LaneMap& map, const Route& route) {
  if (actor.root != RootClass::kVehicle) {
    throw InvalidInputError("ClassifyVehicle expects a vehicle actor");
  }
  if (actor.MaxSpeedIn(t - 1.0, t + 1.0) < 0.5) {
    return VehicleSubclass::kStationary;
  }
  const ActorPose pose = actor.PoseAt(t);
  const auto located = map.LocatePoint(pose.position);
  if (!located) return VehicleSubclass::kOthers;
  const Lane& own = map.At(located->lane_id);
  const double own_heading = own.centerline.At(located->s).heading;

  // Oncoming: the actor's lane runs against a route lane it overlaps.
  for (int rid : route.lane_ids) {
    if (rid == own.id) continue;
    const Lane& rl = map.At(rid);
    if (!map.LanesOverlap(own.id, rid)) continue;
    double s = 0.0, d = 0.0;
    rl.centerline.Project(pose.position, &s, &d);
    const double route_heading = rl.centerline.At(s).heading;
    if (std::abs(WrapAngle(own_heading - route_heading)) > 0.75 * M_PI) {
      return VehicleSubclass::kOncoming;
    }
  }
  for (int rid : route.lane_ids) {
    if (map.LanesCross(own.id, rid)) return VehicleSubclass::kConflicting;
  }
  if (route.Contains(own.id)) return VehicleSubclass::kOnRoute;
  return VehicleSubclass::kOthers;
}

const LaneChainSpan& LaneChain::SpanAt(double s) const {
  for (const LaneChainSpan& span : spans) {
    if (s <= span.s_end) return span;
  }
  return spans.back();
}

std::optional<double> LaneChain::ChainS(int lane_id, double lane_s) const {
  for (const LaneChainSpan& span : spans) {
    if (span.lane_id == lane_id) {
      return span.s_begin + lane_s;
    }
  }
  return std::nullopt;
}

LaneChain BuildChain(const LaneMap& map, const Route& route, int start_lane_id,
                     double min_length) {
  LaneChain chain;
  std::vector<Vec2> points;
  std::set<int> visited;
  int current = start_lane_id;
  double covered = 0.0;
  std::vector<std::pair<int, double>> lane_lengths;

  while (visited.insert(current).second) {
    const Lane& lane = map.At(current);
    for (const Vec2& p : lane.raw_centerline.empty()
                             ? lane.centerline.vertices()
                             : lane.raw_centerline) {
      if (points.empty() || (p - points.back()).Norm() > 0.25) {
        points.push_back(p);
      }
    }
    double len = lane.centerline.Length();
    lane_lengths.emplace_back(current, len);
    covered += len;
    if (covered >= min_length || lane.successors.empty()) break;
    // Prefer the successor that continues the route.
    int next = lane.successors.front();
    for (int succ : lane.successors) {
      if (route.Contains(succ)) {
        next = succ;
        break;
      }
    }
    current = next;
  }

  chain.path = DrivingPath::FromPolyline(points, 0.5);
  // Map lane extents onto the resampled chain proportionally.
  const double total_raw =
      std::accumulate(lane_lengths.begin(), lane_lengths.end(), 0.0,
                      [](double acc, const auto& p) { return acc + p.second; });
  const double scale = total_raw > 0.0 ? chain.path.Length() / total_raw : 1.0;
  double cursor = 0.0;
  for (const auto& [lane_id, len] : lane_lengths) {
    LaneChainSpan span;
    span.lane_id = lane_id;
    span.s_begin = cursor;
    cursor += len * scale;
    span.s_end = cursor;
    chain.spans.push_back(span);
  }
  chain.spans.back().s_end = chain.path.Length();
  return chain;
}

std::optional<LeadInfo> FindLead(const LaneChain& chain, const LaneMap& map,
                                 double sdv_chain_s, double sdv_half_length,
                                 const std::vector<Actor>& actors, double t,
                                 double max_range) {
  std::optional<LeadInfo> best;
  double best_s = std::numeric_limits<double>::infinity();
  for (const Actor& actor : actors) {
    if (actor.root != RootClass::kVehicle) continue;
    const ActorPose pose = actor.PoseAt(t);
    double s = 0.0, d = 0.0;
    chain.path.Project(pose.position, &s, &d,
                       std::min(sdv_chain_s + 0.5 * max_range, chain.path.Length()),
                       0.75 * max_range + 40.0);
    const Lane& lane_here = map.At(chain.SpanAt(s).lane_id);
    if (std::abs(d) > 0.5 * lane_here.width) continue;
    if (s <= sdv_chain_s || s - sdv_chain_s > max_range) continue;
    if (s < best_s) {
      best_s = s;
      best = LeadInfo{actor.id, (s - sdv_chain_s) - sdv_half_length - 0.5 * actor.length,
                      pose.v};
    }
  }
  return best;
}

std::optional<LeadInfo> FindLeadForState(const LaneMap& map, const Route& route,
                                         const BicycleState& sdv,
                                         double sdv_length,
                                         double rear_axle_offset,
                                         const std::vector<Actor>& actors,
                                         double t) {
  const Vec2 center = sdv.Position() + rear_axle_offset * Heading(sdv.theta);
  const auto located = map.LocatePoint(center, 1.0);
  if (!located) return std::nullopt;
  const LaneChain chain = BuildChain(map, route, located->lane_id, 1e9);
  double s = 0.0, d = 0.0;
  chain.path.Project(center, &s, &d);
  return FindLead(chain, map, s, 0.5 * sdv_length, actors, t);
}

}  // namespace ogp
