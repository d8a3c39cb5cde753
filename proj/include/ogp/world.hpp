#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ogp/driving_path.hpp"
#include "ogp/frenet.hpp"
#include "ogp/geometry.hpp"

namespace ogp {

enum class RootClass { kVehicle, kPedestrian, kBike };
enum class LightState { kGreen, kYellow, kRed };
enum class ControlKind { kStopSign, kTrafficLight, kSpeedLimitChange };

enum class VehicleSubclass {
  kOncoming = 0,
  kConflicting,
  kOnRoute,
  kStationary,
  kOthers
};

const char* ToString(RootClass c);
const char* ToString(VehicleSubclass s);

struct TrafficControl {
  ControlKind kind = ControlKind::kStopSign;
  int lane_id = 0;
  double s_stop = 0.0;
  double limit = 0.0;  // target speed for kSpeedLimitChange
  std::vector<std::pair<double, LightState>> schedule;  // for lights

  // Piecewise-constant schedule lookup; the last state persists.
  LightState StateAt(double t) const;
};

struct Lane {
  int id = 0;
  std::vector<Vec2> raw_centerline;  // as loaded, preserved for round-trip
  DrivingPath centerline;
  double width = 3.7;
  double speed_limit = 13.9;
  std::optional<int> left_neighbor;
  std::optional<int> right_neighbor;
  std::vector<int> successors;
  bool left_crossable = false;   // lane boundary (true) vs road edge (false)
  bool right_crossable = false;
};

struct LaneProjection {
  int lane_id = 0;
  double s = 0.0;
  double d = 0.0;
};

class LaneMap {
 public:
  void Add(Lane lane);
  const Lane* Find(int id) const;
  const Lane& At(int id) const;
  const std::vector<Lane>& lanes() const { return lanes_; }

  // Structural checks; throws InvalidInputError on violation.
  void Validate() const;

  // Lane containing (or nearest to) the point within lateral slack;
  // ties broken by smaller |d|.
  std::optional<LaneProjection> LocatePoint(const Vec2& p,
                                            double lateral_slack = 0.3) const;

  // True when the centerlines of the two lanes properly cross and the
  // lanes are not related through neighbor/successor links.
  bool LanesCross(int a, int b) const;

  // True when the two lane strips overlap or touch within tol.
  bool LanesOverlap(int a, int b, double tol = 0.25) const;

 private:
  std::vector<Lane> lanes_;
  std::map<int, size_t> index_;
};

struct Route {
  std::vector<int> lane_ids;
  bool Contains(int lane_id) const;
};

struct ActorWaypoint {
  double t = 0.0;
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;
  double v = 0.0;
};

struct ActorPose {
  Vec2 position;
  double theta = 0.0;
  double v = 0.0;
};

struct Actor {
  int id = 0;
  RootClass root = RootClass::kVehicle;
  double length = 4.7;
  double width = 2.0;
  bool compliant = true;
  std::vector<ActorWaypoint> waypoints;

  // Interpolated pose (clamped to the scripted time range, v -> 0 when
  // held beyond the script).
  ActorPose PoseAt(double t) const;
  double MaxSpeedIn(double t0, double t1) const;
  FootprintPolygon FootprintAt(double t) const;  // pose at geometric center
  ConvexPolygon PolygonAt(double t) const;
  Vec2 VelocityAt(double t) const;
};

struct Scenario {
  LaneMap map;
  Route route;
  std::vector<TrafficControl> controls;
  std::vector<Actor> actors;
  BicycleState sdv;
  std::vector<BicycleState> expert;  // empty when absent; 0.1 s spacing
  double duration = 15.0;
  uint64_t seed = 0;
  std::string name;

  void Validate() const;
};

// Mutually exclusive vehicle subclass at a horizon. Precedence:
// stationary > oncoming > conflicting > on_route > others; actors off
// the mapped lanes fall into others.
VehicleSubclass ClassifyVehicle(const Actor& actor, double t,
                                const LaneMap& map, const Route& route);

// A lane concatenated with its successors into one driving path.
struct LaneChainSpan {
  double s_begin = 0.0;
  double s_end = 0.0;
  int lane_id = 0;
};

struct LaneChain {
  DrivingPath path;
  std::vector<LaneChainSpan> spans;

  const LaneChainSpan& SpanAt(double s) const;
  // Chain arc length of a position s along the given lane, if the lane
  // is part of the chain.
  std::optional<double> ChainS(int lane_id, double lane_s) const;
};

// Follows successors (preferring route lanes) until min_length is
// covered or the graph ends.
LaneChain BuildChain(const LaneMap& map, const Route& route,
                     int start_lane_id, double min_length);

struct LeadInfo {
  int actor_id = 0;
  double gap = 0.0;         // bumper-to-bumper, m
  double lead_speed = 0.0;  // m/s
};

// Nearest vehicle ahead along the chain within max_range, with
// bumper-to-bumper gap. sdv_chain_s refers to the SDV center.
std::optional<LeadInfo> FindLead(const LaneChain& chain, const LaneMap& map,
                                 double sdv_chain_s, double sdv_half_length,
                                 const std::vector<Actor>& actors, double t,
                                 double max_range = 60.0);

// Convenience wrapper: lead vehicle relative to the SDV's current lane.
std::optional<LeadInfo> FindLeadForState(const LaneMap& map, const Route& route,
                                         const BicycleState& sdv,
                                         double sdv_length,
                                         double rear_axle_offset,
                                         const std::vector<Actor>& actors,
                                         double t);

}  // namespace ogp
