#pragma once

#include <array>
#include <memory>
#include <vector>

#include "ogp/frenet.hpp"
#include "ogp/world.hpp"

namespace ogp {

// Polynomial over [u0, u1] stored against the normalized variable
// xi = (u - u0)/(u1 - u0); keeps the boundary solves well conditioned
// for long arc-length domains.
struct PolynomialSegment {
  double u0 = 0.0;
  double u1 = 1.0;
  std::array<double, 6> coeffs{};  // c0..c5 in xi

  double Value(double u) const;
  double Deriv1(double u) const;
  double Deriv2(double u) const;
};

// Two quartics in t stitched at t1 with s_ddot(t1) = s_ddot(T) = 0.
struct LongitudinalProfile {
  PolynomialSegment first;   // [0, t1]
  PolynomialSegment second;  // [t1, T]
  double t1 = 0.0;
  double horizon = 5.0;
  int mid_index = 0;
  int t1_index = 0;
  int end_index = 0;

  double S(double t) const;
  double V(double t) const;
  double A(double t) const;
};

// Two quintics in s stitched at s1 with d' = d'' = 0 there and
// d = d' = d'' = 0 at the end. A degenerate profile holds d constant
// (emitted only when the longitudinal profile never moves).
struct LateralProfile {
  PolynomialSegment first;
  PolynomialSegment second;
  double s_begin = 0.0;
  double s1 = 0.0;
  double s_end = 0.0;
  bool constant = false;
  double constant_d = 0.0;
  int offset_index = 0;
  int s1_index = 0;

  double D(double s) const;
  double Dp(double s) const;
  double Dpp(double s) const;
};

struct TrajectoryProvenance {
  int lane_id = 0;
  int lane_slot = 0;  // 0 current, 1 left, 2 right
  int lon_index = 0;
  int lat_index = 0;
};

// Candidate trajectory: bicycle states every dt over the horizon plus
// the Frenet trace against its chain (chains owned by CandidateSet).
struct Trajectory {
  int id = 0;
  int chain_index = -1;
  TrajectoryProvenance provenance;
  std::vector<BicycleState> states;
  std::vector<FrenetState> frenet;
};

struct SamplerConfig {
  double horizon = 5.0;
  double dt = 0.1;
  std::vector<double> t1_values = {1.5, 2.5};
  std::vector<double> lateral_offsets = {-1.5, -0.75, 0.0, 0.75, 1.5};
  std::vector<double> s1_times = {2.0, 3.5};
  // Target speed recipe {0, 0.5 v, v, v + extra, speed_limit}; an
  // explicit list overrides the recipe when non-empty.
  double extra_speed = 2.0;
  std::vector<double> fixed_speed_targets;
  double a_max = 3.0;
  double a_min = -6.0;
  double kappa_max = 0.2;
  bool include_neighbor_lanes = true;
  double chain_length = 150.0;  // how far successor chains are extended

  int StatesPerTrajectory() const {
    return static_cast<int>(std::lround(horizon / dt)) + 1;
  }
};

struct SamplerStats {
  int longitudinal_profiles = 0;
  int lateral_profiles = 0;
  int raw_combinations = 0;
  int pruned_reverse = 0;
  int pruned_accel = 0;
  int pruned_curvature = 0;
  int pruned_singular = 0;
  int degenerate_solves = 0;
};

struct CandidateSet {
  std::vector<std::shared_ptr<const LaneChain>> chains;
  std::vector<Trajectory> trajectories;
  SamplerStats stats;
};

// Boundary-value solves. Profiles with reverse motion are discarded.
std::vector<LongitudinalProfile> SampleLongitudinal(
    double s0, double v0, double a0, const std::vector<double>& mid_speeds,
    const std::vector<double>& t1_values, const std::vector<double>& end_speeds,
    double horizon, SamplerStats* stats = nullptr);

std::vector<LateralProfile> SampleLateral(const LongitudinalProfile& lon,
                                          double d0, double dp0, double dpp0,
                                          const std::vector<double>& mid_offsets,
                                          const std::vector<double>& s1_times,
                                          SamplerStats* stats = nullptr);

// Full lattice over the current lane and its immediate neighbors; the
// output order is deterministic in (lane slot, lon index, lat index).
CandidateSet GenerateCandidates(const BicycleState& sdv, const LaneMap& map,
                                const Route& route, const SamplerConfig& config);

// Straight maximal-deceleration profile used when planning fails.
Trajectory EmergencyStopTrajectory(const BicycleState& sdv, double decel,
                                   double dt, double horizon);

}  // namespace ogp
