#include "ogp/sampler.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

namespace ogp {

namespace {

constexpr double kMinSegmentTime = 0.05;
constexpr double kMinSegmentArc = 0.5;
constexpr double kReverseTolerance = 1e-9;

double Horner(const std::array<double, 6>& c, double xi, int start_power) {
  // Evaluates sum_k c[k] * P(k, start_power) * xi^(k - start_power) for
  // the derivative order implied by start_power (0, 1, 2).
  double acc = 0.0;
  for (int k = 5; k >= start_power; --k) {
    double factor = 1.0;
    for (int p = 0; p < start_power; ++p) factor *= static_cast<double>(k - p);
    acc = acc * xi + c[static_cast<size_t>(k)] * factor;
  }
  return acc;
}

}  // namespace

double PolynomialSegment::Value(double u) const {
  const double L = u1 - u0;
  const double xi = (u - u0) / L;
  return Horner(coeffs, xi, 0);
}

double PolynomialSegment::Deriv1(double u) const {
  const double L = u1 - u0;
  const double xi = (u - u0) / L;
  return Horner(coeffs, xi, 1) / L;
}

double PolynomialSegment::Deriv2(double u) const {
  const double L = u1 - u0;
  const double xi = (u - u0) / L;
  return Horner(coeffs, xi, 2) / (L * L);
}

double LongitudinalProfile::S(double t) const {
  return t <= t1 ? first.Value(t) : second.Value(t);
}
double LongitudinalProfile::V(double t) const {
  return t <= t1 ? first.Deriv1(t) : second.Deriv1(t);
}
double LongitudinalProfile::A(double t) const {
  return t <= t1 ? first.Deriv2(t) : second.Deriv2(t);
}

double LateralProfile::D(double s) const {
  if (constant) return constant_d;
  if (s >= s_end) return 0.0;
  return s <= s1 ? first.Value(s) : second.Value(s);
}
double LateralProfile::Dp(double s) const {
  if (constant || s >= s_end) return 0.0;
  return s <= s1 ? first.Deriv1(s) : second.Deriv1(s);
}
double LateralProfile::Dpp(double s) const {
  if (constant || s >= s_end) return 0.0;
  return s <= s1 ? first.Deriv2(s) : second.Deriv2(s);
}

namespace {

// Quartic over [0, L] (normalized) from full initial condition
// (value, 1st, 2nd derivative w.r.t. u at u=0) to end velocity/zero
// acceleration at u=L.
PolynomialSegment SolveQuartic(double u_begin, double u_end, double p0,
                               double v0, double a0, double v_end) {
  PolynomialSegment seg;
  seg.u0 = u_begin;
  seg.u1 = u_end;
  const double L = u_end - u_begin;
  auto& c = seg.coeffs;
  c[0] = p0;
  c[1] = v0 * L;
  c[2] = 0.5 * a0 * L * L;
  const double b1 = v_end * L - c[1] - 2.0 * c[2];
  const double b2 = -2.0 * c[2];
  // [3 4; 6 12] * [c3 c4]^T = [b1 b2]^T, det = 12
  c[3] = (12.0 * b1 - 4.0 * b2) / 12.0;
  c[4] = (3.0 * b2 - 6.0 * b1) / 12.0;
  c[5] = 0.0;
  return seg;
}

// Quintic over [u_begin, u_end] from full initial condition to full
// end condition (value, 1st, 2nd derivative w.r.t. u).
PolynomialSegment SolveQuintic(double u_begin, double u_end, double p0,
                               double v0, double a0, double p1, double v1,
                               double a1) {
  PolynomialSegment seg;
  seg.u0 = u_begin;
  seg.u1 = u_end;
  const double L = u_end - u_begin;
  auto& c = seg.coeffs;
  c[0] = p0;
  c[1] = v0 * L;
  c[2] = 0.5 * a0 * L * L;
  Eigen::Matrix3d m;
  m << 1.0, 1.0, 1.0, 3.0, 4.0, 5.0, 6.0, 12.0, 20.0;
  Eigen::Vector3d rhs;
  rhs << p1 - c[0] - c[1] - c[2], v1 * L - c[1] - 2.0 * c[2],
      a1 * L * L - 2.0 * c[2];
  const Eigen::Vector3d sol = m.partialPivLu().solve(rhs);
  c[3] = sol[0];
  c[4] = sol[1];
  c[5] = sol[2];
  return seg;
}

bool HasReverseMotion(const LongitudinalProfile& lon) {
  for (double t = 0.0; t <= lon.horizon + 1e-9; t += 0.02) {
    if (lon.V(t) < -kReverseTolerance) return true;
  }
  return false;
}

}  // namespace

std::vector<LongitudinalProfile> SampleLongitudinal(
    double s0, double v0, double a0, const std::vector<double>& mid_speeds,
    const std::vector<double>& t1_values, const std::vector<double>& end_speeds,
    double horizon, SamplerStats* stats) {
  if (v0 < 0.0) throw InvalidInputError("initial speed must be non-negative");
  std::vector<LongitudinalProfile> out;
  for (size_t mi = 0; mi < mid_speeds.size(); ++mi) {
    for (size_t ti = 0; ti < t1_values.size(); ++ti) {
      const double t1 = t1_values[ti];
      if (t1 < kMinSegmentTime || horizon - t1 < kMinSegmentTime) {
        if (stats != nullptr) ++stats->degenerate_solves;
        continue;
      }
      const double v_mid = std::max(0.0, mid_speeds[mi]);
      const PolynomialSegment first = SolveQuartic(0.0, t1, s0, v0, a0, v_mid);
      const double s_mid = first.Value(t1);
      for (size_t ei = 0; ei < end_speeds.size(); ++ei) {
        LongitudinalProfile lon;
        lon.first = first;
        lon.second = SolveQuartic(t1, horizon, s_mid, v_mid, 0.0,
                                  std::max(0.0, end_speeds[ei]));
        lon.t1 = t1;
        lon.horizon = horizon;
        lon.mid_index = static_cast<int>(mi);
        lon.t1_index = static_cast<int>(ti);
        lon.end_index = static_cast<int>(ei);
        if (HasReverseMotion(lon)) {
          if (stats != nullptr) ++stats->pruned_reverse;
          continue;
        }
        out.push_back(std::move(lon));
      }
    }
  }
  if (stats != nullptr) stats->longitudinal_profiles += static_cast<int>(out.size());
  return out;
}

std::vector<LateralProfile> SampleLateral(const LongitudinalProfile& lon,
                                          double d0, double dp0, double dpp0,
                                          const std::vector<double>& mid_offsets,
                                          const std::vector<double>& s1_times,
                                          SamplerStats* stats) {
  std::vector<LateralProfile> out;
  const double s_begin = lon.S(0.0);
  const double s_end = lon.S(lon.horizon);

  if (s_end - s_begin < kMinSegmentArc) {
    // The vehicle barely moves: hold the current offset.
    LateralProfile hold;
    hold.constant = true;
    hold.constant_d = d0;
    hold.s_begin = s_begin;
    hold.s1 = s_begin;
    hold.s_end = s_end;
    hold.offset_index = 0;
    hold.s1_index = 0;
    out.push_back(hold);
    if (stats != nullptr) stats->lateral_profiles += 1;
    return out;
  }

  for (size_t oi = 0; oi < mid_offsets.size(); ++oi) {
    for (size_t si = 0; si < s1_times.size(); ++si) {
      const double s1 = lon.S(s1_times[si]);
      if (s1 - s_begin < kMinSegmentArc || s_end - s1 < kMinSegmentArc) {
        if (stats != nullptr) ++stats->degenerate_solves;
        continue;
      }
      LateralProfile lat;
      lat.s_begin = s_begin;
      lat.s1 = s1;
      lat.s_end = s_end;
      lat.first = SolveQuintic(s_begin, s1, d0, dp0, dpp0, mid_offsets[oi], 0.0, 0.0);
      lat.second = SolveQuintic(s1, s_end, mid_offsets[oi], 0.0, 0.0, 0.0, 0.0, 0.0);
      lat.offset_index = static_cast<int>(oi);
      lat.s1_index = static_cast<int>(si);
      out.push_back(std::move(lat));
    }
  }
  if (stats != nullptr) stats->lateral_profiles += static_cast<int>(out.size());
  return out;
}

namespace {

std::vector<double> SpeedTargets(const SamplerConfig& config, double v,
                                 double speed_limit) {
  std::vector<double> targets;
  if (!config.fixed_speed_targets.empty()) {
    targets = config.fixed_speed_targets;
  } else {
    targets = {0.0, 0.5 * v, v, v + config.extra_speed, speed_limit};
  }
  std::vector<double> unique;
  for (double t : targets) {
    t = std::max(0.0, t);
    bool dup = false;
    for (double u : unique) dup = dup || std::abs(u - t) < 1e-6;
    if (!dup) unique.push_back(t);
  }
  return unique;
}

}  // namespace

CandidateSet GenerateCandidates(const BicycleState& sdv, const LaneMap& map,
                                const Route& route, const SamplerConfig& config) {
  CandidateSet set;
  const auto located = map.LocatePoint(sdv.Position(), 1.5);
  if (!located) {
    throw InvalidInputError("SDV is not projectable onto any lane");
  }
  const Lane& current = map.At(located->lane_id);

  std::vector<std::pair<int, int>> lane_slots;  // (lane id, slot)
  lane_slots.emplace_back(current.id, 0);
  if (config.include_neighbor_lanes) {
    if (current.left_neighbor) lane_slots.emplace_back(*current.left_neighbor, 1);
    if (current.right_neighbor) lane_slots.emplace_back(*current.right_neighbor, 2);
  }

  const int n_states = config.StatesPerTrajectory();
  int next_id = 0;

  for (const auto& [lane_id, slot] : lane_slots) {
    auto chain = std::make_shared<LaneChain>(
        BuildChain(map, route, lane_id, config.chain_length +
                                            sdv.v * config.horizon + 60.0));
    FrenetState init;
    try {
      init = BicycleToFrenet(sdv, chain->path);
    } catch (const SingularTransformError&) {
      ++set.stats.pruned_singular;
      continue;
    }
    const int chain_index = static_cast<int>(set.chains.size());
    set.chains.push_back(chain);

    const double speed_limit = map.At(chain->SpanAt(init.s).lane_id).speed_limit;
    const std::vector<double> targets = SpeedTargets(config, sdv.v, speed_limit);
    const std::vector<LongitudinalProfile> lons =
        SampleLongitudinal(init.s, init.s_dot, init.s_ddot, targets,
                           config.t1_values, targets, config.horizon, &set.stats);

    for (size_t li = 0; li < lons.size(); ++li) {
      const LongitudinalProfile& lon = lons[li];
      const std::vector<LateralProfile> lats =
          SampleLateral(lon, init.d, init.d_prime, init.d_dprime,
                        config.lateral_offsets, config.s1_times, &set.stats);
      for (size_t qi = 0; qi < lats.size(); ++qi) {
        const LateralProfile& lat = lats[qi];
        ++set.stats.raw_combinations;

        Trajectory traj;
        traj.chain_index = chain_index;
        traj.provenance = {lane_id, slot, static_cast<int>(li), static_cast<int>(qi)};
        traj.states.reserve(static_cast<size_t>(n_states));
        traj.frenet.reserve(static_cast<size_t>(n_states));

        bool ok = true;
        int prune_accel = 0, prune_kappa = 0;
        for (int k = 0; k < n_states && ok; ++k) {
          const double t = config.dt * k;
          FrenetState f;
          f.s = lon.S(t);
          f.s_dot = lon.V(t);
          f.s_ddot = lon.A(t);
          f.d = lat.D(f.s);
          f.d_prime = lat.Dp(f.s);
          f.d_dprime = lat.Dpp(f.s);
          BicycleState b;
          try {
            b = FrenetToBicycle(f, chain->path);
          } catch (const SingularTransformError&) {
            ok = false;
            ++set.stats.pruned_singular;
            break;
          }
          if (b.a > config.a_max + 1e-9 || b.a < config.a_min - 1e-9) {
            ok = false;
            prune_accel = 1;
            break;
          }
          if (std::abs(b.kappa) > config.kappa_max + 1e-9) {
            ok = false;
            prune_kappa = 1;
            break;
          }
          traj.states.push_back(b);
          traj.frenet.push_back(f);
        }
        set.stats.pruned_accel += prune_accel;
        set.stats.pruned_curvature += prune_kappa;
        if (!ok) continue;

        traj.id = next_id++;
        set.trajectories.push_back(std::move(traj));
      }
    }
  }
  return set;
}

Trajectory EmergencyStopTrajectory(const BicycleState& sdv, double decel,
                                   double dt, double horizon) {
  Trajectory traj;
  traj.id = -1;
  traj.chain_index = -1;
  const int n = static_cast<int>(std::lround(horizon / dt)) + 1;
  BicycleState b = sdv;
  b.kappa = 0.0;
  for (int k = 0; k < n; ++k) {
    b.a = b.v > 1e-9 ? -std::abs(decel) : 0.0;
    traj.states.push_back(b);
    const double v_next = std::max(0.0, b.v - std::abs(decel) * dt);
    const double ds = 0.5 * (b.v + v_next) * dt;
    b.x += ds * std::cos(b.theta);
    b.y += ds * std::sin(b.theta);
    b.v = v_next;
  }
  return traj;
}

}  // namespace ogp
