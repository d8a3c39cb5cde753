#pragma once

#include <stdexcept>

#include "ogp/driving_path.hpp"
#include "ogp/geometry.hpp"

namespace ogp {

struct SingularTransformError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Kinematic bicycle state; (x, y) is the rear axle center.
struct BicycleState {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;  // rad
  double v = 0.0;      // m/s, forward only
  double kappa = 0.0;  // 1/m
  double a = 0.0;      // m/s^2

  Vec2 Position() const { return {x, y}; }
};

// Lane-relative state: longitudinal arc length and derivatives w.r.t.
// time, lateral offset and derivatives w.r.t. arc length.
struct FrenetState {
  double s = 0.0;
  double s_dot = 0.0;
  double s_ddot = 0.0;
  double d = 0.0;
  double d_prime = 0.0;   // dd/ds
  double d_dprime = 0.0;  // d^2 d/ds^2
};

// Standard lane-following Frenet -> bicycle transform. Throws
// SingularTransformError when 1 - d*kappa_path(s) <= 0.
BicycleState FrenetToBicycle(const FrenetState& f, const DrivingPath& path);

// Inverse transform; projects the position onto the path first.
// hint_s narrows the projection search window (see DrivingPath::Project).
FrenetState BicycleToFrenet(const BicycleState& b, const DrivingPath& path,
                            double hint_s = -1.0);

}  // namespace ogp
