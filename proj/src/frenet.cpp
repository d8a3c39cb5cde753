#include "ogp/frenet.hpp"

#include <cmath>

namespace ogp {

BicycleState FrenetToBicycle(const FrenetState& f, const DrivingPath& path) {
  const PathPoint r = path.At(f.s);
  const double q = 1.0 - f.d * r.curvature;
  if (q <= 1e-9) {
    throw SingularTransformError("frenet transform singular: 1 - d*kappa <= 0");
  }
  const double dtheta = std::atan2(f.d_prime, q);
  const double cos_dt = std::cos(dtheta);
  const double tan_dt = f.d_prime / q;

  BicycleState b;
  const Vec2 pos = r.position + f.d * LeftNormal(r.heading);
  b.x = pos.x;
  b.y = pos.y;
  b.theta = r.heading + dtheta;
  b.v = f.s_dot * q / cos_dt;

  // kp = d/ds of (kappa_r*d + terms): shorthand for the chain rule pieces.
  const double kr = r.curvature;
  const double krp = r.curvature_rate;
  const double mix = f.d_prime * kr + f.d * krp;
  b.kappa = cos_dt / q * (kr + cos_dt * cos_dt / (q * q) *
                                   (f.d_dprime * q + f.d_prime * mix));
  b.a = f.s_ddot * q / cos_dt +
        f.s_dot * f.s_dot / cos_dt *
            (q * tan_dt * (b.kappa * q / cos_dt - kr) - mix);
  return b;
}

FrenetState BicycleToFrenet(const BicycleState& b, const DrivingPath& path,
                            double hint_s) {
  FrenetState f;
  path.Project(b.Position(), &f.s, &f.d, hint_s);
  const PathPoint r = path.At(f.s);
  const double q = 1.0 - f.d * r.curvature;
  if (q <= 1e-9) {
    throw SingularTransformError("frenet transform singular: 1 - d*kappa <= 0");
  }
  const double dtheta = WrapAngle(b.theta - r.heading);
  if (std::abs(dtheta) >= 0.5 * M_PI) {
    throw SingularTransformError("heading offset beyond +-90 degrees");
  }
  const double cos_dt = std::cos(dtheta);
  const double tan_dt = std::tan(dtheta);

  f.d_prime = q * tan_dt;
  f.s_dot = b.v * cos_dt / q;

  const double kr = r.curvature;
  const double krp = r.curvature_rate;
  const double mix = f.d_prime * kr + f.d * krp;
  f.d_dprime =
      ((b.kappa * q / cos_dt - kr) * q * q / (cos_dt * cos_dt) -
       f.d_prime * mix) /
      q;
  f.s_ddot = (b.a - f.s_dot * f.s_dot / cos_dt *
                        (q * tan_dt * (b.kappa * q / cos_dt - kr) - mix)) *
             cos_dt / q;
  return f;
}

}  // namespace ogp
