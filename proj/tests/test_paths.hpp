// Shared path builders for tests.
#pragma once

#include <cmath>
#include <vector>

#include "ogp/driving_path.hpp"

namespace ogp::testing {

inline DrivingPath StraightPath(double length = 100.0, double y = 0.0) {
  return DrivingPath::FromPolyline({{0.0, y}, {length, y}});
}

// Counterclockwise circle of the given radius starting at the origin
// heading +x, sampled every 0.25 m of true arc.
inline DrivingPath CirclePath(double radius, double arc_fraction = 0.9) {
  std::vector<Vec2> pts;
  const double total = 2.0 * M_PI * radius * arc_fraction;
  for (double s = 0.0; s <= total; s += 0.25) {
    const double phi = s / radius;
    pts.push_back({radius * std::sin(phi), radius * (1.0 - std::cos(phi))});
  }
  return DrivingPath::FromPolyline(pts);
}

// Heading integrated from a smoothly varying curvature profile.
inline DrivingPath CurvyPath(double length = 200.0, double k0 = 0.02,
                             double k1 = 0.015, double wavelength = 60.0) {
  std::vector<Vec2> pts;
  double theta = 0.0;
  Vec2 p{0.0, 0.0};
  const double ds = 0.1;
  for (double s = 0.0; s <= length; s += ds) {
    pts.push_back(p);
    const double kappa = k0 + k1 * std::sin(2.0 * M_PI * s / wavelength);
    theta += kappa * ds;
    p += ds * Vec2{std::cos(theta), std::sin(theta)};
  }
  return DrivingPath::FromPolyline(pts);
}

// Same curvature profile but sampled analytically at fine spacing, for
// oracles that differentiate the interpolated curve directly.
inline DrivingPath FineCurvyPath(double length = 150.0, double k0 = 0.02,
                                 double k1 = 0.015, double wavelength = 60.0,
                                 double spacing = 0.05) {
  std::vector<Vec2> pts;
  std::vector<double> headings, curvatures;
  double theta = 0.0;
  Vec2 p{0.0, 0.0};
  const double ds = spacing / 8.0;
  double next_sample = 0.0;
  for (double s = 0.0; s <= length + 1e-9; s += ds) {
    const double kappa = k0 + k1 * std::sin(2.0 * M_PI * s / wavelength);
    if (s >= next_sample - 1e-12) {
      pts.push_back(p);
      headings.push_back(theta);
      curvatures.push_back(kappa);
      next_sample += spacing;
    }
    // Midpoint integration keeps headings consistent with positions.
    const double kappa_mid =
        k0 + k1 * std::sin(2.0 * M_PI * (s + 0.5 * ds) / wavelength);
    const double theta_mid = theta + 0.5 * kappa_mid * ds;
    p += ds * Vec2{std::cos(theta_mid), std::sin(theta_mid)};
    theta += kappa_mid * ds;
  }
  return DrivingPath::FromSamples(std::move(pts), std::move(headings),
                                  std::move(curvatures));
}

}  // namespace ogp::testing
