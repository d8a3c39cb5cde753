#pragma once

#include <stdexcept>
#include <vector>

#include "ogp/geometry.hpp"

namespace ogp {

struct InvalidInputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Pose and curvature of a path at a given arc length.
struct PathPoint {
  Vec2 position;
  double heading = 0.0;       // rad, continuous along the path
  double curvature = 0.0;     // 1/m, signed (left turn positive)
  double curvature_rate = 0.0;  // d(curvature)/ds on the local segment
};

// Arc-length parameterized lane centerline stored as a dense polyline
// with per-vertex heading and signed curvature. Headings are kept
// unwrapped so interpolation never crosses a +-pi jump.
class DrivingPath {
 public:
  DrivingPath() = default;

  // Resamples a raw polyline at the given spacing and derives heading
  // and curvature by finite differences.
  static DrivingPath FromPolyline(const std::vector<Vec2>& points,
                                  double spacing = 0.5);

  // Builds directly from per-vertex samples (headings must already be
  // continuous). Used for analytic paths in tests and by chain glue.
  static DrivingPath FromSamples(std::vector<Vec2> vertices,
                                 std::vector<double> headings,
                                 std::vector<double> curvatures);

  bool Empty() const { return vertices_.size() < 2; }
  double Length() const { return s_.empty() ? 0.0 : s_.back(); }
  size_t NumVertices() const { return vertices_.size(); }
  const std::vector<Vec2>& vertices() const { return vertices_; }
  const std::vector<double>& arc_lengths() const { return s_; }
  const std::vector<double>& headings() const { return headings_; }
  const std::vector<double>& curvatures() const { return curvatures_; }

  // Interpolated pose at arc length s (clamped to [0, Length]).
  PathPoint At(double s) const;

  // Closest-point projection: returns arc length s in [0, Length] and
  // the signed lateral offset d (left positive). The foot point is
  // refined so that (p - r(s)) is orthogonal to the interpolated
  // tangent, which makes the Frenet transforms exactly invertible.
  // hint_s, when >= 0, restricts the coarse search to a window around
  // it (callers projecting consecutive trajectory states use this).
  void Project(const Vec2& p, double* s_out, double* d_out,
               double hint_s = -1.0, double hint_window = 20.0) const;

 private:
  size_t SegmentIndex(double s) const;
  void FinalizeArcLengths();

  std::vector<Vec2> vertices_;
  std::vector<double> headings_;
  std::vector<double> curvatures_;
  std::vector<double> s_;
};

}  // namespace ogp
