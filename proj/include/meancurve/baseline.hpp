#pragma once

#include <optional>
#include <vector>

#include "meancurve/geometry.hpp"

namespace meancurve {

/// Curve whose heading is start.theta + kappa0 * s + kappa_rate * s^2 / 2.
struct ClothoidSegment {
  Inducer start;
  double length = 0.0;
  double kappa0 = 0.0;
  double kappa_rate = 0.0;

  double theta_at(double s) const { return start.theta() + kappa0 * s + 0.5 * kappa_rate * s * s; }
  double kappa_at(double s) const { return kappa0 + kappa_rate * s; }
  /// Integral of |kappa| over the segment.
  double total_turning() const;
};

struct ClothoidState {
  Point2 position;
  double theta = 0.0;  // unwrapped heading
  double kappa = 0.0;
};

/// Pose and curvature at arc length s in [0, length]; position by adaptive
/// Gauss-Kronrod quadrature to 1e-9 * length absolute.
ClothoidState eval_clothoid(const ClothoidSegment& seg, double s);

/// n samples at equal arc-length spacing.
std::vector<Point2> sample_clothoid(const ClothoidSegment& seg, int n);

/// G1 Hermite clothoid: leaves i1 along i1.theta and arrives at i2 moving
/// along i2.theta + π (i2's tangent points back into the gap). Among the
/// roots found from the restart grid the one with least total turning wins.
/// Throws kNoConvergence when no root is found.
ClothoidSegment solve_g1_clothoid(const Inducer& i1, const Inducer& i2);

struct EulerCompletion {
  Polyline curve;
  std::optional<ClothoidSegment> segment;  // empty when the biarc fallback was used
  bool biarc_fallback = false;
};

/// Clothoid completion sampled at n points, endpoints pinned to the inducer
/// positions; falls back to a biarc if the clothoid solve fails.
EulerCompletion euler_spiral_complete(const Inducer& i1, const Inducer& i2, int n);

/// Two circular arcs with equal tangent-leg lengths, joined with G1 continuity.
Polyline biarc_complete(const Inducer& i1, const Inducer& i2, int n);

}  // namespace meancurve
