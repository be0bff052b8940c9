#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "meancurve/corpus.hpp"
#include "meancurve/index.hpp"

namespace meancurve {

/// Symmetric 2x2 covariance.
struct Cov2 {
  double xx = 0.0;
  double xy = 0.0;
  double yy = 0.0;
};

struct CurveFlags {
  bool scale_invariant_used = false;
  bool midway_extended = false;
  bool fallback_used = false;
};

/// Pointwise mean of matched fragments resampled to n equal-arc-length points,
/// in the canonical frame of the query.
struct MeanCurve {
  std::vector<Point2> points;
  int n = 0;
  std::size_t m = 0;
  std::vector<Cov2> covariance;  // population covariance per point index
  CurveFlags flags;

  std::span<const Point2> per_point_mean() const { return points; }
};

/// Matched fragment mapped by align ∘ to_canonical and resampled to n points.
std::vector<Point2> aligned_fragment(const FragmentIndex& index, const Corpus& corpus, const Match& match, int n);

MeanCurve mean_curve(const FragmentIndex& index, const Corpus& corpus, std::span<const Match> matches, int n);

struct ReconstructOptions {
  int n = 16;
  QueryTolerances tolerances;
  bool scale_invariant = true;
  std::size_t midway_threshold = 400;
  int max_depth = 3;
  bool fallback = true;  // Euler spiral for sub-gaps without samples
};

struct Reconstruction {
  Polyline curve;                     // image frame, endpoints equal the inducers
  MeanCurve mean;                     // direct (top-level) mean, canonical frame
  std::vector<Point2> canonical_points;  // final curve in the canonical frame
  Canonicalization frame;
  CurveFlags flags;                   // aggregated over the recursion
  std::size_t nodes = 0;              // reconstructions performed, including sub-gaps
  std::size_t fallback_nodes = 0;
  int max_depth_reached = 0;
};

/// Mean-curve reconstructor over a frozen index. Stateless between calls, so
/// one instance can serve concurrent queries.
class Reconstructor {
 public:
  Reconstructor(const FragmentIndex& index, const Corpus& corpus, ReconstructOptions options = {});

  const ReconstructOptions& options() const { return options_; }

  /// Throws kCoincidentInducers, or kNoPrior when the top level has no
  /// samples and the fallback is disabled.
  Reconstruction reconstruct(const Inducer& i1, const Inducer& i2) const;

  /// Matches for a configuration under the configured query kind.
  std::vector<Match> matches(const RelativeConfiguration& config) const;

  /// Rebuilds the gap through the arc-length midpoint of `provisional` as two
  /// reconstructions i1 -> I3 -> i2. Inducers and provisional share a frame.
  Polyline midway_extend(const Inducer& i1, const Inducer& i2, const MeanCurve& provisional, int depth) const;

 private:
  struct Node {
    std::vector<Point2> points;
    CurveFlags flags;
    std::size_t nodes = 0;
    std::size_t fallback_nodes = 0;
    int max_depth = 0;
  };

  Node solve(const Inducer& i1, const Inducer& i2, int depth, MeanCurve* top_mean) const;
  Node extend(const Inducer& i1, const Inducer& i2, const MeanCurve& provisional, int depth) const;

  const FragmentIndex& index_;
  const Corpus& corpus_;
  ReconstructOptions options_;
};

/// Midpoint inducer of a curve: position at half the arc length, heading by
/// central difference around the middle sample.
Inducer curve_midpoint(std::span<const Point2> points);

/// Inducers on the X axis at (0,0) and (1,0) with headings theta1, theta2.
RelativeConfiguration horizontal_configuration(double theta1, double theta2);

struct ScaleInvarianceReport {
  RelativeConfiguration config;  // unit-distance base configuration
  std::vector<double> scales;
  std::vector<Point2> mu;        // per-scale mean center point, unit frame
  std::vector<double> sigma;     // per-scale RMS distance of center points from mu
  std::vector<std::size_t> counts;
  double std_of_mu = 0.0;        // sqrt(mean_s |mu_s - mean(mu)|^2) over used scales
  double mean_of_sigma = 0.0;
  std::size_t scales_used = 0;   // scales with at least min_samples matches
};

/// Throws kInsufficientScales if fewer than two scales reach min_samples.
ScaleInvarianceReport scale_invariance_analysis(const FragmentIndex& index, const Corpus& corpus,
                                                const RelativeConfiguration& p_unit, std::span<const double> scales,
                                                const QueryTolerances& tol, std::size_t min_samples = 1);

struct ScaleGridCell {
  double theta1 = 0.0;
  double theta2 = 0.0;
  bool valid = false;  // false when the cell had too few populated scales
  ScaleInvarianceReport report;
};

/// Sweep of horizontal configurations theta1, theta2 in [0, π] on a
/// resolution x resolution grid; OpenMP over cells.
std::vector<ScaleGridCell> scale_invariance_grid(const FragmentIndex& index, const Corpus& corpus, int resolution,
                                                 std::span<const double> scales, const QueryTolerances& tol,
                                                 std::size_t min_samples);
/// Single-threaded reference for scale_invariance_grid.
std::vector<ScaleGridCell> scale_invariance_grid_serial(const FragmentIndex& index, const Corpus& corpus,
                                                        int resolution, std::span<const double> scales,
                                                        const QueryTolerances& tol, std::size_t min_samples);

}  // namespace meancurve
