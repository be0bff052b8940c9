#include <cmath>
#include <random>

#include "meancurve/corpus.hpp"

namespace meancurve {

SynthFamily parse_synth_family(const std::string& name) {
  if (name == "circular_arcs" || name == "arcs") return SynthFamily::kCircularArcs;
  if (name == "lines") return SynthFamily::kLines;
  if (name == "smoothed_random_walks" || name == "walks") return SynthFamily::kSmoothedRandomWalks;
  throw Error(ErrorCode::kInvalidArgument, "unknown synthetic family '" + name + "'");
}

std::string to_string(SynthFamily family) {
  switch (family) {
    case SynthFamily::kCircularArcs: return "circular_arcs";
    case SynthFamily::kLines: return "lines";
    case SynthFamily::kSmoothedRandomWalks: return "smoothed_random_walks";
  }
  return "unknown";
}

namespace {

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

double log_uniform(Rng& rng, double lo, double hi) { return std::exp(uniform(rng, std::log(lo), std::log(hi))); }

std::vector<Point2> make_line(Rng& rng, int points, const SynthParams& p) {
  const Point2 origin{uniform(rng, 0.0, 1000.0), uniform(rng, 0.0, 1000.0)};
  const Point2 dir = unit_vector(uniform(rng, 0.0, kTwoPi));
  const double step = log_uniform(rng, p.min_step, p.max_step);
  std::vector<Point2> pts;
  pts.reserve(static_cast<std::size_t>(points));
  double s = 0.0;
  for (int k = 0; k < points; ++k) {
    pts.push_back(origin + s * dir);
    s += step * uniform(rng, 0.5, 1.5);
  }
  return pts;
}

// Radius is log-uniform and the subtended angle and point count do not depend
// on it, so the family has no preferred scale.
std::vector<Point2> make_arc(Rng& rng, int points, const SynthParams& p) {
  const double radius = log_uniform(rng, p.min_radius, p.max_radius);
  const double sweep = uniform(rng, p.min_arc_angle, p.max_arc_angle);
  const Point2 center{uniform(rng, 0.0, 1000.0), uniform(rng, 0.0, 1000.0)};
  const double start = uniform(rng, 0.0, kTwoPi);
  const double sense = std::bernoulli_distribution(0.5)(rng) ? 1.0 : -1.0;
  std::vector<Point2> pts;
  pts.reserve(static_cast<std::size_t>(points));
  for (int k = 0; k < points; ++k) {
    const double a = start + sense * sweep * static_cast<double>(k) / static_cast<double>(points - 1);
    pts.push_back(center + radius * unit_vector(a));
  }
  return pts;
}

std::vector<Point2> make_walk(Rng& rng, int points, const SynthParams& p) {
  const int steps = points - 1;
  const int half = static_cast<int>(std::ceil(3.0 * p.smoothing_sigma));
  std::vector<double> kernel(static_cast<std::size_t>(2 * half + 1));
  double energy = 0.0;
  for (int k = -half; k <= half; ++k) {
    const double w = std::exp(-0.5 * k * k / (p.smoothing_sigma * p.smoothing_sigma));
    kernel[static_cast<std::size_t>(k + half)] = w;
    energy += w * w;
  }
  // Unit-variance output after convolution.
  for (double& w : kernel) w /= std::sqrt(energy);

  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> noise(static_cast<std::size_t>(steps + 2 * half));
  for (double& v : noise) v = gauss(rng);

  const double bias = uniform(rng, -p.turn_bias, p.turn_bias);
  const double step = log_uniform(rng, p.min_step, p.max_step);
  double heading = uniform(rng, 0.0, kTwoPi);
  Point2 at{uniform(rng, 0.0, 1000.0), uniform(rng, 0.0, 1000.0)};

  std::vector<Point2> pts;
  pts.reserve(static_cast<std::size_t>(points));
  pts.push_back(at);
  for (int k = 0; k < steps; ++k) {
    double turn = 0.0;
    for (std::size_t w = 0; w < kernel.size(); ++w) turn += kernel[w] * noise[static_cast<std::size_t>(k) + w];
    heading += bias + p.turn_sigma * turn;
    at += step * unit_vector(heading);
    pts.push_back(at);
  }
  return pts;
}

}  // namespace

std::vector<CurveRecord> synth_corpus(std::uint64_t seed, std::size_t n_curves, SynthFamily family,
                                      const SynthParams& params) {
  if (params.min_points < static_cast<int>(kMinCurvePoints) || params.max_points < params.min_points ||
      params.curves_per_image < 1) {
    throw Error(ErrorCode::kInvalidArgument, "synthetic corpus parameters out of range");
  }
  Rng rng(seed);
  std::vector<CurveRecord> curves;
  curves.reserve(n_curves);
  for (std::size_t c = 0; c < n_curves; ++c) {
    const int points = std::uniform_int_distribution<int>(params.min_points, params.max_points)(rng);
    std::vector<Point2> pts;
    switch (family) {
      case SynthFamily::kLines: pts = make_line(rng, points, params); break;
      case SynthFamily::kCircularArcs: pts = make_arc(rng, points, params); break;
      case SynthFamily::kSmoothedRandomWalks: pts = make_walk(rng, points, params); break;
    }
    const std::size_t image = c / static_cast<std::size_t>(params.curves_per_image);
    curves.push_back(CurveRecord{static_cast<std::int64_t>(c), "synth" + std::to_string(image), Polyline(std::move(pts))});
  }
  return curves;
}

}  // namespace meancurve
