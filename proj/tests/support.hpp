#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <vector>

#include "meancurve/geometry.hpp"

namespace mctest {

using meancurve::Inducer;
using meancurve::Point2;
using meancurve::Similarity2;

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool coin() { return integer(0, 1) == 1; }
  double angle() { return uniform(0.0, meancurve::kTwoPi); }
  Point2 point(double range) { return {uniform(-range, range), uniform(-range, range)}; }

  std::vector<Point2> points(int n, double range) {
    std::vector<Point2> out;
    for (int k = 0; k < n; ++k) out.push_back(point(range));
    return out;
  }

  Inducer inducer(double range) { return Inducer(point(range), angle()); }

  Similarity2 similarity(double scale_lo, double scale_hi, bool allow_reflect = true) {
    Similarity2 t;
    t.rotation = uniform(-meancurve::kPi, meancurve::kPi);
    t.scale = std::exp(uniform(std::log(scale_lo), std::log(scale_hi)));
    t.translation = point(100.0);
    t.reflect = allow_reflect && coin();
    return t;
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

// Exhaustive search over every monotone coupling path; no memoisation.
inline void couple(const std::vector<Point2>& a, const std::vector<Point2>& b, std::size_t i, std::size_t j,
                   double worst, double& best) {
  worst = std::max(worst, meancurve::distance(a[i], b[j]));
  if (worst >= best) return;
  if (i + 1 == a.size() && j + 1 == b.size()) {
    best = worst;
    return;
  }
  if (i + 1 < a.size()) couple(a, b, i + 1, j, worst, best);
  if (j + 1 < b.size()) couple(a, b, i, j + 1, worst, best);
  if (i + 1 < a.size() && j + 1 < b.size()) couple(a, b, i + 1, j + 1, worst, best);
}

inline double brute_force_frechet(const std::vector<Point2>& a, const std::vector<Point2>& b) {
  double best = std::numeric_limits<double>::infinity();
  couple(a, b, 0, 0, 0.0, best);
  return best;
}

inline double max_deviation(std::span<const Point2> a, std::span<const Point2> b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  double d = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) d = std::max(d, meancurve::distance(a[k], b[k]));
  return d;
}

}  // namespace mctest
