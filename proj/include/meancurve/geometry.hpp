#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "meancurve/error.hpp"

namespace meancurve {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Point2 operator*(double s, Point2 p) { return {s * p.x, s * p.y}; }
  friend constexpr Point2 operator*(Point2 p, double s) { return {s * p.x, s * p.y}; }
  friend constexpr bool operator==(Point2, Point2) = default;

  Point2& operator+=(Point2 o) {
    x += o.x;
    y += o.y;
    return *this;
  }

  bool finite() const { return std::isfinite(x) && std::isfinite(y); }
};

inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 p) { return std::hypot(p.x, p.y); }
inline double distance(Point2 a, Point2 b) { return norm(a - b); }
inline Point2 lerp(Point2 a, Point2 b, double t) { return {a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)}; }
inline Point2 unit_vector(double angle) { return {std::cos(angle), std::sin(angle)}; }

/// Wraps an angle into [0, 2π).
double wrap_two_pi(double angle);

/// Wraps an angle into (-π, π].
double wrap_pi(double angle);

/// Distance between two directed angles, valued in [0, π].
double angular_distance(double a, double b);

/// Oriented endpoint: a position plus the directed tangent pointing from the
/// endpoint into the gap.
class Inducer {
 public:
  Inducer() = default;
  Inducer(Point2 position, double theta);

  Point2 position() const { return position_; }
  double theta() const { return theta_; }

 private:
  Point2 position_{};
  double theta_ = 0.0;
};

/// Ordered point sequence with cached cumulative arc length. Consecutive
/// duplicate points are dropped on construction.
class Polyline {
 public:
  explicit Polyline(std::vector<Point2> points);

  std::span<const Point2> points() const { return points_; }
  std::span<const double> cumulative_arclength() const { return arclength_; }
  std::size_t size() const { return points_.size(); }
  double length() const { return arclength_.back(); }
  Point2 front() const { return points_.front(); }
  Point2 back() const { return points_.back(); }

  /// Point at arc length s (clamped to [0, length]).
  Point2 point_at(double s) const;

 private:
  std::vector<Point2> points_;
  std::vector<double> arclength_;
};

/// x -> translation + scale * R(rotation) * F(x), where F is the optional
/// reflection across the X axis.
struct Similarity2 {
  double rotation = 0.0;
  double scale = 1.0;
  Point2 translation{};
  bool reflect = false;

  static Similarity2 identity() { return {}; }

  Point2 apply(Point2 p) const;
  double apply_angle(double theta) const;
  Inducer apply(const Inducer& in) const;
  Polyline apply(const Polyline& poly) const;
  std::vector<Point2> apply(std::span<const Point2> pts) const;

  Similarity2 inverse() const;

  /// (*this ∘ inner)(x) = this->apply(inner.apply(x)).
  Similarity2 compose(const Similarity2& inner) const;
};

inline Point2 apply_similarity(const Similarity2& t, Point2 p) { return t.apply(p); }
inline Inducer apply_similarity(const Similarity2& t, const Inducer& in) { return t.apply(in); }
inline Polyline apply_similarity(const Similarity2& t, const Polyline& p) { return t.apply(p); }

/// n points at equal arc-length spacing along poly, endpoints included.
std::vector<Point2> resample_arclength(const Polyline& poly, int n);

/// Same spacing for a raw point run (repeated points allowed), written into
/// out; out.size() >= 2 sets n. Does not allocate.
void resample_arclength(std::span<const Point2> pts, std::span<Point2> out);

/// Discrete Fréchet distance via the coupling dynamic program.
double discrete_frechet(std::span<const Point2> a, std::span<const Point2> b);

}  // namespace meancurve
