#include "meancurve/geometry.hpp"

#include <algorithm>
#include <string>

namespace meancurve {

double wrap_two_pi(double angle) {
  double r = std::fmod(angle, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  // fmod of a tiny negative number can round up to exactly 2π.
  if (r >= kTwoPi) r = 0.0;
  return r;
}

double wrap_pi(double angle) {
  double r = wrap_two_pi(angle);
  return r > kPi ? r - kTwoPi : r;
}

double angular_distance(double a, double b) {
  const double d = wrap_two_pi(a - b);
  return std::min(d, kTwoPi - d);
}

Inducer::Inducer(Point2 position, double theta) : position_(position), theta_(wrap_two_pi(theta)) {
  if (!position.finite() || !std::isfinite(theta)) {
    throw Error(ErrorCode::kNonFinite, "inducer with non-finite pose");
  }
}

Polyline::Polyline(std::vector<Point2> points) {
  points_.reserve(points.size());
  for (const Point2& p : points) {
    if (!p.finite()) throw Error(ErrorCode::kNonFinite, "polyline point is not finite");
    if (!points_.empty() && points_.back() == p) continue;
    points_.push_back(p);
  }
  if (points_.size() < 2) {
    throw Error(ErrorCode::kEmptyInput,
                "polyline needs at least 2 distinct points, got " + std::to_string(points_.size()));
  }
  arclength_.resize(points_.size());
  arclength_[0] = 0.0;
  for (std::size_t k = 1; k < points_.size(); ++k) {
    arclength_[k] = arclength_[k - 1] + distance(points_[k - 1], points_[k]);
  }
}

Point2 Polyline::point_at(double s) const {
  if (s <= 0.0) return points_.front();
  if (s >= arclength_.back()) return points_.back();
  // First vertex with cumulative length > s; the segment ends there.
  const auto it = std::upper_bound(arclength_.begin(), arclength_.end(), s);
  const auto hi = static_cast<std::size_t>(it - arclength_.begin());
  const std::size_t lo = hi - 1;
  const double seg = arclength_[hi] - arclength_[lo];
  const double t = seg > 0.0 ? (s - arclength_[lo]) / seg : 0.0;
  return lerp(points_[lo], points_[hi], t);
}

Point2 Similarity2::apply(Point2 p) const {
  if (reflect) p.y = -p.y;
  const double c = std::cos(rotation);
  const double s = std::sin(rotation);
  return {translation.x + scale * (c * p.x - s * p.y), translation.y + scale * (s * p.x + c * p.y)};
}

double Similarity2::apply_angle(double theta) const {
  return wrap_two_pi((reflect ? -theta : theta) + rotation);
}

Inducer Similarity2::apply(const Inducer& in) const {
  return Inducer(apply(in.position()), apply_angle(in.theta()));
}

std::vector<Point2> Similarity2::apply(std::span<const Point2> pts) const {
  const double c = std::cos(rotation);
  const double s = std::sin(rotation);
  std::vector<Point2> out;
  out.reserve(pts.size());
  for (Point2 p : pts) {
    if (reflect) p.y = -p.y;
    out.push_back({translation.x + scale * (c * p.x - s * p.y), translation.y + scale * (s * p.x + c * p.y)});
  }
  return out;
}

Polyline Similarity2::apply(const Polyline& poly) const { return Polyline(apply(poly.points())); }

Similarity2 Similarity2::inverse() const {
  // x = F R(-a) (y - t) / s, and F R(-a) = R(a) F when reflecting.
  Similarity2 inv;
  inv.reflect = reflect;
  inv.rotation = reflect ? rotation : -rotation;
  inv.scale = 1.0 / scale;
  Similarity2 linear = inv;
  linear.translation = {};
  const Point2 t = linear.apply(translation);
  inv.translation = {-t.x, -t.y};
  return inv;
}

Similarity2 Similarity2::compose(const Similarity2& inner) const {
  Similarity2 out;
  out.reflect = reflect != inner.reflect;
  out.rotation = rotation + (reflect ? -inner.rotation : inner.rotation);
  out.scale = scale * inner.scale;
  out.translation = apply(inner.translation);
  return out;
}

std::vector<Point2> resample_arclength(const Polyline& poly, int n) {
  if (n < 2) throw Error(ErrorCode::kInvalidArgument, "resample_arclength needs n >= 2");
  const double total = poly.length();
  if (!(total > 0.0)) throw Error(ErrorCode::kZeroLength, "polyline has zero length");

  const auto pts = poly.points();
  const auto cum = poly.cumulative_arclength();
  std::vector<Point2> out;
  out.reserve(static_cast<std::size_t>(n));
  out.push_back(pts.front());
  std::size_t seg = 1;
  for (int k = 1; k < n - 1; ++k) {
    const double target = total * static_cast<double>(k) / static_cast<double>(n - 1);
    while (seg + 1 < pts.size() && cum[seg] < target) ++seg;
    const double len = cum[seg] - cum[seg - 1];
    const double t = len > 0.0 ? (target - cum[seg - 1]) / len : 0.0;
    out.push_back(lerp(pts[seg - 1], pts[seg], std::clamp(t, 0.0, 1.0)));
  }
  out.push_back(pts.back());
  return out;
}

void resample_arclength(std::span<const Point2> pts, std::span<Point2> out) {
  if (out.size() < 2) throw Error(ErrorCode::kInvalidArgument, "resample_arclength needs n >= 2");
  if (pts.empty()) throw Error(ErrorCode::kEmptyInput, "resample_arclength of no points");
  double total = 0.0;
  for (std::size_t k = 1; k < pts.size(); ++k) total += distance(pts[k - 1], pts[k]);
  if (!(total > 0.0)) throw Error(ErrorCode::kZeroLength, "polyline has zero length");

  const std::size_t n = out.size();
  out[0] = pts.front();
  std::size_t seg = 1;
  double seg_start = 0.0;
  double seg_len = distance(pts[0], pts[1]);
  for (std::size_t k = 1; k + 1 < n; ++k) {
    const double target = total * static_cast<double>(k) / static_cast<double>(n - 1);
    while (seg + 1 < pts.size() && seg_start + seg_len < target) {
      seg_start += seg_len;
      ++seg;
      seg_len = distance(pts[seg - 1], pts[seg]);
    }
    const double t = seg_len > 0.0 ? (target - seg_start) / seg_len : 0.0;
    out[k] = lerp(pts[seg - 1], pts[seg], std::clamp(t, 0.0, 1.0));
  }
  out[n - 1] = pts.back();
}

double discrete_frechet(std::span<const Point2> a, std::span<const Point2> b) {
  if (a.empty() || b.empty()) throw Error(ErrorCode::kEmptyInput, "discrete_frechet on empty sequence");
  // Rolling row of the coupling table: row[j] = c(i, j).
  std::vector<double> row(b.size());
  row[0] = distance(a[0], b[0]);
  for (std::size_t j = 1; j < b.size(); ++j) row[j] = std::max(row[j - 1], distance(a[0], b[j]));
  for (std::size_t i = 1; i < a.size(); ++i) {
    double diag = row[0];
    row[0] = std::max(row[0], distance(a[i], b[0]));
    for (std::size_t j = 1; j < b.size(); ++j) {
      const double up = row[j];
      const double best = std::min({diag, up, row[j - 1]});
      row[j] = std::max(best, distance(a[i], b[j]));
      diag = up;
    }
  }
  return row.back();
}

}  // namespace meancurve
