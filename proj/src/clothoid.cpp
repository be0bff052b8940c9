#include <algorithm>
#include <array>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <complex>

#include "meancurve/baseline.hpp"

namespace meancurve {

namespace {

using Complex = std::complex<double>;
using Kronrod = boost::math::quadrature::gauss_kronrod<double, 31>;

constexpr unsigned kMaxDepth = 18;
constexpr double kQuadratureTol = 1e-13;
constexpr int kMaxNewton = 64;
constexpr double kRootTol = 1e-13;

// ∫_0^1 exp(i (a t^2 + b t + c)) dt; real part is X, imaginary part is Y.
Complex fresnel_moment(double a, double b, double c) {
  const auto f = [=](double t) { return std::polar(1.0, (a * t + b) * t + c); };
  return Kronrod::integrate(f, 0.0, 1.0, kMaxDepth, kQuadratureTol);
}

}  // namespace

double ClothoidSegment::total_turning() const {
  // |kappa| is affine in s; integrate piecewise around its zero.
  const double k_end = kappa_at(length);
  if (kappa0 * k_end >= 0.0) return 0.5 * (std::abs(kappa0) + std::abs(k_end)) * length;
  const double s0 = -kappa0 / kappa_rate;
  return 0.5 * std::abs(kappa0) * s0 + 0.5 * std::abs(k_end) * (length - s0);
}

ClothoidState eval_clothoid(const ClothoidSegment& seg, double s) {
  if (!(s >= 0.0) || s > seg.length * (1.0 + 1e-12)) {
    throw Error(ErrorCode::kOutOfRange, "arc length outside [0, length]");
  }
  s = std::min(s, seg.length);
  const double th0 = seg.start.theta();
  ClothoidState st;
  st.theta = seg.theta_at(s);
  st.kappa = seg.kappa_at(s);
  if (s == 0.0) {
    st.position = seg.start.position();
    return st;
  }
  // Substituting u = s t keeps the integrand on [0, 1].
  const Complex m = s * fresnel_moment(0.5 * seg.kappa_rate * s * s, seg.kappa0 * s, th0);
  st.position = seg.start.position() + Point2{m.real(), m.imag()};
  return st;
}

std::vector<Point2> sample_clothoid(const ClothoidSegment& seg, int n) {
  if (n < 2) throw Error(ErrorCode::kInvalidArgument, "sample_clothoid needs n >= 2");
  std::vector<Point2> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    out.push_back(eval_clothoid(seg, seg.length * static_cast<double>(k) / static_cast<double>(n - 1)).position);
  }
  return out;
}

namespace {

struct Root {
  double a = 0.0;
  double length_ratio = 0.0;  // X(a), chord over arc length
};

// Damped Newton on g(A) = Y(A) with a central-difference derivative.
std::optional<Root> newton(double guess, double phi0, double delta) {
  const auto g = [&](double a) { return fresnel_moment(a, delta - a, phi0); };
  double a = guess;
  Complex ga = g(a);
  for (int it = 0; it < kMaxNewton; ++it) {
    if (std::abs(ga.imag()) < kRootTol) {
      if (ga.real() > 0.0) return Root{a, ga.real()};
      return std::nullopt;
    }
    const double h = 1e-6 * std::max(1.0, std::abs(a));
    const double slope = (g(a + h).imag() - g(a - h).imag()) / (2.0 * h);
    if (slope == 0.0 || !std::isfinite(slope)) return std::nullopt;
    double step = -ga.imag() / slope;
    step = std::clamp(step, -kPi, kPi);
    bool improved = false;
    for (int halving = 0; halving < 20; ++halving) {
      const Complex trial = g(a + step);
      if (std::abs(trial.imag()) < std::abs(ga.imag())) {
        a += step;
        ga = trial;
        improved = true;
        break;
      }
      step *= 0.5;
    }
    if (!improved) return std::nullopt;
  }
  if (std::abs(ga.imag()) < kRootTol && ga.real() > 0.0) return Root{a, ga.real()};
  return std::nullopt;
}

}  // namespace

ClothoidSegment solve_g1_clothoid(const Inducer& i1, const Inducer& i2) {
  const Point2 chord = i2.position() - i1.position();
  const double gap = norm(chord);
  if (!(gap > 0.0)) throw Error(ErrorCode::kCoincidentInducers, "inducer positions coincide");

  // Chord frame: start at the origin, end at (gap, 0).
  const double chord_angle = std::atan2(chord.y, chord.x);
  const double phi0 = wrap_pi(i1.theta() - chord_angle);
  const double phi1 = wrap_pi(i2.theta() + kPi - chord_angle);
  const double delta = phi1 - phi0;

  const double base = 3.0 * (phi0 + phi1);
  constexpr std::array<double, 5> offsets{0.0, -kPi, kPi, -2.0 * kPi, 2.0 * kPi};

  std::optional<ClothoidSegment> best;
  double best_turning = 0.0;
  for (double off : offsets) {
    const auto root = newton(base + off, phi0, delta);
    if (!root) continue;
    ClothoidSegment seg;
    seg.start = i1;
    seg.length = gap / root->length_ratio;
    seg.kappa0 = (delta - root->a) / seg.length;
    seg.kappa_rate = 2.0 * root->a / (seg.length * seg.length);
    const double turning = seg.total_turning();
    if (!best || turning < best_turning - 1e-12) {
      best = seg;
      best_turning = turning;
    }
  }
  if (!best) throw Error(ErrorCode::kNoConvergence, "clothoid solve did not converge from any restart");
  return *best;
}

Polyline biarc_complete(const Inducer& i1, const Inducer& i2, int n) {
  const Point2 p0 = i1.position();
  const Point2 p1 = i2.position();
  const Point2 t0 = unit_vector(i1.theta());
  const Point2 t1 = unit_vector(i2.theta() + kPi);
  const Point2 v = p1 - p0;
  if (!(norm(v) > 0.0)) throw Error(ErrorCode::kCoincidentInducers, "inducer positions coincide");

  const Point2 t = t0 + t1;
  const double denom = 2.0 * (1.0 - dot(t0, t1));
  double d = 0.0;
  if (denom < 1e-12) {
    const double vt = dot(v, t1);
    d = std::abs(vt) > 1e-12 ? dot(v, v) / (4.0 * vt) : 0.0;
  } else {
    const double vt = dot(v, t);
    d = (-vt + std::sqrt(vt * vt + denom * dot(v, v))) / denom;
  }
  if (!(d > 0.0)) {
    std::vector<Point2> straight;
    for (int k = 0; k < n; ++k) straight.push_back(lerp(p0, p1, static_cast<double>(k) / (n - 1)));
    return Polyline(std::move(straight));
  }
  const Point2 join = 0.5 * (p0 + p1 + d * (t0 - t1));

  // Circular arc leaving `from` along heading `theta` through `to`.
  const auto arc = [](Point2 from, double theta, Point2 to) {
    const Point2 c = to - from;
    const double alpha = wrap_pi(std::atan2(c.y, c.x) - theta);
    ClothoidSegment seg;
    seg.start = Inducer(from, theta);
    if (std::abs(alpha) < 1e-12) {
      seg.length = norm(c);
    } else {
      seg.kappa0 = 2.0 * std::sin(alpha) / norm(c);
      seg.length = 2.0 * alpha / seg.kappa0;
    }
    return seg;
  };
  const ClothoidSegment first = arc(p0, i1.theta(), join);
  const ClothoidSegment second_rev = arc(p1, i2.theta(), join);

  const double total = first.length + second_rev.length;
  std::vector<Point2> pts;
  pts.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const double s = total * static_cast<double>(k) / static_cast<double>(n - 1);
    if (s <= first.length) {
      pts.push_back(eval_clothoid(first, s).position);
    } else {
      pts.push_back(eval_clothoid(second_rev, std::max(0.0, total - s)).position);
    }
  }
  pts.front() = p0;
  pts.back() = p1;
  return Polyline(std::move(pts));
}

EulerCompletion euler_spiral_complete(const Inducer& i1, const Inducer& i2, int n) {
  try {
    ClothoidSegment seg = solve_g1_clothoid(i1, i2);
    std::vector<Point2> pts = sample_clothoid(seg, n);
    pts.front() = i1.position();
    pts.back() = i2.position();
    return EulerCompletion{Polyline(std::move(pts)), seg, false};
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kNoConvergence) throw;
  }
  return EulerCompletion{biarc_complete(i1, i2, n), std::nullopt, true};
}

}  // namespace meancurve
