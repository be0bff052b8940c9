#include <gtest/gtest.h>

#include "meancurve/baseline.hpp"
#include "support.hpp"

using namespace meancurve;
using mctest::Gen;

namespace {

// end pose error of a solved segment against the target inducer
double end_residual(const ClothoidSegment& seg, const Inducer& i2) {
  const ClothoidState end = eval_clothoid(seg, seg.length);
  const double scale = std::max(1.0, seg.length);
  return std::max(distance(end.position, i2.position()) / scale,
                  angular_distance(end.theta, i2.theta() + kPi));
}

}  // namespace

TEST(Clothoid, StraightLine) {
  const ClothoidSegment seg = solve_g1_clothoid(Inducer({0, 0}, 0.0), Inducer({10, 0}, kPi));
  EXPECT_NEAR(seg.length, 10.0, 1e-9);
  EXPECT_NEAR(seg.kappa0, 0.0, 1e-9);
  EXPECT_NEAR(seg.kappa_rate, 0.0, 1e-9);
  for (const Point2& p : sample_clothoid(seg, 11)) EXPECT_NEAR(p.y, 0.0, 1e-9);
}

TEST(Clothoid, SymmetricConfigurationIsACircularArc) {
  for (double alpha : {0.2, 0.7, 1.2, 2.0}) {
    const double d = 8.0;
    const ClothoidSegment seg = solve_g1_clothoid(Inducer({0, 0}, alpha), Inducer({d, 0}, kPi - alpha));
    const double radius = d / (2.0 * std::sin(alpha));
    EXPECT_NEAR(seg.kappa0, -1.0 / radius, 1e-8) << alpha;
    EXPECT_NEAR(seg.kappa_rate, 0.0, 1e-8) << alpha;
    EXPECT_NEAR(seg.length, 2.0 * alpha * radius, 1e-8) << alpha;
    EXPECT_NEAR(seg.total_turning(), 2.0 * alpha, 1e-8) << alpha;
    const Point2 centre{d / 2, -radius * std::cos(alpha)};
    for (const Point2& p : sample_clothoid(seg, 21)) EXPECT_NEAR(distance(p, centre), radius, 1e-8);
  }
}

TEST(Clothoid, EvaluationExamples) {
  ClothoidSegment circle{Inducer({1, 2}, 0.5), kTwoPi * 3.0, 1.0 / 3.0, 0.0};
  const ClothoidState start = eval_clothoid(circle, 0.0);
  EXPECT_EQ(start.position, (Point2{1, 2}));
  EXPECT_DOUBLE_EQ(start.theta, 0.5);
  const ClothoidState full = eval_clothoid(circle, circle.length);
  EXPECT_LT(distance(full.position, Point2{1, 2}), 1e-9);
  const ClothoidState half = eval_clothoid(circle, circle.length / 2);
  EXPECT_NEAR(distance(half.position, Point2{1, 2}), 6.0, 1e-9);
  EXPECT_NEAR(half.theta, 0.5 + kPi, 1e-12);
  EXPECT_THROW(eval_clothoid(circle, -0.1), Error);
  try {
    eval_clothoid(circle, circle.length * 1.01);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kOutOfRange);
  }
  EXPECT_THROW(sample_clothoid(circle, 1), Error);
}

TEST(Clothoid, TurningIntegral) {
  ClothoidSegment seg{Inducer({0, 0}, 0), 4.0, -1.0, 0.5};
  // |kappa| = |s/2 - 1|: triangles of area 1 on each side of s = 2
  EXPECT_NEAR(seg.total_turning(), 2.0, 1e-12);
  seg.kappa_rate = 0.0;
  EXPECT_NEAR(seg.total_turning(), 4.0, 1e-12);
}

TEST(Clothoid, RandomPosesMeetBothEnds) {
  Gen g(41);
  int solved = 0;
  for (int t = 0; t < 300; ++t) {
    const Inducer i1 = g.inducer(50), i2 = g.inducer(50);
    if (distance(i1.position(), i2.position()) < 1e-3) continue;
    try {
      const ClothoidSegment seg = solve_g1_clothoid(i1, i2);
      EXPECT_LT(end_residual(seg, i2), 1e-6);
      EXPECT_LT(angular_distance(seg.start.theta(), i1.theta()), 1e-12);
      EXPECT_EQ(seg.start.position(), i1.position());
      ++solved;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kNoConvergence);
    }
  }
  EXPECT_GT(solved, 270);
}

TEST(Clothoid, ScaleCovariance) {
  Gen g(42);
  for (int t = 0; t < 50; ++t) {
    const Inducer i1({0, 0}, g.uniform(-1.5, 1.5));
    const Inducer i2({10, 0}, kPi + g.uniform(-1.5, 1.5));
    const double s = g.uniform(0.1, 20);
    const ClothoidSegment a = solve_g1_clothoid(i1, i2);
    const ClothoidSegment b = solve_g1_clothoid(Inducer({0, 0}, i1.theta()), Inducer(s * i2.position(), i2.theta()));
    EXPECT_NEAR(b.length, s * a.length, 1e-7 * s * a.length);
    EXPECT_NEAR(b.kappa0, a.kappa0 / s, 1e-7 * (1 + std::abs(a.kappa0 / s)));
    EXPECT_NEAR(b.kappa_rate, a.kappa_rate / (s * s), 1e-7 * (1 + std::abs(a.kappa_rate / (s * s))));
  }
}

TEST(Clothoid, RigidMotionEquivariance) {
  Gen g(43);
  for (int t = 0; t < 50; ++t) {
    const Inducer i1({0, 0}, g.uniform(-1.2, 1.2));
    const Inducer i2({g.uniform(3, 20), g.uniform(-5, 5)}, kPi + g.uniform(-1.2, 1.2));
    Similarity2 move = g.similarity(1.0, 1.0, false);
    const EulerCompletion a = euler_spiral_complete(i1, i2, 16);
    const EulerCompletion b = euler_spiral_complete(move.apply(i1), move.apply(i2), 16);
    ASSERT_EQ(a.curve.size(), b.curve.size());
    for (std::size_t k = 0; k < a.curve.size(); ++k) {
      EXPECT_LT(distance(move.apply(a.curve.points()[k]), b.curve.points()[k]), 1e-6);
    }
  }
}

TEST(Completion, EndpointsArePinned) {
  Gen g(44);
  for (int t = 0; t < 100; ++t) {
    const Inducer i1 = g.inducer(30), i2 = g.inducer(30);
    const EulerCompletion c = euler_spiral_complete(i1, i2, 16);
    EXPECT_EQ(c.curve.front(), i1.position());
    EXPECT_EQ(c.curve.back(), i2.position());
    EXPECT_EQ(c.biarc_fallback, !c.segment.has_value());
  }
}

TEST(Biarc, MeetsInducers) {
  Gen g(45);
  for (int t = 0; t < 100; ++t) {
    const Inducer i1 = g.inducer(30), i2 = g.inducer(30);
    if (distance(i1.position(), i2.position()) < 1.0) continue;
    const Polyline arc = biarc_complete(i1, i2, 2001);
    EXPECT_LT(distance(arc.front(), i1.position()), 1e-9);
    EXPECT_LT(distance(arc.back(), i2.position()), 1e-9);
    const auto pts = arc.points();
    const Point2 lead = pts[1] - pts[0];
    const Point2 tail = pts[pts.size() - 2] - pts.back();
    EXPECT_LT(angular_distance(std::atan2(lead.y, lead.x), i1.theta()), 0.05);
    EXPECT_LT(angular_distance(std::atan2(tail.y, tail.x), i2.theta()), 0.05);
  }
  const Polyline straight = biarc_complete(Inducer({0, 0}, 0), Inducer({5, 0}, kPi), 6);
  for (const Point2& p : straight.points()) EXPECT_NEAR(p.y, 0.0, 1e-12);
}
