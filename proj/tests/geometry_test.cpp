#include <gtest/gtest.h>

#include "meancurve/geometry.hpp"
#include "support.hpp"

using namespace meancurve;
using mctest::Gen;

TEST(AngularDistance, Examples) {
  EXPECT_DOUBLE_EQ(angular_distance(0.0, 0.0), 0.0);
  EXPECT_NEAR(angular_distance(0.1, kTwoPi - 0.1), 0.2, 1e-12);
  EXPECT_NEAR(angular_distance(kPi / 2, 3 * kPi / 2), kPi, 1e-12);
}

TEST(AngularDistance, IsAMetricOnTheCircle) {
  Gen g(11);
  for (int k = 0; k < 2000; ++k) {
    const double a = g.uniform(-20, 20), b = g.uniform(-20, 20), c = g.uniform(-20, 20);
    const double ab = angular_distance(a, b);
    EXPECT_GE(ab, 0.0);
    EXPECT_LE(ab, kPi);
    EXPECT_NEAR(ab, angular_distance(b, a), 1e-12);
    EXPECT_NEAR(angular_distance(a, a), 0.0, 1e-12);
    EXPECT_LE(ab, angular_distance(a, c) + angular_distance(c, b) + 1e-12);
  }
}

TEST(Wrap, Ranges) {
  Gen g(12);
  for (int k = 0; k < 1000; ++k) {
    const double a = g.uniform(-100, 100);
    const double w = wrap_two_pi(a);
    EXPECT_GE(w, 0.0);
    EXPECT_LT(w, kTwoPi);
    const double p = wrap_pi(a);
    EXPECT_GT(p, -kPi);
    EXPECT_LE(p, kPi);
    EXPECT_NEAR(std::cos(w), std::cos(a), 1e-9);
    EXPECT_NEAR(std::sin(p), std::sin(a), 1e-9);
  }
  EXPECT_DOUBLE_EQ(wrap_pi(kPi), kPi);
  EXPECT_DOUBLE_EQ(wrap_pi(-kPi), kPi);
}

TEST(InducerTest, NormalisesAndRejectsNonFinite) {
  EXPECT_NEAR(Inducer({0, 0}, -0.5).theta(), kTwoPi - 0.5, 1e-12);
  EXPECT_NEAR(Inducer({0, 0}, 7.0).theta(), 7.0 - kTwoPi, 1e-12);
  try {
    Inducer({std::nan(""), 0}, 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNonFinite);
  }
  EXPECT_THROW(Inducer({0, 0}, INFINITY), Error);
}

TEST(PolylineTest, DropsDuplicatesAndTracksArcLength) {
  const Polyline p({{0, 0}, {0, 0}, {3, 4}, {3, 4}, {3, 5}});
  ASSERT_EQ(p.size(), 3u);
  EXPECT_DOUBLE_EQ(p.cumulative_arclength()[0], 0.0);
  EXPECT_DOUBLE_EQ(p.cumulative_arclength()[1], 5.0);
  EXPECT_DOUBLE_EQ(p.length(), 6.0);
  EXPECT_EQ(p.point_at(5.5), (Point2{3, 4.5}));
  try {
    Polyline({{1, 1}, {1, 1}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyInput);
  }
}

TEST(PolylineTest, CumulativeArcLengthMatchesSegmentSums) {
  Gen g(13);
  for (int k = 0; k < 200; ++k) {
    const Polyline p(g.points(g.integer(2, 30), 50));
    double sum = 0.0;
    for (std::size_t i = 1; i < p.size(); ++i) {
      sum += distance(p.points()[i - 1], p.points()[i]);
      EXPECT_NEAR(p.cumulative_arclength()[i], sum, 1e-9);
      EXPECT_GT(p.cumulative_arclength()[i], p.cumulative_arclength()[i - 1]);
    }
  }
}

TEST(Resample, Examples) {
  const auto line = resample_arclength(Polyline({{0, 0}, {10, 0}}), 5);
  ASSERT_EQ(line.size(), 5u);
  for (int k = 0; k < 5; ++k) EXPECT_DOUBLE_EQ(line[k].x, 2.5 * k);

  const Polyline any({{1, 2}, {4, -1}, {7, 7}});
  const auto two = resample_arclength(any, 2);
  EXPECT_EQ(two[0], any.front());
  EXPECT_EQ(two[1], any.back());

  const auto ell = resample_arclength(Polyline({{0, 0}, {1, 0}, {1, 1}}), 3);
  EXPECT_NEAR(ell[1].x, 1.0, 1e-15);
  EXPECT_NEAR(ell[1].y, 0.0, 1e-15);

  EXPECT_THROW(resample_arclength(any, 1), Error);
}

TEST(Resample, ArcLengthPositionsAreUniform) {
  Gen g(14);
  for (int t = 0; t < 200; ++t) {
    const Polyline p(g.points(g.integer(2, 20), 30));
    const int n = g.integer(2, 40);
    const auto out = resample_arclength(p, n);
    ASSERT_EQ(out.size(), static_cast<std::size_t>(n));
    EXPECT_EQ(out.front(), p.front());
    EXPECT_EQ(out.back(), p.back());
    // Every output lies on the polyline at arc length k L / (n - 1).
    for (int k = 0; k < n; ++k) {
      const Point2 expect = p.point_at(p.length() * k / (n - 1));
      EXPECT_NEAR(distance(out[k], expect), 0.0, 1e-9 * (1 + p.length()));
    }
  }
}

TEST(Resample, SpanOverloadAgreesWithPolylineOverload) {
  Gen g(15);
  for (int t = 0; t < 200; ++t) {
    std::vector<Point2> pts = g.points(g.integer(2, 20), 30);
    if (g.coin()) pts.insert(pts.begin() + 1, pts[0]);  // repeated point
    const int n = g.integer(2, 24);
    std::vector<Point2> out(static_cast<std::size_t>(n));
    resample_arclength(pts, out);
    EXPECT_LT(mctest::max_deviation(out, resample_arclength(Polyline(pts), n)), 1e-9);
  }
  std::vector<Point2> out(4);
  const std::vector<Point2> same{{1, 1}, {1, 1}};
  EXPECT_THROW(resample_arclength(same, out), Error);
}

TEST(Frechet, Examples) {
  const std::vector<Point2> a{{0, 0}, {1, 2}, {5, 3}};
  EXPECT_DOUBLE_EQ(discrete_frechet(a, a), 0.0);
  const std::vector<Point2> top{{0, 3}, {1, 3}, {2, 3}, {3, 3}};
  const std::vector<Point2> bottom{{0, 0}, {1, 0}, {2, 0}, {3, 0}};
  EXPECT_DOUBLE_EQ(discrete_frechet(top, bottom), 3.0);
  try {
    discrete_frechet({}, a);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyInput);
  }
}

TEST(Frechet, MatchesExhaustiveCouplings) {
  Gen g(16);
  for (int t = 0; t < 300; ++t) {
    const auto a = g.points(g.integer(1, 7), 10);
    const auto b = g.points(g.integer(1, 7), 10);
    EXPECT_NEAR(discrete_frechet(a, b), mctest::brute_force_frechet(a, b), 1e-12);
  }
}

TEST(Frechet, SymmetryReversalAndRigidInvariance) {
  Gen g(17);
  for (int t = 0; t < 300; ++t) {
    auto a = g.points(g.integer(1, 12), 10);
    auto b = g.points(g.integer(1, 12), 10);
    const double d = discrete_frechet(a, b);
    EXPECT_NEAR(d, discrete_frechet(b, a), 1e-12);
    EXPECT_GE(d, std::max(distance(a.front(), b.front()), distance(a.back(), b.back())) - 1e-12);
    Similarity2 rigid = g.similarity(1.0, 1.0);
    EXPECT_NEAR(d, discrete_frechet(rigid.apply(a), rigid.apply(b)), 1e-9);
    std::reverse(a.begin(), a.end());
    std::reverse(b.begin(), b.end());
    EXPECT_NEAR(d, discrete_frechet(a, b), 1e-12);
  }
}

TEST(SimilarityTest, Examples) {
  const Similarity2 id;
  EXPECT_EQ(id.apply(Point2{3, -4}), (Point2{3, -4}));
  Similarity2 mirror;
  mirror.reflect = true;
  EXPECT_EQ(mirror.apply(Point2{1, 2}), (Point2{1, -2}));
  EXPECT_NEAR(mirror.apply(Inducer({0, 0}, 0.3)).theta(), kTwoPi - 0.3, 1e-12);

  // reflect, then rotate, then scale, then translate
  Similarity2 t{kPi / 2, 2.0, {1, 1}, true};
  const Point2 q = t.apply(Point2{1, 2});
  EXPECT_NEAR(q.x, 1 + 2 * 2, 1e-12);
  EXPECT_NEAR(q.y, 1 + 2 * 1, 1e-12);
  EXPECT_NEAR(t.apply(Inducer({1, 2}, 0.3)).theta(), kPi / 2 - 0.3, 1e-12);
}

TEST(SimilarityTest, InverseAndCompose) {
  Gen g(18);
  for (int k = 0; k < 1000; ++k) {
    const Similarity2 a = g.similarity(0.2, 5.0);
    const Similarity2 b = g.similarity(0.2, 5.0);
    const Point2 p = g.point(50);
    EXPECT_LT(distance(a.inverse().apply(a.apply(p)), p), 1e-9);
    EXPECT_LT(distance(a.compose(a.inverse()).apply(p), p), 1e-9);
    EXPECT_LT(distance(a.compose(b).apply(p), a.apply(b.apply(p))), 1e-9);
    const Inducer in(p, g.angle());
    const Inducer back = a.inverse().apply(a.apply(in));
    EXPECT_LT(distance(back.position(), p), 1e-9);
    EXPECT_LT(angular_distance(back.theta(), in.theta()), 1e-9);
    const Inducer ab = a.compose(b).apply(in);
    const Inducer a_b = a.apply(b.apply(in));
    EXPECT_LT(angular_distance(ab.theta(), a_b.theta()), 1e-9);
  }
}

TEST(SimilarityTest, PreservesTangentDirections) {
  // A heading transformed by apply_angle stays tangent to the transformed path.
  Gen g(19);
  for (int k = 0; k < 500; ++k) {
    const Similarity2 t = g.similarity(0.5, 2.0);
    const Point2 p = g.point(10);
    const double th = g.angle();
    const Point2 q = p + 1e-3 * unit_vector(th);
    const Point2 d = t.apply(q) - t.apply(p);
    EXPECT_LT(angular_distance(std::atan2(d.y, d.x), t.apply_angle(th)), 1e-9);
  }
}
