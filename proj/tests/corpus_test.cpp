#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "meancurve/corpus.hpp"
#include "support.hpp"

using namespace meancurve;
using mctest::Gen;

namespace {

CurveRecord make_curve(std::int64_t id, std::vector<Point2> pts, std::string image = "img") {
  return CurveRecord{id, std::move(image), Polyline(std::move(pts))};
}

std::vector<Point2> straight(int n, Point2 from, Point2 step) {
  std::vector<Point2> out;
  for (int k = 0; k < n; ++k) out.push_back(from + static_cast<double>(k) * step);
  return out;
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kInvalidArgument;
}

}  // namespace

TEST(ReadCurves, TwoCurvesOfTenPoints) {
  std::ostringstream text;
  text << "CURVES v1\n# comment\n";
  for (int c = 0; c < 2; ++c) {
    text << "curve " << c << " im" << c << " 10\n";
    for (int k = 0; k < 10; ++k) text << k << " " << c * 3 + k * k << "\n";
  }
  std::istringstream in(text.str());
  const LoadResult r = read_curves(in);
  ASSERT_EQ(r.curves.size(), 2u);
  EXPECT_EQ(r.skipped, 0u);
  EXPECT_EQ(r.curves[1].image_id, "im1");
  EXPECT_EQ(r.curves[1].poly.size(), 10u);
  EXPECT_EQ(r.curves[1].poly.points()[2], (Point2{2, 7}));
}

TEST(ReadCurves, ShortCurveIsSkipped) {
  std::istringstream in(
      "CURVES v1\n"
      "curve 1 a 3\n0 0\n1 0\n2 0\n"
      "curve 2 a 5\n0 0\n1 0\n1 0\n2 0\n3 0\n"  // 4 distinct points
      "curve 3 a 5\n0 0\n1 0\n1 0\n1 0\n2 0\n");  // 3 distinct points
  const LoadResult r = read_curves(in);
  ASSERT_EQ(r.curves.size(), 1u);
  EXPECT_EQ(r.curves[0].curve_id, 2);
  EXPECT_EQ(r.skipped, 2u);
}

TEST(ReadCurves, ParseErrorsCarryLineNumbers) {
  const auto message = [](const std::string& text) {
    std::istringstream in(text);
    try {
      read_curves(in);
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kParseError);
      return std::string(e.what());
    }
    return std::string("no error");
  };
  EXPECT_NE(message("CURVES v2\n").find("line 1"), std::string::npos);
  EXPECT_NE(message("").find("header"), std::string::npos);
  EXPECT_NE(message("CURVES v1\ncurve 1 a 4\n0 0\n1 x\n").find("line 4"), std::string::npos);
  EXPECT_NE(message("CURVES v1\ncurve 1 a 4\n0 0\n1 1\n").find("truncated"), std::string::npos);
  EXPECT_NE(message("CURVES v1\ncurve 1 a\n").find("line 2"), std::string::npos);
  EXPECT_NE(message("CURVES v1\ncurve 1 a 4\n0 0\n1 0\n2 0\n3 0\ncurve 1 b 4\n0 0\n1 0\n2 0\n3 0\n").find("line 7"),
            std::string::npos);
  EXPECT_NE(message("CURVES v1\ncurve 1 a 4\n0 0\n1 0\n2 nan\n3 0\n").find("line 5"), std::string::npos);
}

TEST(LoadCurves, RoundTripAndEmptyCorpus) {
  const auto dir = std::filesystem::temp_directory_path() / "meancurve_corpus_test";
  std::filesystem::create_directories(dir);
  const std::vector<CurveRecord> curves = synth_corpus(5, 20, SynthFamily::kSmoothedRandomWalks);
  write_curves(dir / "c.txt", curves);
  const LoadResult back = load_curves(dir / "c.txt");
  ASSERT_EQ(back.curves.size(), curves.size());
  for (std::size_t c = 0; c < curves.size(); ++c) {
    EXPECT_EQ(back.curves[c].curve_id, curves[c].curve_id);
    EXPECT_EQ(back.curves[c].image_id, curves[c].image_id);
    const auto a = back.curves[c].poly.points();
    const auto b = curves[c].poly.points();
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t k = 0; k < a.size(); ++k) EXPECT_EQ(a[k], b[k]);
  }

  {
    std::ofstream out(dir / "empty.txt");
    out << "CURVES v1\ncurve 1 a 2\n0 0\n1 1\n";
  }
  EXPECT_EQ(code_of([&] { load_curves(dir / "empty.txt"); }), ErrorCode::kEmptyCorpus);
  EXPECT_EQ(code_of([&] { load_curves(dir / "missing.txt"); }), ErrorCode::kIo);
  EXPECT_EQ(code_of([] { parse_curve_format("cfgd-native"); }), ErrorCode::kInvalidArgument);
  std::filesystem::remove_all(dir);
}

TEST(CorpusStore, LookupAndValidation) {
  const Corpus corpus({make_curve(7, straight(5, {0, 0}, {1, 0})), make_curve(3, straight(6, {0, 1}, {0, 1}))});
  EXPECT_EQ(corpus.curve(3).poly.size(), 6u);
  EXPECT_EQ(corpus.find(99), nullptr);
  EXPECT_EQ(code_of([&] { corpus.curve(99); }), ErrorCode::kOutOfRange);
  const auto frag = corpus.fragment_points(FragmentRef{3, 1, 4});
  ASSERT_EQ(frag.size(), 4u);
  EXPECT_EQ(frag.front(), (Point2{0, 2}));
  EXPECT_EQ(code_of([&] { corpus.fragment_points(FragmentRef{3, 2, 6}); }), ErrorCode::kOutOfRange);
  EXPECT_EQ(code_of([] { Corpus({make_curve(1, straight(3, {0, 0}, {1, 0}))}); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([] {
              Corpus({make_curve(1, straight(4, {0, 0}, {1, 0})), make_curve(1, straight(4, {0, 0}, {0, 1}))});
            }),
            ErrorCode::kInvalidArgument);
}

TEST(CorpusStore, ChecksumDetectsChanges) {
  const auto curves = synth_corpus(1, 30, SynthFamily::kCircularArcs);
  auto moved = curves;
  moved[4] = make_curve(moved[4].curve_id, {moved[4].poly.points().begin(), moved[4].poly.points().end()}, "other");
  EXPECT_EQ(Corpus(curves).checksum(), Corpus(curves).checksum());
  EXPECT_NE(Corpus(curves).checksum(), Corpus(moved).checksum());
}

TEST(Fragments, SmallExamples) {
  const std::vector<CurveRecord> five{make_curve(1, straight(5, {0, 0}, {1, 0}))};
  const auto refs = enumerate_fragments(five, CorpusConfig{});
  const std::vector<FragmentRef> expect{{1, 0, 3}, {1, 0, 4}, {1, 1, 4}};
  EXPECT_EQ(refs, expect);
  const std::vector<CurveRecord> four{make_curve(1, straight(4, {0, 0}, {1, 0}))};
  EXPECT_EQ(enumerate_fragments(four, CorpusConfig{}), (std::vector<FragmentRef>{{1, 0, 3}}));
}

TEST(Fragments, CountFormula) {
  for (std::size_t p = 4; p < 60; ++p) {
    EXPECT_EQ(fragment_count(p, CorpusConfig{}), (p - 3) * (p - 2) / 2);
  }
  // Any stride and minimum: compare with an exhaustive pair listing.
  for (int min_points = 2; min_points <= 6; ++min_points) {
    for (int stride = 1; stride <= 4; ++stride) {
      CorpusConfig cfg;
      cfg.min_fragment_points = min_points;
      cfg.fragment_stride = stride;
      for (std::size_t p = 4; p < 30; ++p) {
        std::size_t pairs = 0;
        for (std::size_t i = 0; i < p; ++i) {
          for (std::size_t j = i + 1; j < p; ++j) {
            const bool on_lattice = i % stride == 0 && (j - i - (min_points - 1)) % stride == 0;
            if (j - i >= static_cast<std::size_t>(min_points - 1) && on_lattice) ++pairs;
          }
        }
        EXPECT_EQ(fragment_count(p, cfg), pairs) << "P=" << p << " min=" << min_points << " stride=" << stride;
      }
    }
  }
}

TEST(Fragments, EnumerationMatchesFormulaOnSynthCorpora) {
  for (SynthFamily family : {SynthFamily::kCircularArcs, SynthFamily::kLines, SynthFamily::kSmoothedRandomWalks}) {
    const auto curves = synth_corpus(3, 200, family);
    std::size_t expected = 0;
    for (const CurveRecord& c : curves) expected += fragment_count(c.poly.size(), CorpusConfig{});
    const auto refs = enumerate_fragments(curves, CorpusConfig{});
    EXPECT_EQ(refs.size(), expected);
    EXPECT_TRUE(std::is_sorted(refs.begin(), refs.end()));
    for (const FragmentRef& f : refs) EXPECT_GE(f.end_index - f.start_index, 3u);
  }
}

TEST(Fragments, ReservoirCapIsSeededSubset) {
  const auto curves = synth_corpus(4, 100, SynthFamily::kSmoothedRandomWalks);
  const auto all = enumerate_fragments(curves, CorpusConfig{});
  CorpusConfig cfg;
  cfg.max_fragments = 500;
  cfg.seed = 9;
  const auto a = enumerate_fragments(curves, cfg);
  const auto b = enumerate_fragments(curves, cfg);
  EXPECT_EQ(a, b);
  ASSERT_EQ(a.size(), 500u);
  EXPECT_TRUE(std::is_sorted(a.begin(), a.end()));
  EXPECT_EQ(std::adjacent_find(a.begin(), a.end()), a.end());
  for (const FragmentRef& f : a) EXPECT_TRUE(std::binary_search(all.begin(), all.end(), f));
  cfg.seed = 10;
  EXPECT_NE(enumerate_fragments(curves, cfg), a);
  cfg.max_fragments = all.size() + 10;
  EXPECT_EQ(enumerate_fragments(curves, cfg), all);
}

TEST(Fragments, ConfigValidation) {
  CorpusConfig cfg;
  cfg.fragment_stride = 0;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = {};
  cfg.max_fragments = 0;
  EXPECT_THROW(cfg.validate(), Error);
}

TEST(EndpointInducers, StraightFragmentFacesItself) {
  const CurveRecord c = make_curve(1, straight(8, {2, 5}, {1.5, 0}));
  const auto [a, b] = endpoint_inducers(c, FragmentRef{1, 1, 6}, 3);
  EXPECT_EQ(a.position(), (Point2{3.5, 5}));
  EXPECT_NEAR(angular_distance(a.theta(), 0.0), 0.0, 1e-12);
  EXPECT_NEAR(angular_distance(b.theta(), kPi), 0.0, 1e-12);

  std::vector<Point2> rev = straight(8, {2, 5}, {1.5, 0});
  std::reverse(rev.begin(), rev.end());
  const auto [ra, rb] = endpoint_inducers(make_curve(2, rev), FragmentRef{2, 1, 6}, 3);
  EXPECT_NEAR(angular_distance(ra.theta(), kPi), 0.0, 1e-12);
  EXPECT_NEAR(angular_distance(rb.theta(), 0.0), 0.0, 1e-12);
}

TEST(EndpointInducers, QuarterCircleHasWindowCentreTangents) {
  // The 3-point fit on a circle returns the tangent at the window's middle
  // sample, one angular step past the endpoint.
  for (int steps : {6, 10, 25, 90}) {
    const double delta = (kPi / 2) / steps;
    std::vector<Point2> pts;
    for (int k = 0; k <= steps; ++k) pts.push_back(unit_vector(k * delta));
    const CurveRecord c = make_curve(1, pts);
    const auto [a, b] = endpoint_inducers(c, FragmentRef{1, 0, static_cast<std::uint32_t>(steps)}, 3);
    EXPECT_NEAR(angular_distance(a.theta(), kPi / 2 + delta), 0.0, 1e-12);
    EXPECT_NEAR(angular_distance(b.theta(), -delta), 0.0, 1e-12);
  }
}

TEST(EndpointInducers, ReversalSwapsThePair) {
  Gen g(21);
  const auto curves = synth_corpus(8, 30, SynthFamily::kSmoothedRandomWalks);
  for (const CurveRecord& c : curves) {
    std::vector<Point2> rev(c.poly.points().begin(), c.poly.points().end());
    std::reverse(rev.begin(), rev.end());
    const CurveRecord r = make_curve(c.curve_id, rev);
    const auto last = static_cast<std::uint32_t>(c.poly.size() - 1);
    for (int t = 0; t < 10; ++t) {
      const auto i = static_cast<std::uint32_t>(g.integer(0, static_cast<int>(last) - 3));
      const auto j = static_cast<std::uint32_t>(g.integer(static_cast<int>(i) + 3, static_cast<int>(last)));
      const auto [a, b] = endpoint_inducers(c, FragmentRef{c.curve_id, i, j}, 3);
      const auto [ra, rb] = endpoint_inducers(r, FragmentRef{c.curve_id, last - j, last - i}, 3);
      EXPECT_EQ(a.position(), rb.position());
      EXPECT_EQ(b.position(), ra.position());
      EXPECT_NEAR(angular_distance(a.theta(), rb.theta()), 0.0, 1e-12);
      EXPECT_NEAR(angular_distance(b.theta(), ra.theta()), 0.0, 1e-12);
    }
  }
}

TEST(EndpointInducers, RejectsForeignFragments) {
  const CurveRecord c = make_curve(1, straight(6, {0, 0}, {1, 0}));
  EXPECT_THROW(endpoint_inducers(c, FragmentRef{2, 0, 3}, 3), Error);
  EXPECT_THROW(endpoint_inducers(c, FragmentRef{1, 3, 6}, 3), Error);
}

TEST(Synth, DeterministicAndWellFormed) {
  for (SynthFamily family : {SynthFamily::kCircularArcs, SynthFamily::kLines, SynthFamily::kSmoothedRandomWalks}) {
    const auto a = synth_corpus(42, 50, family);
    const auto b = synth_corpus(42, 50, family);
    const auto c = synth_corpus(43, 50, family);
    ASSERT_EQ(a.size(), 50u);
    EXPECT_EQ(Corpus(a).checksum(), Corpus(b).checksum());
    EXPECT_NE(Corpus(a).checksum(), Corpus(c).checksum());
    std::set<std::string> images;
    for (const CurveRecord& r : a) {
      EXPECT_GE(r.poly.size(), kMinCurvePoints);
      images.insert(r.image_id);
    }
    EXPECT_EQ(images.size(), 5u);
    EXPECT_EQ(parse_synth_family(to_string(family)), family);
  }
}

TEST(Synth, LinesAreStraightAndArcsAreCircular) {
  for (const CurveRecord& r : synth_corpus(2, 100, SynthFamily::kLines)) {
    const auto p = r.poly.points();
    const Point2 d = p.back() - p.front();
    for (Point2 q : p) EXPECT_LT(std::abs(cross(q - p.front(), d)) / norm(d), 1e-9 * (1 + norm(d)));
  }
  for (const CurveRecord& r : synth_corpus(2, 100, SynthFamily::kCircularArcs)) {
    const auto p = r.poly.points();
    // Circumcentre of the first, middle and last points; all points share its radius.
    const Point2 a = p.front(), b = p[p.size() / 2], c = p.back();
    const double d = 2 * cross(b - a, c - a);
    const Point2 ba = b - a, ca = c - a;
    const Point2 centre = a + Point2{(ca.y * dot(ba, ba) - ba.y * dot(ca, ca)) / d,
                                     (ba.x * dot(ca, ca) - ca.x * dot(ba, ba)) / d};
    const double radius = distance(centre, a);
    for (Point2 q : p) EXPECT_NEAR(distance(centre, q), radius, 1e-7 * radius);
  }
}
