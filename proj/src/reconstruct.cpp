#include "meancurve/reconstruct.hpp"

#include "meancurve/baseline.hpp"
#include "meancurve/parallel.hpp"

namespace meancurve {

std::vector<Point2> aligned_fragment(const FragmentIndex& index, const Corpus& corpus, const Match& match, int n) {
  const CanonicalFragment& frag = index.fragment(match.fragment);
  const Similarity2 t = match.align.compose(frag.to_canonical);
  return resample_arclength(Polyline(t.apply(corpus.fragment_points(frag.ref))), n);
}

MeanCurve mean_curve(const FragmentIndex& index, const Corpus& corpus, std::span<const Match> matches, int n) {
  if (matches.empty()) throw Error(ErrorCode::kNoSamples, "mean curve of zero fragments");
  const auto count = static_cast<std::size_t>(n);
  std::vector<Point2> sum(count);
  std::vector<Cov2> second(count);
  std::vector<Point2> pts(count);
  for (const Match& m : matches) {
    // Similarities keep arc-length ratios, so resample before mapping.
    const CanonicalFragment& frag = index.fragment(m.fragment);
    resample_arclength(corpus.fragment_points(frag.ref), pts);
    const Similarity2 t = m.align.compose(frag.to_canonical);
    const double c = std::cos(t.rotation);
    const double s = std::sin(t.rotation);
    for (Point2& p : pts) {
      if (t.reflect) p.y = -p.y;
      p = {t.translation.x + t.scale * (c * p.x - s * p.y), t.translation.y + t.scale * (s * p.x + c * p.y)};
    }
    for (std::size_t k = 0; k < count; ++k) {
      sum[k] += pts[k];
      second[k].xx += pts[k].x * pts[k].x;
      second[k].xy += pts[k].x * pts[k].y;
      second[k].yy += pts[k].y * pts[k].y;
    }
  }
  MeanCurve out;
  out.n = n;
  out.m = matches.size();
  const double inv = 1.0 / static_cast<double>(out.m);
  out.points.resize(count);
  out.covariance.resize(count);
  for (std::size_t k = 0; k < count; ++k) {
    const Point2 mu = inv * sum[k];
    out.points[k] = mu;
    // Clamp the diagonal: E[x^2] - mu^2 can round slightly negative.
    Cov2& c = out.covariance[k];
    c.xx = std::max(0.0, inv * second[k].xx - mu.x * mu.x);
    c.yy = std::max(0.0, inv * second[k].yy - mu.y * mu.y);
    c.xy = inv * second[k].xy - mu.x * mu.y;
    const double bound = std::sqrt(c.xx * c.yy);
    c.xy = std::clamp(c.xy, -bound, bound);
  }
  return out;
}

Inducer curve_midpoint(std::span<const Point2> points) {
  if (points.size() < 3) throw Error(ErrorCode::kInvalidArgument, "curve midpoint needs at least 3 points");
  const Polyline poly{std::vector<Point2>(points.begin(), points.end())};
  const Point2 mid = poly.point_at(0.5 * poly.length());
  const std::size_t n = points.size();
  const std::size_t lo = n % 2 == 1 ? (n - 1) / 2 - 1 : n / 2 - 1;
  const std::size_t hi = n % 2 == 1 ? (n - 1) / 2 + 1 : n / 2;
  const Point2 d = points[hi] - points[lo];
  if (!(norm(d) > 0.0)) throw Error(ErrorCode::kDegenerateTangent, "mean curve is degenerate at its midpoint");
  return Inducer(mid, std::atan2(d.y, d.x));
}

RelativeConfiguration horizontal_configuration(double theta1, double theta2) {
  return canonicalize(Inducer({0.0, 0.0}, theta1), Inducer({1.0, 0.0}, theta2)).config;
}

// ---------------------------------------------------------------------------

Reconstructor::Reconstructor(const FragmentIndex& index, const Corpus& corpus, ReconstructOptions options)
    : index_(index), corpus_(corpus), options_(options) {
  options_.tolerances.validate();
  if (options_.n < 3) throw Error(ErrorCode::kInvalidArgument, "reconstruction needs n >= 3");
  if (options_.max_depth < 0) throw Error(ErrorCode::kInvalidArgument, "max_depth must be non-negative");
}

std::vector<Match> Reconstructor::matches(const RelativeConfiguration& config) const {
  return index_.query(config, options_.tolerances,
                      options_.scale_invariant ? QueryKind::kScaleInvariant : QueryKind::kSameScale);
}

Reconstructor::Node Reconstructor::solve(const Inducer& i1, const Inducer& i2, int depth, MeanCurve* top_mean) const {
  const Canonicalization canon = canonicalize(i1, i2);
  const std::vector<Match> found = matches(canon.config);

  Node node;
  node.nodes = 1;
  node.max_depth = depth;
  if (found.empty()) {
    if (!options_.fallback) {
      throw Error(ErrorCode::kNoPrior, "no fragments match the configuration and the fallback is disabled");
    }
    EulerCompletion euler = euler_spiral_complete(i1, i2, options_.n);
    const auto pts = euler.curve.points();
    node.points.assign(pts.begin(), pts.end());
    node.flags.fallback_used = true;
    node.fallback_nodes = 1;
    if (top_mean != nullptr) {
      top_mean->n = options_.n;
      top_mean->m = 0;
      top_mean->flags.fallback_used = true;
    }
    return node;
  }

  MeanCurve mean = mean_curve(index_, corpus_, found, options_.n);
  mean.flags.scale_invariant_used = options_.scale_invariant;
  node.flags.scale_invariant_used = options_.scale_invariant;

  std::vector<Point2> canonical = mean.points;
  if (mean.m < options_.midway_threshold && depth < options_.max_depth) {
    const Inducer c1({0.0, 0.0}, 0.0);
    const Inducer c2(canon.config.p_xy, canon.config.p_theta);
    Node ext = extend(c1, c2, mean, depth);
    if (!ext.points.empty()) {
      canonical = std::move(ext.points);
      node.flags.midway_extended = true;
      node.flags.fallback_used = ext.flags.fallback_used;
      node.flags.scale_invariant_used = node.flags.scale_invariant_used || ext.flags.scale_invariant_used;
      node.nodes += ext.nodes;
      node.fallback_nodes += ext.fallback_nodes;
      node.max_depth = std::max(node.max_depth, ext.max_depth);
      mean.flags.midway_extended = true;
    }
  }

  node.points = canon.to_canonical.inverse().apply(canonical);
  node.points.front() = i1.position();
  node.points.back() = i2.position();
  if (top_mean != nullptr) *top_mean = std::move(mean);
  return node;
}

// Returns an empty point list when a half has no prior and no fallback is
// allowed; the caller then keeps the provisional curve.
Reconstructor::Node Reconstructor::extend(const Inducer& i1, const Inducer& i2, const MeanCurve& provisional,
                                          int depth) const {
  const Inducer mid = curve_midpoint(provisional.points);
  const Inducer mid_back(mid.position(), mid.theta() + kPi);
  Node out;
  if (mid.position() == i1.position() || mid.position() == i2.position()) return out;
  Node first, second;
  try {
    first = solve(i1, mid_back, depth + 1, nullptr);
    second = solve(mid, i2, depth + 1, nullptr);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kNoPrior) return out;
    throw;
  }
  std::vector<Point2> joined = std::move(first.points);
  joined.insert(joined.end(), second.points.begin() + 1, second.points.end());
  out.points = resample_arclength(Polyline(std::move(joined)), options_.n);
  out.points.front() = i1.position();
  out.points.back() = i2.position();
  out.flags.fallback_used = first.flags.fallback_used || second.flags.fallback_used;
  out.flags.scale_invariant_used = first.flags.scale_invariant_used || second.flags.scale_invariant_used;
  out.flags.midway_extended = true;
  out.nodes = first.nodes + second.nodes;
  out.fallback_nodes = first.fallback_nodes + second.fallback_nodes;
  out.max_depth = std::max(first.max_depth, second.max_depth);
  return out;
}

Polyline Reconstructor::midway_extend(const Inducer& i1, const Inducer& i2, const MeanCurve& provisional,
                                      int depth) const {
  if (provisional.m < 1) throw Error(ErrorCode::kNoSamples, "midway extension needs a provisional mean curve");
  if (depth >= options_.max_depth) {
    throw Error(ErrorCode::kRecursionExhausted, "midway extension beyond max_depth " + std::to_string(options_.max_depth));
  }
  Node ext = extend(i1, i2, provisional, depth);
  if (ext.points.empty()) throw Error(ErrorCode::kNoPrior, "a midway half has no prior and the fallback is disabled");
  return Polyline(std::move(ext.points));
}

Reconstruction Reconstructor::reconstruct(const Inducer& i1, const Inducer& i2) const {
  MeanCurve top;
  Node node = solve(i1, i2, 0, &top);
  Reconstruction out{Polyline(node.points), std::move(top), {}, canonicalize(i1, i2), node.flags, node.nodes,
                     node.fallback_nodes, node.max_depth};
  out.canonical_points = out.frame.to_canonical.apply(out.curve.points());
  return out;
}

// ---------------------------------------------------------------------------

ScaleInvarianceReport scale_invariance_analysis(const FragmentIndex& index, const Corpus& corpus,
                                                const RelativeConfiguration& p_unit, std::span<const double> scales,
                                                const QueryTolerances& tol, std::size_t min_samples) {
  const double d = p_unit.distance();
  if (!(d > 0.0)) throw Error(ErrorCode::kCoincidentInducers, "base configuration has zero gap");
  ScaleInvarianceReport rep;
  rep.config = p_unit;
  rep.config.p_xy = (1.0 / d) * p_unit.p_xy;
  rep.scales.assign(scales.begin(), scales.end());
  rep.mu.assign(scales.size(), Point2{});
  rep.sigma.assign(scales.size(), 0.0);
  rep.counts.assign(scales.size(), 0);

  for (std::size_t k = 0; k < scales.size(); ++k) {
    const double s = scales[k];
    if (!(s > 0.0)) throw Error(ErrorCode::kInvalidArgument, "scales must be positive");
    RelativeConfiguration q = rep.config;
    q.p_xy = s * rep.config.p_xy;
    const std::vector<Match> found = index.query_same_scale(q, tol);
    std::vector<Point2> centers;
    centers.reserve(found.size());
    for (const Match& m : found) {
      const CanonicalFragment& frag = index.fragment(m.fragment);
      Similarity2 unit;
      unit.scale = 1.0 / s;
      const Similarity2 t = unit.compose(m.align.compose(frag.to_canonical));
      const Polyline poly(t.apply(corpus.fragment_points(frag.ref)));
      centers.push_back(poly.point_at(0.5 * poly.length()));
    }
    rep.counts[k] = centers.size();
    if (centers.empty()) continue;
    Point2 mu{};
    for (const Point2& c : centers) mu += c;
    mu = (1.0 / static_cast<double>(centers.size())) * mu;
    double ss = 0.0;
    for (const Point2& c : centers) ss += dot(c - mu, c - mu);
    rep.mu[k] = mu;
    rep.sigma[k] = std::sqrt(ss / static_cast<double>(centers.size()));
  }

  Point2 mu_bar{};
  double sigma_sum = 0.0;
  for (std::size_t k = 0; k < scales.size(); ++k) {
    if (rep.counts[k] < std::max<std::size_t>(min_samples, 1)) continue;
    ++rep.scales_used;
    mu_bar += rep.mu[k];
    sigma_sum += rep.sigma[k];
  }
  if (rep.scales_used < 2) {
    throw Error(ErrorCode::kInsufficientScales,
                "only " + std::to_string(rep.scales_used) + " scale(s) reach " + std::to_string(min_samples) + " samples");
  }
  const double used = static_cast<double>(rep.scales_used);
  mu_bar = (1.0 / used) * mu_bar;
  double spread = 0.0;
  for (std::size_t k = 0; k < scales.size(); ++k) {
    if (rep.counts[k] < std::max<std::size_t>(min_samples, 1)) continue;
    spread += dot(rep.mu[k] - mu_bar, rep.mu[k] - mu_bar);
  }
  rep.std_of_mu = std::sqrt(spread / used);
  rep.mean_of_sigma = sigma_sum / used;
  return rep;
}

namespace {

ScaleGridCell grid_cell(const FragmentIndex& index, const Corpus& corpus, int resolution, int k,
                        std::span<const double> scales, const QueryTolerances& tol, std::size_t min_samples) {
  const int i = k / resolution;
  const int j = k % resolution;
  const double step = resolution > 1 ? kPi / (resolution - 1) : 0.0;
  ScaleGridCell cell;
  cell.theta1 = i * step;
  cell.theta2 = j * step;
  const RelativeConfiguration base = horizontal_configuration(cell.theta1, cell.theta2);
  try {
    cell.report = scale_invariance_analysis(index, corpus, base, scales, tol, min_samples);
    cell.valid = true;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kInsufficientScales) throw;
    cell.report.config = base;
  }
  return cell;
}

}  // namespace

std::vector<ScaleGridCell> scale_invariance_grid(const FragmentIndex& index, const Corpus& corpus, int resolution,
                                                 std::span<const double> scales, const QueryTolerances& tol,
                                                 std::size_t min_samples) {
  if (resolution < 1) throw Error(ErrorCode::kInvalidArgument, "grid resolution must be positive");
  const int cells = resolution * resolution;
  std::vector<ScaleGridCell> out(static_cast<std::size_t>(cells));
  parallel_for(cells, [&](std::ptrdiff_t k) {
    out[static_cast<std::size_t>(k)] =
        grid_cell(index, corpus, resolution, static_cast<int>(k), scales, tol, min_samples);
  });
  return out;
}

std::vector<ScaleGridCell> scale_invariance_grid_serial(const FragmentIndex& index, const Corpus& corpus,
                                                        int resolution, std::span<const double> scales,
                                                        const QueryTolerances& tol, std::size_t min_samples) {
  if (resolution < 1) throw Error(ErrorCode::kInvalidArgument, "grid resolution must be positive");
  std::vector<ScaleGridCell> out;
  for (int k = 0; k < resolution * resolution; ++k) {
    out.push_back(grid_cell(index, corpus, resolution, k, scales, tol, min_samples));
  }
  return out;
}

}  // namespace meancurve
