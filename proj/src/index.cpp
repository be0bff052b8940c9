#include "meancurve/index.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include "meancurve/parallel.hpp"

namespace meancurve {

double RelativeConfiguration::direction() const {
  double phi = std::atan2(p_xy.y, p_xy.x);
  if (phi > 0.0) phi -= kTwoPi;  // +π (p_y == +0) folds onto -π
  return phi;
}

void QueryTolerances::validate() const {
  if (!(t1_rel_dist >= 0.0) || !(t1_angle >= 0.0) || !(t2_orient >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "query tolerances must be non-negative");
  }
}

Canonicalization canonicalize(const Inducer& i1, const Inducer& i2) {
  if (i1.position() == i2.position()) {
    throw Error(ErrorCode::kCoincidentInducers, "inducer positions coincide");
  }
  Similarity2 rigid;
  rigid.rotation = -i1.theta();
  {
    Similarity2 rot = rigid;
    const Point2 moved = rot.apply(i1.position());
    rigid.translation = {-moved.x, -moved.y};
  }
  Canonicalization out;
  out.to_canonical = rigid;
  if (rigid.apply(i2.position()).y > 0.0) {
    Similarity2 mirror;
    mirror.reflect = true;
    out.to_canonical = mirror.compose(rigid);
    out.config.reflected = true;
  }
  out.config.p_xy = out.to_canonical.apply(i2.position());
  out.config.p_theta = out.to_canonical.apply_angle(i2.theta());
  return out;
}

CanonicalFragment canonicalize(const Inducer& i1, const Inducer& i2, const FragmentRef& ref) {
  Canonicalization c = canonicalize(i1, i2);
  return CanonicalFragment{ref, c.config, c.to_canonical};
}

Similarity2 fine_alignment(Point2 q, Point2 p) {
  Similarity2 s;
  s.rotation = std::atan2(p.y, p.x) - std::atan2(q.y, q.x);
  s.scale = norm(p) / norm(q);
  return s;
}

bool matches_same_scale(const RelativeConfiguration& p, const RelativeConfiguration& q, const QueryTolerances& tol) {
  return distance(p.p_xy, q.p_xy) <= tol.t1_rel_dist * p.distance() &&
         angular_distance(p.p_theta, q.p_theta) <= tol.t2_orient;
}

bool matches_scale_invariant(const RelativeConfiguration& p, const RelativeConfiguration& q,
                             const QueryTolerances& tol) {
  return angular_distance(p.direction(), q.direction()) <= tol.t1_angle &&
         angular_distance(p.p_theta, q.p_theta) <= tol.t2_orient;
}

// ---------------------------------------------------------------------------

void SortedGrid::assign(std::vector<Key> keys) {
  std::vector<std::uint32_t> order(keys.size());
  std::iota(order.begin(), order.end(), 0u);
  std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) { return keys[a] < keys[b]; });
  std::vector<Key> sorted(keys.size());
  for (std::size_t k = 0; k < order.size(); ++k) sorted[k] = keys[order[k]];
  keys_ = std::move(sorted);
  order_ = std::move(order);
}

void SortedGrid::assign_sorted(std::vector<Key> keys, std::vector<std::uint32_t> order) {
  if (keys.size() != order.size() || !std::is_sorted(keys.begin(), keys.end())) {
    throw Error(ErrorCode::kSnapshotMismatch, "bucket table is not sorted");
  }
  keys_ = std::move(keys);
  order_ = std::move(order);
}

std::size_t SortedGrid::cell_count() const {
  if (keys_.empty()) return 0;
  std::size_t cells = 1;
  for (std::size_t k = 1; k < keys_.size(); ++k) cells += keys_[k] != keys_[k - 1];
  return cells;
}

std::vector<std::size_t> SortedGrid::occupancy_histogram() const {
  std::vector<std::size_t> hist;
  std::size_t run = 0;
  const auto flush = [&] {
    if (run == 0) return;
    std::size_t bin = 0;
    while ((std::size_t{2} << bin) <= run) ++bin;
    if (hist.size() <= bin) hist.resize(bin + 1, 0);
    ++hist[bin];
  };
  for (std::size_t k = 0; k < keys_.size(); ++k) {
    if (k > 0 && keys_[k] != keys_[k - 1]) {
      flush();
      run = 0;
    }
    ++run;
  }
  flush();
  return hist;
}

// ---------------------------------------------------------------------------

namespace {

std::int32_t clamp_cell(double v) {
  constexpr double lim = 1.0e9;
  return static_cast<std::int32_t>(std::floor(std::clamp(v, -lim, lim)));
}

double median_gap(std::span<const CanonicalFragment> fragments) {
  if (fragments.empty()) return 1.0;
  std::vector<double> gaps;
  gaps.reserve(fragments.size());
  for (const CanonicalFragment& f : fragments) gaps.push_back(f.config.distance());
  auto mid = gaps.begin() + static_cast<std::ptrdiff_t>(gaps.size() / 2);
  std::nth_element(gaps.begin(), mid, gaps.end());
  return *mid;
}

}  // namespace

FragmentIndex::FragmentIndex(std::vector<CanonicalFragment> fragments, BucketParams params, IndexMeta meta)
    : fragments_(std::move(fragments)), params_(params), meta_(std::move(meta)) {
  if (fragments_.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw Error(ErrorCode::kInvalidArgument, "too many fragments for a 32-bit index");
  }
  if (!(params_.cell_phi > 0.0) || !(params_.cell_theta > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "bucket cell sizes must be positive");
  }
  if (!(params_.cell_xy > 0.0)) params_.cell_xy = QueryTolerances{}.t1_rel_dist * median_gap(fragments_);
  build_grids();
}

FragmentIndex FragmentIndex::from_tables(std::vector<CanonicalFragment> fragments, BucketParams params,
                                         IndexMeta meta, SortedGrid same_scale, SortedGrid scale_free) {
  FragmentIndex index;
  index.fragments_ = std::move(fragments);
  index.params_ = params;
  index.meta_ = std::move(meta);
  index.theta_cells_ = std::max(1, static_cast<int>(std::floor(kTwoPi / params.cell_theta)));
  if (same_scale.order().size() != index.fragments_.size() || scale_free.order().size() != index.fragments_.size()) {
    throw Error(ErrorCode::kSnapshotMismatch, "bucket tables do not cover every fragment");
  }
  index.same_scale_ = std::move(same_scale);
  index.scale_free_ = std::move(scale_free);
  index.cache_directions();
  return index;
}

std::int32_t FragmentIndex::theta_cell(double theta) const {
  const double size = kTwoPi / theta_cells_;
  return std::min(theta_cells_ - 1, clamp_cell(wrap_two_pi(theta) / size));
}

std::int32_t FragmentIndex::phi_cell(double phi) const { return clamp_cell((phi + kPi) / params_.cell_phi); }

std::int32_t FragmentIndex::xy_cell(double v) const { return clamp_cell(v / params_.cell_xy); }

void FragmentIndex::build_grids() {
  theta_cells_ = std::max(1, static_cast<int>(std::floor(kTwoPi / params_.cell_theta)));
  std::vector<SortedGrid::Key> same(fragments_.size());
  std::vector<SortedGrid::Key> scale_free_keys(fragments_.size());
  for (std::size_t k = 0; k < fragments_.size(); ++k) {
    const RelativeConfiguration& c = fragments_[k].config;
    const std::int32_t t = theta_cell(c.p_theta);
    same[k] = {t, xy_cell(c.p_xy.x), xy_cell(c.p_xy.y)};
    scale_free_keys[k] = {t, phi_cell(c.direction()), 0};
  }
  same_scale_.assign(std::move(same));
  scale_free_.assign(std::move(scale_free_keys));
  cache_directions();
}

void FragmentIndex::cache_directions() {
  directions_.resize(fragments_.size());
  for (std::size_t k = 0; k < fragments_.size(); ++k) directions_[k] = fragments_[k].config.direction();
}

std::vector<Match> FragmentIndex::finish(const RelativeConfiguration& p, std::vector<std::uint32_t> hits) const {
  std::sort(hits.begin(), hits.end());
  std::vector<Match> out;
  out.reserve(hits.size());
  for (std::uint32_t h : hits) out.push_back(Match{h, fine_alignment(fragments_[h].config.p_xy, p.p_xy)});
  return out;
}

std::vector<Match> FragmentIndex::query(const RelativeConfiguration& p, const QueryTolerances& tol,
                                        QueryKind kind) const {
  tol.validate();
  if (!(p.distance() > 0.0)) throw Error(ErrorCode::kCoincidentInducers, "query configuration has zero gap");
  if (p.p_xy.y > 0.0) throw Error(ErrorCode::kInvalidArgument, "query configuration is not canonical (p_y > 0)");
  std::vector<std::uint32_t> hits;
  if (fragments_.empty()) return {};

  // Theta cells within tolerance, padded by one cell against rounding at the
  // cell boundaries; the exact predicate filters afterwards.
  const double theta_size = kTwoPi / theta_cells_;
  const int theta_reach = static_cast<int>(std::ceil(tol.t2_orient / theta_size)) + 1;
  std::vector<std::int32_t> theta_set;
  if (2 * theta_reach + 1 >= theta_cells_) {
    for (int t = 0; t < theta_cells_; ++t) theta_set.push_back(t);
  } else {
    const std::int32_t center = theta_cell(p.p_theta);
    for (int d = -theta_reach; d <= theta_reach; ++d) {
      theta_set.push_back(static_cast<std::int32_t>(((center + d) % theta_cells_ + theta_cells_) % theta_cells_));
    }
  }

  if (kind == QueryKind::kSameScale) {
    const double r = tol.t1_rel_dist * p.distance();
    const std::int32_t x_lo = xy_cell(p.p_xy.x - r) - 1, x_hi = xy_cell(p.p_xy.x + r) + 1;
    const std::int32_t y_lo = xy_cell(p.p_xy.y - r) - 1, y_hi = xy_cell(p.p_xy.y + r) + 1;
    for (std::int32_t t : theta_set) {
      for (std::int32_t x = x_lo; x <= x_hi; ++x) {
        same_scale_.visit_run(t, x, y_lo, y_hi, [&](std::uint32_t k) {
          if (matches_same_scale(p, fragments_[k].config, tol)) hits.push_back(k);
        });
      }
    }
  } else {
    const double phi = p.direction();
    const std::int32_t lo = phi_cell(phi - tol.t1_angle) - 1, hi = phi_cell(phi + tol.t1_angle) + 1;
    for (std::int32_t t : theta_set) {
      for (std::int32_t f = lo; f <= hi; ++f) {
        scale_free_.visit_run(t, f, 0, 0, [&](std::uint32_t k) {
          // Same test as matches_scale_invariant with the direction cached.
          if (angular_distance(phi, directions_[k]) <= tol.t1_angle &&
              angular_distance(p.p_theta, fragments_[k].config.p_theta) <= tol.t2_orient) {
            hits.push_back(k);
          }
        });
      }
    }
  }
  return finish(p, std::move(hits));
}

std::vector<Match> FragmentIndex::scan(const RelativeConfiguration& p, const QueryTolerances& tol,
                                       QueryKind kind) const {
  tol.validate();
  if (!(p.distance() > 0.0)) throw Error(ErrorCode::kCoincidentInducers, "query configuration has zero gap");
  if (p.p_xy.y > 0.0) throw Error(ErrorCode::kInvalidArgument, "query configuration is not canonical (p_y > 0)");
  std::vector<std::uint32_t> hits;
  for (std::size_t k = 0; k < fragments_.size(); ++k) {
    const bool ok = kind == QueryKind::kSameScale ? matches_same_scale(p, fragments_[k].config, tol)
                                                   : matches_scale_invariant(p, fragments_[k].config, tol);
    if (ok) hits.push_back(static_cast<std::uint32_t>(k));
  }
  return finish(p, std::move(hits));
}

// ---------------------------------------------------------------------------

namespace {

// Fragments whose inducers coincide (closed curves) or whose tangent window
// is degenerate cannot be canonicalized; they are left out of the index.
bool try_canonical(const CurveRecord& curve, const FragmentRef& f, int window, CanonicalFragment& out) {
  try {
    const auto [i1, i2] = endpoint_inducers(curve, f, window);
    if (i1.position() == i2.position()) return false;
    out = canonicalize(i1, i2, f);
    return true;
  } catch (const Error&) {
    return false;
  }
}

void compact(std::vector<CanonicalFragment>& frags, const std::vector<unsigned char>& valid) {
  std::size_t w = 0;
  for (std::size_t r = 0; r < frags.size(); ++r) {
    if (valid[r]) frags[w++] = frags[r];
  }
  frags.resize(w);
}

}  // namespace

std::vector<CanonicalFragment> canonicalize_corpus_serial(const Corpus& corpus, const CorpusConfig& cfg) {
  cfg.validate();
  std::vector<CanonicalFragment> out;
  CanonicalFragment cf;
  if (cfg.max_fragments) {
    for (const FragmentRef& f : enumerate_fragments(corpus.curves(), cfg)) {
      if (try_canonical(corpus.curve(f.curve_id), f, cfg.tangent_window, cf)) out.push_back(cf);
    }
    return out;
  }
  for_each_fragment(corpus.curves(), cfg, [&](const CurveRecord& c, FragmentRef f) {
    if (try_canonical(c, f, cfg.tangent_window, cf)) out.push_back(cf);
  });
  return out;
}

std::vector<CanonicalFragment> canonicalize_corpus(const Corpus& corpus, const CorpusConfig& cfg) {
  cfg.validate();
  if (cfg.max_fragments) {
    const std::vector<FragmentRef> refs = enumerate_fragments(corpus.curves(), cfg);
    std::vector<CanonicalFragment> out(refs.size());
    std::vector<unsigned char> valid(refs.size(), 0);
    const auto n = static_cast<std::ptrdiff_t>(refs.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t k = 0; k < n; ++k) {
      const auto idx = static_cast<std::size_t>(k);
      const FragmentRef& f = refs[idx];
      valid[idx] = try_canonical(*corpus.find(f.curve_id), f, cfg.tangent_window, out[idx]);
    }
    compact(out, valid);
    return out;
  }

  // Per-curve output offsets keep the serial enumeration order.
  const auto curves = corpus.curves();
  std::vector<std::size_t> offset(curves.size() + 1, 0);
  for (std::size_t c = 0; c < curves.size(); ++c) offset[c + 1] = offset[c] + fragment_count(curves[c].poly.size(), cfg);
  std::vector<CanonicalFragment> out(offset.back());
  std::vector<unsigned char> valid(offset.back(), 0);
  const auto n = static_cast<std::ptrdiff_t>(curves.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t c = 0; c < n; ++c) {
    const auto idx = static_cast<std::size_t>(c);
    std::size_t at = offset[idx];
    for_each_fragment(curves.subspan(idx, 1), cfg, [&](const CurveRecord& rec, FragmentRef f) {
      valid[at] = try_canonical(rec, f, cfg.tangent_window, out[at]);
      ++at;
    });
  }
  compact(out, valid);
  return out;
}

FragmentIndex build_index(const Corpus& corpus, const CorpusConfig& cfg, BucketParams params,
                          std::string corpus_path) {
  IndexMeta meta{corpus.checksum(), corpus.size(), cfg, std::move(corpus_path)};
  return FragmentIndex(canonicalize_corpus(corpus, cfg), params, std::move(meta));
}

std::vector<std::vector<Match>> query_batch(const FragmentIndex& index, std::span<const RelativeConfiguration> queries,
                                            const QueryTolerances& tol, QueryKind kind) {
  std::vector<std::vector<Match>> out(queries.size());
  parallel_for(static_cast<std::ptrdiff_t>(queries.size()), [&](std::ptrdiff_t q) {
    out[static_cast<std::size_t>(q)] = index.query(queries[static_cast<std::size_t>(q)], tol, kind);
  });
  return out;
}

std::vector<std::vector<Match>> scan_batch(const FragmentIndex& index, std::span<const RelativeConfiguration> queries,
                                           const QueryTolerances& tol, QueryKind kind) {
  std::vector<std::vector<Match>> out;
  out.reserve(queries.size());
  for (const RelativeConfiguration& q : queries) out.push_back(index.scan(q, tol, kind));
  return out;
}

}  // namespace meancurve
