#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "meancurve/corpus.hpp"
#include "meancurve/geometry.hpp"

namespace meancurve {

/// Pose of the second inducer in the first inducer's frame (first inducer at
/// the origin facing +X), reflected so that p_xy.y <= 0.
struct RelativeConfiguration {
  Point2 p_xy{};
  double p_theta = 0.0;
  bool reflected = false;

  double distance() const { return norm(p_xy); }
  /// Angle of p_xy from the X axis, in [-π, 0] for canonical configurations.
  double direction() const;
};

struct CanonicalFragment {
  FragmentRef ref;
  RelativeConfiguration config;
  Similarity2 to_canonical;
};

struct QueryTolerances {
  double t1_rel_dist = 0.05;
  double t1_angle = 0.05;
  double t2_orient = 0.10;

  void validate() const;
};

struct Canonicalization {
  RelativeConfiguration config;
  Similarity2 to_canonical;
};

/// Rigid motion taking i1 to the origin with zero heading, plus a reflection
/// across the X axis when the second inducer would land above it.
Canonicalization canonicalize(const Inducer& i1, const Inducer& i2);
CanonicalFragment canonicalize(const Inducer& i1, const Inducer& i2, const FragmentRef& ref);

/// Rotation + scale about the origin that maps q exactly onto p.
Similarity2 fine_alignment(Point2 q, Point2 p);

bool matches_same_scale(const RelativeConfiguration& p, const RelativeConfiguration& q, const QueryTolerances& tol);
bool matches_scale_invariant(const RelativeConfiguration& p, const RelativeConfiguration& q,
                             const QueryTolerances& tol);

struct Match {
  std::uint32_t fragment = 0;  // position in FragmentIndex::fragments()
  Similarity2 align;

  friend bool operator==(const Match& a, const Match& b) { return a.fragment == b.fragment; }
};

enum class QueryKind { kSameScale, kScaleInvariant };

struct BucketParams {
  double cell_xy = 0.0;  // pixels; <= 0 picks t1 * median fragment gap at build time
  double cell_phi = 0.05;
  double cell_theta = 0.10;
};

/// Cells keyed by three integers, stored sorted so that a run of the last key
/// for fixed leading keys is one binary search.
class SortedGrid {
 public:
  using Key = std::array<std::int32_t, 3>;

  void assign(std::vector<Key> keys);  // keys[k] is the cell of entry k
  void assign_sorted(std::vector<Key> keys, std::vector<std::uint32_t> order);

  std::span<const Key> sorted_keys() const { return keys_; }
  std::span<const std::uint32_t> order() const { return order_; }

  template <typename Fn>
  void visit_run(std::int32_t a, std::int32_t b, std::int32_t c_lo, std::int32_t c_hi, Fn&& fn) const;

  std::size_t cell_count() const;
  /// occupancy[k] = number of non-empty cells holding [2^k, 2^(k+1)) entries.
  std::vector<std::size_t> occupancy_histogram() const;

 private:
  std::vector<Key> keys_;
  std::vector<std::uint32_t> order_;
};

struct IndexMeta {
  std::uint64_t corpus_checksum = 0;
  std::uint64_t curve_count = 0;
  CorpusConfig corpus_config;
  std::string corpus_path;
};

class FragmentIndex {
 public:
  FragmentIndex() = default;
  FragmentIndex(std::vector<CanonicalFragment> fragments, BucketParams params, IndexMeta meta = {});

  std::span<const CanonicalFragment> fragments() const { return fragments_; }
  const CanonicalFragment& fragment(std::uint32_t k) const { return fragments_[k]; }
  std::size_t size() const { return fragments_.size(); }
  const BucketParams& bucket_params() const { return params_; }
  const IndexMeta& meta() const { return meta_; }
  const SortedGrid& same_scale_grid() const { return same_scale_; }
  const SortedGrid& scale_free_grid() const { return scale_free_; }
  int theta_cells() const { return theta_cells_; }

  std::vector<Match> query(const RelativeConfiguration& p, const QueryTolerances& tol, QueryKind kind) const;
  std::vector<Match> query_same_scale(const RelativeConfiguration& p, const QueryTolerances& tol) const {
    return query(p, tol, QueryKind::kSameScale);
  }
  std::vector<Match> query_scale_invariant(const RelativeConfiguration& p, const QueryTolerances& tol) const {
    return query(p, tol, QueryKind::kScaleInvariant);
  }

  /// Brute-force reference: tests every fragment.
  std::vector<Match> scan(const RelativeConfiguration& p, const QueryTolerances& tol, QueryKind kind) const;

  std::int32_t theta_cell(double theta) const;
  std::int32_t phi_cell(double phi) const;
  std::int32_t xy_cell(double v) const;

  /// Rebuilds an index from persisted tables without re-sorting.
  static FragmentIndex from_tables(std::vector<CanonicalFragment> fragments, BucketParams params, IndexMeta meta,
                                   SortedGrid same_scale, SortedGrid scale_free);

 private:
  void build_grids();
  void cache_directions();
  std::vector<Match> finish(const RelativeConfiguration& p, std::vector<std::uint32_t> hits) const;

  std::vector<CanonicalFragment> fragments_;
  BucketParams params_;
  IndexMeta meta_;
  int theta_cells_ = 1;
  SortedGrid same_scale_;   // keys (theta, x, y)
  SortedGrid scale_free_;   // keys (theta, phi, 0)
  std::vector<double> directions_;  // config.direction() per fragment
};

/// Canonical form of every enumerated fragment, in enumeration order.
std::vector<CanonicalFragment> canonicalize_corpus(const Corpus& corpus, const CorpusConfig& cfg);
/// Single-threaded reference for canonicalize_corpus.
std::vector<CanonicalFragment> canonicalize_corpus_serial(const Corpus& corpus, const CorpusConfig& cfg);

FragmentIndex build_index(const Corpus& corpus, const CorpusConfig& cfg, BucketParams params = {},
                          std::string corpus_path = {});

/// Answers many queries; OpenMP over queries.
std::vector<std::vector<Match>> query_batch(const FragmentIndex& index, std::span<const RelativeConfiguration> queries,
                                            const QueryTolerances& tol, QueryKind kind);
/// Single-threaded reference for query_batch, using the linear scan.
std::vector<std::vector<Match>> scan_batch(const FragmentIndex& index, std::span<const RelativeConfiguration> queries,
                                           const QueryTolerances& tol, QueryKind kind);

/// "CSIX1" little-endian snapshot of fragment refs and both bucket tables.
void write_snapshot(const std::filesystem::path& path, const FragmentIndex& index);
FragmentIndex read_snapshot(const std::filesystem::path& path);
/// Throws kSnapshotMismatch when the index was not built from this corpus.
void verify_snapshot(const FragmentIndex& index, const Corpus& corpus);

template <typename Fn>
void SortedGrid::visit_run(std::int32_t a, std::int32_t b, std::int32_t c_lo, std::int32_t c_hi, Fn&& fn) const {
  const Key lo{a, b, c_lo};
  auto it = std::lower_bound(keys_.begin(), keys_.end(), lo);
  for (; it != keys_.end(); ++it) {
    const Key& k = *it;
    if (k[0] != a || k[1] != b || k[2] > c_hi) break;
    fn(order_[static_cast<std::size_t>(it - keys_.begin())]);
  }
}

}  // namespace meancurve
