#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "meancurve/geometry.hpp"

namespace meancurve {

/// Minimum distinct points a curve needs for tangent estimation at both ends.
inline constexpr std::size_t kMinCurvePoints = 4;

struct CurveRecord {
  std::int64_t curve_id = 0;
  std::string image_id;
  Polyline poly;
};

struct FragmentRef {
  std::int64_t curve_id = 0;
  std::uint32_t start_index = 0;
  std::uint32_t end_index = 0;

  friend bool operator==(const FragmentRef&, const FragmentRef&) = default;
  friend auto operator<=>(const FragmentRef&, const FragmentRef&) = default;
};

struct CorpusConfig {
  int min_fragment_points = 4;
  int fragment_stride = 1;
  int tangent_window = 3;
  std::optional<std::size_t> max_fragments;
  std::uint64_t seed = 0;  // reservoir sampling when max_fragments is set

  void validate() const;
};

/// Immutable curve store with lookup by curve id.
class Corpus {
 public:
  Corpus() = default;
  explicit Corpus(std::vector<CurveRecord> curves);

  std::span<const CurveRecord> curves() const { return curves_; }
  std::size_t size() const { return curves_.size(); }
  bool empty() const { return curves_.empty(); }

  const CurveRecord& curve(std::int64_t curve_id) const;
  const CurveRecord* find(std::int64_t curve_id) const;

  /// FNV-1a over ids, image ids and the raw point bits, in store order.
  std::uint64_t checksum() const;

  /// Points of a fragment, inclusive of both end indices.
  std::span<const Point2> fragment_points(const FragmentRef& f) const;

 private:
  std::vector<CurveRecord> curves_;
  std::unordered_map<std::int64_t, std::size_t> by_id_;
};

enum class CurveFormat { kCanonical };

CurveFormat parse_curve_format(const std::string& name);

struct LoadResult {
  std::vector<CurveRecord> curves;
  std::size_t skipped = 0;  // curves with fewer than kMinCurvePoints distinct points
};

LoadResult read_curves(std::istream& in);
LoadResult load_curves(const std::filesystem::path& path, CurveFormat format = CurveFormat::kCanonical);

void write_curves(std::ostream& out, std::span<const CurveRecord> curves);
void write_curves(const std::filesystem::path& path, std::span<const CurveRecord> curves);

/// Number of fragments enumerated from a single curve of `point_count` points.
std::size_t fragment_count(std::size_t point_count, const CorpusConfig& cfg);

/// Calls fn(const CurveRecord&, FragmentRef) for every fragment: all index
/// pairs (i, j) with i on the stride lattice and j = i + (min - 1) + k * stride.
template <typename Fn>
void for_each_fragment(std::span<const CurveRecord> curves, const CorpusConfig& cfg, Fn&& fn) {
  const auto min_span = static_cast<std::size_t>(cfg.min_fragment_points - 1);
  const auto stride = static_cast<std::size_t>(cfg.fragment_stride);
  for (const CurveRecord& c : curves) {
    const std::size_t n = c.poly.size();
    for (std::size_t i = 0; i + min_span < n; i += stride) {
      for (std::size_t j = i + min_span; j < n; j += stride) {
        fn(c, FragmentRef{c.curve_id, static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j)});
      }
    }
  }
}

/// All fragment references, or a seeded reservoir sample of
/// cfg.max_fragments of them, ordered by (curve_id, start, end).
std::vector<FragmentRef> enumerate_fragments(std::span<const CurveRecord> curves, const CorpusConfig& cfg);

/// Least-squares tangent direction of `window` points starting at `from` and
/// walking in direction `step` (+1 or -1), oriented along the walk.
double window_tangent(std::span<const Point2> pts, std::size_t from, int step, int window);

/// Inducers at both ends of a fragment, each oriented into the fragment.
std::pair<Inducer, Inducer> endpoint_inducers(const CurveRecord& curve, const FragmentRef& f, int tangent_window);

enum class SynthFamily { kCircularArcs, kLines, kSmoothedRandomWalks };

SynthFamily parse_synth_family(const std::string& name);
std::string to_string(SynthFamily family);

struct SynthParams {
  int min_points = 8;
  int max_points = 24;
  int curves_per_image = 10;
  // circular arcs
  double min_radius = 20.0;
  double max_radius = 2000.0;
  double min_arc_angle = kPi / 6.0;
  double max_arc_angle = 1.5 * kPi;
  // lines and random walks: step length is log-uniform in this range
  double min_step = 2.0;
  double max_step = 12.0;
  // random walks
  double turn_sigma = 0.12;   // per-step turning noise after smoothing (radians)
  double turn_bias = 0.12;    // per-curve constant turning, uniform in [-bias, bias]
  double smoothing_sigma = 2.0;  // Gaussian kernel width over step indices
};

std::vector<CurveRecord> synth_corpus(std::uint64_t seed, std::size_t n_curves, SynthFamily family,
                                      const SynthParams& params = {});

}  // namespace meancurve
