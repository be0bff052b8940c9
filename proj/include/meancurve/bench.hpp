#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "meancurve/corpus.hpp"
#include "meancurve/index.hpp"
#include "meancurve/reconstruct.hpp"

namespace meancurve {

struct SplitSpec {
  std::uint64_t seed = 0;
  double test_fraction = 0.10;  // by image
};

struct CorpusSplit {
  std::vector<CurveRecord> train;
  std::vector<CurveRecord> test;
  std::vector<std::string> test_images;  // sorted
};

/// Seeded shuffle of the distinct image ids, then a prefix split. The test
/// share is round(fraction * images) with halves rounded up, at least one.
CorpusSplit split_corpus(std::span<const CurveRecord> curves, const SplitSpec& spec);
std::size_t test_image_count(std::size_t images, double fraction);

struct BenchmarkRecord {
  std::size_t id = 0;
  FragmentRef ref;
  Inducer i1;
  Inducer i2;
  double scale = 0.0;                // inducer distance
  std::vector<Point2> ground_truth;  // resampled to n points
};

struct BenchmarkSet {
  std::vector<BenchmarkRecord> records;
  int n = 16;
  std::size_t bins = 1;
  double min_scale = 0.0;
  double max_scale = 0.0;
  std::vector<std::size_t> histogram;  // sampled records per scale bin
  std::size_t candidates = 0;          // fragments eligible before sampling
};

struct SampleSpec {
  std::size_t count = 5000;
  std::size_t bins = 20;
  std::uint64_t seed = 0;
  int n = 16;
  CorpusConfig fragments;
  std::optional<std::pair<double, double>> scale_range;  // empirical when unset
};

/// Stratified reservoir sample: count / bins records per scale bin over
/// [min_scale, max_scale], the remainder going to the lowest bins.
/// Throws kBinUnderflow naming the first bin that cannot be filled.
BenchmarkSet sample_benchmark(std::span<const CurveRecord> test_curves, const SampleSpec& spec);

/// True when, in the chord frame reflected so that theta1 is in [0, π], the
/// first inducer has theta1 > π/2 and the second theta2 < π/2.
bool is_difficult(const Inducer& i1, const Inducer& i2);

/// Uniform sample of `count` fragments satisfying is_difficult. Throws
/// kBinUnderflow when fewer qualify.
BenchmarkSet sample_difficult(std::span<const CurveRecord> test_curves, std::size_t count, std::uint64_t seed,
                              int n = 16, const CorpusConfig& fragments = {});

/// Share of enumerated test fragments that satisfy is_difficult.
double difficult_fraction(std::span<const CurveRecord> test_curves, const CorpusConfig& fragments);

/// Discrete Fréchet between n-point resamplings over the inducer distance.
double rre(const Polyline& gt, const Polyline& recon, const Inducer& i1, const Inducer& i2, int n = 16);

inline constexpr std::size_t kArcPoints = 101;

struct MethodOutput {
  std::vector<Point2> curve;
  std::string flags;
};

struct Method {
  std::string name;
  std::function<MethodOutput(const Inducer&, const Inducer&)> run;
};

struct MethodResult {
  std::string name;
  std::vector<double> rre;         // +inf for failed records
  std::vector<std::string> flags;  // "failed:<code>" for failed records
  std::array<double, kArcPoints> arc{};
  double auc = 0.0;
  std::size_t failures = 0;
};

struct EvalResult {
  std::vector<MethodResult> methods;
};

/// ARC(tau) = share of values <= tau at tau = k / 100.
std::array<double, kArcPoints> arc_curve(std::span<const double> rre_values);
double auc(const std::array<double, kArcPoints>& arc);

/// OpenMP over records; failures score +inf and are tallied.
EvalResult evaluate(const BenchmarkSet& set, std::span<const Method> methods);
/// Single-threaded reference for evaluate.
EvalResult evaluate_serial(const BenchmarkSet& set, std::span<const Method> methods);

Method mean_curve_method(const Reconstructor& reconstructor);
Method euler_spiral_method(int n);

/// Throws kInvalidArgument if any indexed fragment comes from a test image.
void check_split_hygiene(const FragmentIndex& index, const Corpus& train, std::span<const CurveRecord> test);

struct BenchConfig {
  SplitSpec split;
  SampleSpec sample;
  std::size_t difficult_count = 1000;
  bool run_difficult = true;
  CorpusConfig index_fragments;  // fragments of the training index
  BucketParams bucket;
  ReconstructOptions reconstruct;
};

struct BenchReport {
  BenchConfig config;
  std::size_t train_curves = 0;
  std::size_t test_curves = 0;
  std::size_t test_images = 0;
  std::size_t index_fragments = 0;
  double difficult_share = 0.0;
  BenchmarkSet full;
  EvalResult full_eval;
  std::optional<BenchmarkSet> difficult;
  std::optional<EvalResult> difficult_eval;
};

/// split -> index(train) -> sample(test) -> evaluate mean curve and Euler spiral.
BenchReport run_benchmark(std::span<const CurveRecord> curves, const BenchConfig& config);

/// Record-level CSV: id, scale, one rre column per method, flags.
void write_records_csv(std::ostream& out, const BenchmarkSet& set, const EvalResult& eval);
/// JSON summary with ARC arrays, AUC, failure tallies and the full config.
std::string summary_json(const BenchReport& report);

}  // namespace meancurve
