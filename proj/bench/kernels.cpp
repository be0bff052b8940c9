// Serial reference vs OpenMP kernels.
#include <benchmark/benchmark.h>

#include <random>

#include "meancurve/bench.hpp"
#include "meancurve/reconstruct.hpp"

using namespace meancurve;

namespace {

const Corpus& walks() {
  static const Corpus c(synth_corpus(11, 800, SynthFamily::kSmoothedRandomWalks));
  return c;
}

const FragmentIndex& walks_index() {
  static const FragmentIndex index = build_index(walks(), CorpusConfig{});
  return index;
}

std::vector<RelativeConfiguration> queries(std::size_t count) {
  std::mt19937_64 rng(12);
  const FragmentIndex& index = walks_index();
  std::uniform_int_distribution<std::size_t> pick(0, index.size() - 1);
  std::vector<RelativeConfiguration> out;
  for (std::size_t k = 0; k < count; ++k) out.push_back(index.fragment(static_cast<std::uint32_t>(pick(rng))).config);
  return out;
}

void BM_CanonicalizeSerial(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(canonicalize_corpus_serial(walks(), CorpusConfig{}));
}

void BM_CanonicalizeParallel(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(canonicalize_corpus(walks(), CorpusConfig{}));
}

void BM_ScanBatch(benchmark::State& state) {
  const auto qs = queries(50);
  for (auto _ : state) {
    benchmark::DoNotOptimize(scan_batch(walks_index(), qs, QueryTolerances{}, QueryKind::kScaleInvariant));
  }
}

void BM_QueryBatch(benchmark::State& state) {
  const auto qs = queries(50);
  for (auto _ : state) {
    benchmark::DoNotOptimize(query_batch(walks_index(), qs, QueryTolerances{}, QueryKind::kScaleInvariant));
  }
}

struct EvalFixture {
  Corpus train;
  FragmentIndex index;
  BenchmarkSet set;
};

const EvalFixture& eval_fixture() {
  static const EvalFixture f = [] {
    const auto curves = synth_corpus(13, 800, SynthFamily::kSmoothedRandomWalks);
    const CorpusSplit split = split_corpus(curves, SplitSpec{});
    EvalFixture out{Corpus(split.train), {}, {}};
    out.index = build_index(out.train, CorpusConfig{});
    SampleSpec spec;
    spec.count = 40;
    spec.bins = 2;
    spec.scale_range = std::make_pair(5.0, 40.0);
    out.set = sample_benchmark(split.test, spec);
    return out;
  }();
  return f;
}

void BM_EvaluateSerial(benchmark::State& state) {
  const EvalFixture& f = eval_fixture();
  const Reconstructor r(f.index, f.train);
  const std::vector<Method> methods{mean_curve_method(r), euler_spiral_method(16)};
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_serial(f.set, methods));
}

void BM_EvaluateParallel(benchmark::State& state) {
  const EvalFixture& f = eval_fixture();
  const Reconstructor r(f.index, f.train);
  const std::vector<Method> methods{mean_curve_method(r), euler_spiral_method(16)};
  for (auto _ : state) benchmark::DoNotOptimize(evaluate(f.set, methods));
}

const std::vector<double> kScales{10, 20, 40};

void BM_ScaleGridSerial(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        scale_invariance_grid_serial(walks_index(), walks(), 5, kScales, QueryTolerances{}, 10));
  }
}

void BM_ScaleGridParallel(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(scale_invariance_grid(walks_index(), walks(), 5, kScales, QueryTolerances{}, 10));
  }
}

}  // namespace

BENCHMARK(BM_CanonicalizeSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CanonicalizeParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ScanBatch)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_QueryBatch)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EvaluateSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EvaluateParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ScaleGridSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ScaleGridParallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
