#include "meancurve/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <ostream>
#include <random>
#include <set>
#include <json.hpp>

#include "meancurve/baseline.hpp"
#include "meancurve/parallel.hpp"

namespace meancurve {

std::size_t test_image_count(std::size_t images, double fraction) {
  const auto k = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(images) + 0.5));
  return std::clamp<std::size_t>(k, 1, images - 1);
}

CorpusSplit split_corpus(std::span<const CurveRecord> curves, const SplitSpec& spec) {
  if (!(spec.test_fraction > 0.0) || !(spec.test_fraction < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "test fraction must lie in (0, 1)");
  }
  std::set<std::string> unique;
  for (const CurveRecord& c : curves) unique.insert(c.image_id);
  if (unique.size() < 2) {
    throw Error(ErrorCode::kTooFewImages, "split needs at least 2 images, have " + std::to_string(unique.size()));
  }
  std::vector<std::string> images(unique.begin(), unique.end());
  std::mt19937_64 rng(spec.seed);
  for (std::size_t k = images.size() - 1; k > 0; --k) {
    std::swap(images[k], images[std::uniform_int_distribution<std::size_t>(0, k)(rng)]);
  }
  const std::size_t n_test = test_image_count(images.size(), spec.test_fraction);
  CorpusSplit out;
  out.test_images.assign(images.begin(), images.begin() + static_cast<std::ptrdiff_t>(n_test));
  std::sort(out.test_images.begin(), out.test_images.end());
  const std::set<std::string> test(out.test_images.begin(), out.test_images.end());
  for (const CurveRecord& c : curves) (test.count(c.image_id) ? out.test : out.train).push_back(c);
  return out;
}

// ---------------------------------------------------------------------------

bool is_difficult(const Inducer& i1, const Inducer& i2) {
  const Point2 chord = i2.position() - i1.position();
  if (!(norm(chord) > 0.0)) throw Error(ErrorCode::kCoincidentInducers, "inducer positions coincide");
  const double c = std::atan2(chord.y, chord.x);
  double a1 = wrap_pi(i1.theta() - c);
  double a2 = wrap_pi(i2.theta() - c);
  if (a1 < 0.0) {
    a1 = -a1;
    a2 = -a2;
  }
  a2 = wrap_two_pi(a2);
  return a1 > kPi / 2.0 && a2 < kPi / 2.0;
}

namespace {

const CurveRecord& curve_by_id(std::span<const CurveRecord> curves, const std::map<std::int64_t, std::size_t>& pos,
                               std::int64_t id) {
  return curves[pos.at(id)];
}

std::map<std::int64_t, std::size_t> positions(std::span<const CurveRecord> curves) {
  std::map<std::int64_t, std::size_t> pos;
  for (std::size_t k = 0; k < curves.size(); ++k) pos.emplace(curves[k].curve_id, k);
  return pos;
}

double fragment_scale(const CurveRecord& c, const FragmentRef& f) {
  const auto pts = c.poly.points();
  return distance(pts[f.start_index], pts[f.end_index]);
}

BenchmarkSet make_set(std::span<const CurveRecord> curves, std::vector<FragmentRef> chosen, int n,
                      int tangent_window) {
  const auto pos = positions(curves);
  BenchmarkSet set;
  set.n = n;
  set.records.reserve(chosen.size());
  for (const FragmentRef& f : chosen) {
    const CurveRecord& c = curve_by_id(curves, pos, f.curve_id);
    const auto [i1, i2] = endpoint_inducers(c, f, tangent_window);
    BenchmarkRecord r;
    r.id = set.records.size();
    r.ref = f;
    r.i1 = i1;
    r.i2 = i2;
    r.scale = fragment_scale(c, f);
    const auto pts = c.poly.points().subspan(f.start_index, f.end_index - f.start_index + 1);
    r.ground_truth = resample_arclength(Polyline(std::vector<Point2>(pts.begin(), pts.end())), n);
    set.records.push_back(std::move(r));
  }
  return set;
}

// Algorithm R over a stream, one reservoir per stratum.
class Reservoir {
 public:
  explicit Reservoir(std::size_t cap) : cap_(cap) {}

  void offer(const FragmentRef& f, std::mt19937_64& rng) {
    if (items_.size() < cap_) {
      items_.push_back(f);
    } else if (cap_ > 0) {
      const std::size_t slot = std::uniform_int_distribution<std::size_t>(0, seen_)(rng);
      if (slot < cap_) items_[slot] = f;
    }
    ++seen_;
  }

  std::size_t seen() const { return seen_; }
  std::vector<FragmentRef>& items() { return items_; }

 private:
  std::size_t cap_;
  std::size_t seen_ = 0;
  std::vector<FragmentRef> items_;
};

}  // namespace

BenchmarkSet sample_benchmark(std::span<const CurveRecord> test_curves, const SampleSpec& spec) {
  spec.fragments.validate();
  if (spec.bins == 0) throw Error(ErrorCode::kInvalidArgument, "scale bins must be positive");
  if (spec.n < 2) throw Error(ErrorCode::kInvalidArgument, "benchmark n must be at least 2");

  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  if (spec.scale_range) {
    lo = spec.scale_range->first;
    hi = spec.scale_range->second;
    if (!(lo >= 0.0) || !(hi > lo)) throw Error(ErrorCode::kInvalidArgument, "scale range must satisfy 0 <= min < max");
  } else {
    for_each_fragment(test_curves, spec.fragments, [&](const CurveRecord& c, FragmentRef f) {
      const double s = fragment_scale(c, f);
      if (s > 0.0) {
        lo = std::min(lo, s);
        hi = std::max(hi, s);
      }
    });
    if (!(hi > 0.0)) throw Error(ErrorCode::kBinUnderflow, "test curves have no usable fragments");
  }

  const std::size_t bins = spec.bins;
  const double width = (hi - lo) / static_cast<double>(bins);
  std::vector<Reservoir> strata;
  for (std::size_t b = 0; b < bins; ++b) strata.emplace_back(spec.count / bins + (b < spec.count % bins ? 1 : 0));

  std::mt19937_64 rng(spec.seed);
  std::size_t candidates = 0;
  for_each_fragment(test_curves, spec.fragments, [&](const CurveRecord& c, FragmentRef f) {
    const double s = fragment_scale(c, f);
    if (!(s > 0.0) || s < lo || s > hi) return;
    const auto b = width > 0.0 ? std::min(bins - 1, static_cast<std::size_t>((s - lo) / width)) : 0;
    strata[b].offer(f, rng);
    ++candidates;
  });

  std::vector<FragmentRef> chosen;
  std::vector<std::size_t> histogram(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    const std::size_t want = spec.count / bins + (b < spec.count % bins ? 1 : 0);
    if (strata[b].items().size() < want) {
      throw Error(ErrorCode::kBinUnderflow, "scale bin " + std::to_string(b) + " [" + std::to_string(lo + b * width) +
                                                ", " + std::to_string(lo + (b + 1) * width) + ") has " +
                                                std::to_string(strata[b].seen()) + " fragments, needs " +
                                                std::to_string(want));
    }
    std::sort(strata[b].items().begin(), strata[b].items().end());
    chosen.insert(chosen.end(), strata[b].items().begin(), strata[b].items().end());
    histogram[b] = want;
  }

  BenchmarkSet set = make_set(test_curves, std::move(chosen), spec.n, spec.fragments.tangent_window);
  set.bins = bins;
  set.min_scale = lo;
  set.max_scale = hi;
  set.histogram = std::move(histogram);
  set.candidates = candidates;
  return set;
}

namespace {

template <typename Fn>
void for_each_difficult(std::span<const CurveRecord> curves, const CorpusConfig& cfg, Fn&& fn) {
  for_each_fragment(curves, cfg, [&](const CurveRecord& c, FragmentRef f) {
    if (!(fragment_scale(c, f) > 0.0)) return;
    const auto [i1, i2] = endpoint_inducers(c, f, cfg.tangent_window);
    fn(f, is_difficult(i1, i2));
  });
}

}  // namespace

BenchmarkSet sample_difficult(std::span<const CurveRecord> test_curves, std::size_t count, std::uint64_t seed, int n,
                              const CorpusConfig& fragments) {
  fragments.validate();
  Reservoir pool(count);
  std::mt19937_64 rng(seed);
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  std::size_t candidates = 0;
  for_each_difficult(test_curves, fragments, [&](const FragmentRef& f, bool difficult) {
    if (!difficult) return;
    pool.offer(f, rng);
    ++candidates;
  });
  if (pool.items().size() < count) {
    throw Error(ErrorCode::kBinUnderflow, "difficult set has " + std::to_string(candidates) + " fragments, needs " +
                                              std::to_string(count));
  }
  std::sort(pool.items().begin(), pool.items().end());
  BenchmarkSet set = make_set(test_curves, std::move(pool.items()), n, fragments.tangent_window);
  for (const BenchmarkRecord& r : set.records) {
    lo = std::min(lo, r.scale);
    hi = std::max(hi, r.scale);
  }
  set.bins = 1;
  set.min_scale = set.records.empty() ? 0.0 : lo;
  set.max_scale = hi;
  set.histogram = {set.records.size()};
  set.candidates = candidates;
  return set;
}

double difficult_fraction(std::span<const CurveRecord> test_curves, const CorpusConfig& fragments) {
  std::size_t total = 0;
  std::size_t hard = 0;
  for_each_difficult(test_curves, fragments, [&](const FragmentRef&, bool difficult) {
    ++total;
    hard += difficult ? 1 : 0;
  });
  return total == 0 ? 0.0 : static_cast<double>(hard) / static_cast<double>(total);
}

double rre(const Polyline& gt, const Polyline& recon, const Inducer& i1, const Inducer& i2, int n) {
  const double gap = distance(i1.position(), i2.position());
  if (!(gap > 0.0)) throw Error(ErrorCode::kCoincidentInducers, "inducer positions coincide");
  const std::vector<Point2> a = resample_arclength(gt, n);
  const std::vector<Point2> b = resample_arclength(recon, n);
  return discrete_frechet(a, b) / gap;
}

std::array<double, kArcPoints> arc_curve(std::span<const double> rre_values) {
  std::vector<double> sorted(rre_values.begin(), rre_values.end());
  std::sort(sorted.begin(), sorted.end());
  std::array<double, kArcPoints> arc{};
  if (sorted.empty()) return arc;
  for (std::size_t k = 0; k < kArcPoints; ++k) {
    const double tau = static_cast<double>(k) / 100.0;
    const auto hits = std::upper_bound(sorted.begin(), sorted.end(), tau) - sorted.begin();
    arc[k] = static_cast<double>(hits) / static_cast<double>(sorted.size());
  }
  return arc;
}

double auc(const std::array<double, kArcPoints>& arc) {
  double sum = 0.0;
  for (double v : arc) sum += v;
  return sum / static_cast<double>(kArcPoints);
}

namespace {

void score(const BenchmarkRecord& r, int n, const Method& m, double& out_rre, std::string& out_flags) {
  try {
    MethodOutput o = m.run(r.i1, r.i2);
    out_rre = rre(Polyline(r.ground_truth), Polyline(std::move(o.curve)), r.i1, r.i2, n);
    out_flags = std::move(o.flags);
  } catch (const Error& e) {
    out_rre = std::numeric_limits<double>::infinity();
    out_flags = "failed:" + std::string(to_string(e.code()));
  }
}

EvalResult finish(std::span<const Method> methods, std::vector<std::vector<double>> rre_values,
                  std::vector<std::vector<std::string>> flags) {
  EvalResult out;
  for (std::size_t k = 0; k < methods.size(); ++k) {
    MethodResult res;
    res.name = methods[k].name;
    res.rre = std::move(rre_values[k]);
    res.flags = std::move(flags[k]);
    res.failures = static_cast<std::size_t>(std::count_if(res.rre.begin(), res.rre.end(),
                                                          [](double v) { return std::isinf(v); }));
    res.arc = arc_curve(res.rre);
    res.auc = auc(res.arc);
    out.methods.push_back(std::move(res));
  }
  return out;
}

}  // namespace

EvalResult evaluate(const BenchmarkSet& set, std::span<const Method> methods) {
  const std::size_t count = set.records.size();
  std::vector<std::vector<double>> values(methods.size(), std::vector<double>(count));
  std::vector<std::vector<std::string>> flags(methods.size(), std::vector<std::string>(count));
  parallel_for(static_cast<std::ptrdiff_t>(count), [&](std::ptrdiff_t k) {
    const auto r = static_cast<std::size_t>(k);
    for (std::size_t m = 0; m < methods.size(); ++m) score(set.records[r], set.n, methods[m], values[m][r], flags[m][r]);
  });
  return finish(methods, std::move(values), std::move(flags));
}

EvalResult evaluate_serial(const BenchmarkSet& set, std::span<const Method> methods) {
  const std::size_t count = set.records.size();
  std::vector<std::vector<double>> values(methods.size(), std::vector<double>(count));
  std::vector<std::vector<std::string>> flags(methods.size(), std::vector<std::string>(count));
  for (std::size_t r = 0; r < count; ++r) {
    for (std::size_t m = 0; m < methods.size(); ++m) score(set.records[r], set.n, methods[m], values[m][r], flags[m][r]);
  }
  return finish(methods, std::move(values), std::move(flags));
}

Method mean_curve_method(const Reconstructor& reconstructor) {
  return Method{"mean_curve", [&reconstructor](const Inducer& i1, const Inducer& i2) {
                  const Reconstruction rec = reconstructor.reconstruct(i1, i2);
                  MethodOutput out;
                  const auto pts = rec.curve.points();
                  out.curve.assign(pts.begin(), pts.end());
                  out.flags = "m=" + std::to_string(rec.mean.m);
                  if (rec.flags.scale_invariant_used) out.flags += " si";
                  if (rec.flags.midway_extended) out.flags += " mw";
                  if (rec.flags.fallback_used) out.flags += " fb";
                  return out;
                }};
}

Method euler_spiral_method(int n) {
  return Method{"euler", [n](const Inducer& i1, const Inducer& i2) {
                  EulerCompletion e = euler_spiral_complete(i1, i2, n);
                  MethodOutput out;
                  const auto pts = e.curve.points();
                  out.curve.assign(pts.begin(), pts.end());
                  if (e.biarc_fallback) out.flags = "biarc";
                  return out;
                }};
}

void check_split_hygiene(const FragmentIndex& index, const Corpus& train, std::span<const CurveRecord> test) {
  std::set<std::string> test_images;
  for (const CurveRecord& c : test) test_images.insert(c.image_id);
  for (const CanonicalFragment& f : index.fragments()) {
    const CurveRecord* c = train.find(f.ref.curve_id);
    if (c == nullptr || test_images.count(c->image_id)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "indexed fragment of curve " + std::to_string(f.ref.curve_id) + " is not from a training image");
    }
  }
}

BenchReport run_benchmark(std::span<const CurveRecord> curves, const BenchConfig& config) {
  BenchReport rep;
  rep.config = config;
  CorpusSplit split = split_corpus(curves, config.split);
  rep.train_curves = split.train.size();
  rep.test_curves = split.test.size();
  rep.test_images = split.test_images.size();

  const Corpus train(std::move(split.train));
  const FragmentIndex index = build_index(train, config.index_fragments, config.bucket);
  check_split_hygiene(index, train, split.test);
  rep.index_fragments = index.size();

  const Reconstructor reconstructor(index, train, config.reconstruct);
  const std::vector<Method> methods{mean_curve_method(reconstructor), euler_spiral_method(config.reconstruct.n)};

  SampleSpec sample = config.sample;
  sample.n = config.reconstruct.n;
  rep.full = sample_benchmark(split.test, sample);
  rep.full_eval = evaluate(rep.full, methods);
  rep.difficult_share = difficult_fraction(split.test, sample.fragments);
  if (config.run_difficult) {
    rep.difficult = sample_difficult(split.test, config.difficult_count, config.sample.seed + 1, sample.n,
                                     sample.fragments);
    rep.difficult_eval = evaluate(*rep.difficult, methods);
  }
  return rep;
}

namespace {

std::string number(double v) {
  if (std::isinf(v)) return "inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_records_csv(std::ostream& out, const BenchmarkSet& set, const EvalResult& eval) {
  out << "id,scale";
  for (const MethodResult& m : eval.methods) out << ",rre_" << m.name;
  out << ",flags\n";
  for (std::size_t r = 0; r < set.records.size(); ++r) {
    out << set.records[r].id << ',' << number(set.records[r].scale);
    for (const MethodResult& m : eval.methods) out << ',' << number(m.rre[r]);
    std::string flags;
    for (const MethodResult& m : eval.methods) {
      if (m.flags[r].empty()) continue;
      if (!flags.empty()) flags += ';';
      flags += m.name + ':' + m.flags[r];
    }
    out << ',' << flags << '\n';
  }
}

namespace {

nlohmann::json corpus_config_json(const CorpusConfig& c) {
  nlohmann::json j{{"min_fragment_points", c.min_fragment_points},
                   {"fragment_stride", c.fragment_stride},
                   {"tangent_window", c.tangent_window},
                   {"seed", c.seed}};
  j["max_fragments"] = c.max_fragments ? nlohmann::json(*c.max_fragments) : nlohmann::json(nullptr);
  return j;
}

nlohmann::json eval_json(const BenchmarkSet& set, const EvalResult& eval) {
  nlohmann::json j;
  j["records"] = set.records.size();
  j["candidates"] = set.candidates;
  j["scale_bins"] = set.bins;
  j["scale_range"] = {set.min_scale, set.max_scale};
  j["histogram"] = set.histogram;
  for (const MethodResult& m : eval.methods) {
    j["methods"][m.name] = {{"auc", m.auc}, {"failures", m.failures}, {"arc", m.arc}};
  }
  return j;
}

}  // namespace

std::string summary_json(const BenchReport& report) {
  const BenchConfig& c = report.config;
  const ReconstructOptions& r = c.reconstruct;
  nlohmann::json j;
  j["config"] = {
      {"split", {{"seed", c.split.seed}, {"test_fraction", c.split.test_fraction}}},
      {"sample",
       {{"count", c.sample.count}, {"bins", c.sample.bins}, {"seed", c.sample.seed},
        {"fragments", corpus_config_json(c.sample.fragments)}}},
      {"difficult_count", c.difficult_count},
      {"index_fragments", corpus_config_json(c.index_fragments)},
      {"bucket", {{"cell_xy", c.bucket.cell_xy}, {"cell_phi", c.bucket.cell_phi}, {"cell_theta", c.bucket.cell_theta}}},
      {"reconstruct",
       {{"n", r.n},
        {"t1_rel_dist", r.tolerances.t1_rel_dist},
        {"t1_angle", r.tolerances.t1_angle},
        {"t2_orient", r.tolerances.t2_orient},
        {"scale_invariant", r.scale_invariant},
        {"midway_threshold", r.midway_threshold},
        {"max_depth", r.max_depth},
        {"fallback", r.fallback}}},
      {"baseline", "reimplemented clothoid"}};
  j["corpus"] = {{"train_curves", report.train_curves},
                 {"test_curves", report.test_curves},
                 {"test_images", report.test_images},
                 {"index_fragments", report.index_fragments},
                 {"difficult_share", report.difficult_share}};
  j["full"] = eval_json(report.full, report.full_eval);
  if (report.difficult && report.difficult_eval) j["difficult"] = eval_json(*report.difficult, *report.difficult_eval);
  return j.dump(2) + "\n";
}

}  // namespace meancurve
