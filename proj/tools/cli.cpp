#include "cli.hpp"

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "meancurve/baseline.hpp"
#include "meancurve/bench.hpp"
#include "meancurve/corpus.hpp"
#include "meancurve/index.hpp"
#include "meancurve/reconstruct.hpp"
#include "meancurve/report.hpp"

namespace meancurve::cli {

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
      return kExitUsage;
    case ErrorCode::kNonFinite:
    case ErrorCode::kDegenerateTangent:
    case ErrorCode::kRecursionExhausted:
    case ErrorCode::kInsufficientScales:
    case ErrorCode::kNoConvergence:
    case ErrorCode::kOutOfRange:
      return kExitNumeric;
    default:
      return kExitData;
  }
}

namespace {

std::string default_snapshot() {
  const char* env = std::getenv("MEANCURVE_SNAPSHOT");
  return env != nullptr ? env : "meancurve.csix";
}

struct Outputs {
  std::vector<std::pair<std::filesystem::path, std::string>> files;

  void add(std::filesystem::path path, std::string content) { files.emplace_back(std::move(path), std::move(content)); }

  void flush() const {
    for (const auto& [path, content] : files) {
      if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
      std::ofstream out(path, std::ios::binary);
      out << content;
      if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
    }
  }
};

struct FragmentFlags {
  int min_points = 4;
  int stride = 1;
  int tangent_window = 3;
  std::size_t max_fragments = 0;  // 0 = all
  std::uint64_t seed = 0;

  void add(CLI::App* app) {
    app->add_option("--min-fragment-points", min_points, "Minimum points per fragment")->capture_default_str();
    app->add_option("--fragment-stride", stride, "Index stride between fragment endpoints")->capture_default_str();
    app->add_option("--tangent-window", tangent_window, "Points in the endpoint tangent fit")->capture_default_str();
    app->add_option("--max-fragments", max_fragments, "Reservoir-sample this many fragments (0 = all)");
    app->add_option("--fragment-seed", seed, "Seed of the fragment reservoir");
  }

  CorpusConfig config() const {
    CorpusConfig c;
    c.min_fragment_points = min_points;
    c.fragment_stride = stride;
    c.tangent_window = tangent_window;
    if (max_fragments > 0) c.max_fragments = max_fragments;
    c.seed = seed;
    return c;
  }
};

struct ReconstructFlags {
  ReconstructOptions options;
  bool no_scale_invariance = false;
  bool no_fallback = false;

  void add(CLI::App* app) {
    app->add_option("--n", options.n, "Points per reconstructed curve")->capture_default_str();
    app->add_option("--t1", options.tolerances.t1_rel_dist, "Relative distance tolerance")->capture_default_str();
    app->add_option("--t1-angle", options.tolerances.t1_angle, "Direction tolerance (rad)")->capture_default_str();
    app->add_option("--t2", options.tolerances.t2_orient, "Orientation tolerance (rad)")->capture_default_str();
    app->add_option("--midway-threshold", options.midway_threshold, "Extend when fewer matches")->capture_default_str();
    app->add_option("--max-depth", options.max_depth, "Midway recursion depth")->capture_default_str();
    app->add_flag("--no-scale-invariance", no_scale_invariance, "Use same-scale queries only");
    app->add_flag("--no-fallback", no_fallback, "Fail instead of using the Euler spiral for empty sub-gaps");
  }

  ReconstructOptions resolved() const {
    ReconstructOptions o = options;
    o.scale_invariant = !no_scale_invariance;
    o.fallback = !no_fallback;
    return o;
  }
};

struct CorpusSource {
  std::string path;
  std::string format = "canonical";
  std::string synth;
  std::size_t synth_curves = 2000;
  std::uint64_t synth_seed = 1;

  void add(CLI::App* app, bool allow_synth) {
    app->add_option("--corpus", path, "Curve file");
    app->add_option("--format", format, "Curve file format")->capture_default_str();
    if (allow_synth) {
      app->add_option("--synth", synth, "Generate a synthetic corpus instead: circular_arcs, lines, smoothed_random_walks");
      app->add_option("--synth-curves", synth_curves, "Synthetic curve count")->capture_default_str();
      app->add_option("--synth-seed", synth_seed, "Synthetic corpus seed")->capture_default_str();
    }
  }

  std::vector<CurveRecord> load() const {
    if (!synth.empty()) return synth_corpus(synth_seed, synth_curves, parse_synth_family(synth));
    if (path.empty()) throw Error(ErrorCode::kInvalidArgument, "a corpus is required (--corpus or --synth)");
    return load_curves(path, parse_curve_format(format)).curves;
  }

  std::string label() const {
    return synth.empty() ? path : "synth:" + synth + ":" + std::to_string(synth_curves) + ":" + std::to_string(synth_seed);
  }
};

Inducer parse_inducer(const std::vector<double>& v) {
  if (v.size() != 3) throw Error(ErrorCode::kInvalidArgument, "an inducer is x,y,theta");
  return Inducer({v[0], v[1]}, v[2]);
}

nlohmann::json fragments_json(const CorpusConfig& c) {
  return {{"min_fragment_points", c.min_fragment_points},
          {"fragment_stride", c.fragment_stride},
          {"tangent_window", c.tangent_window},
          {"max_fragments", c.max_fragments ? nlohmann::json(*c.max_fragments) : nlohmann::json(nullptr)},
          {"seed", c.seed}};
}

// ---------------------------------------------------------------------------

struct IngestArgs {
  CorpusSource source;
  FragmentFlags fragments;
  BucketParams bucket;
  std::string out;
};

void cmd_ingest(const IngestArgs& a) {
  std::size_t skipped = 0;
  std::vector<CurveRecord> curves;
  if (a.source.synth.empty()) {
    if (a.source.path.empty()) throw Error(ErrorCode::kInvalidArgument, "ingest needs --corpus or --synth");
    LoadResult loaded = load_curves(a.source.path, parse_curve_format(a.source.format));
    skipped = loaded.skipped;
    curves = std::move(loaded.curves);
  } else {
    curves = a.source.load();
  }
  const Corpus corpus(std::move(curves));
  const CorpusConfig cfg = a.fragments.config();
  const FragmentIndex index = build_index(corpus, cfg, a.bucket, a.source.synth.empty() ? a.source.path : "");

  std::size_t formula = 0;
  for (const CurveRecord& c : corpus.curves()) formula += fragment_count(c.poly.size(), cfg);
  const std::size_t enumerated = cfg.max_fragments ? std::min(*cfg.max_fragments, formula) : formula;

  nlohmann::json stats;
  stats["corpus"] = a.source.label();
  stats["curve_count"] = corpus.size();
  stats["skipped_curves"] = skipped;
  stats["fragment_count_formula"] = formula;
  stats["enumerated_fragments"] = enumerated;
  stats["indexed_fragments"] = index.size();
  stats["degenerate_fragments"] = enumerated - index.size();
  stats["fragments"] = fragments_json(cfg);
  stats["bucket"] = {{"cell_xy", index.bucket_params().cell_xy},
                     {"cell_phi", index.bucket_params().cell_phi},
                     {"cell_theta", index.bucket_params().cell_theta}};
  stats["same_scale_cells"] = index.same_scale_grid().cell_count();
  stats["scale_free_cells"] = index.scale_free_grid().cell_count();
  stats["same_scale_occupancy_log2"] = index.same_scale_grid().occupancy_histogram();
  stats["scale_free_occupancy_log2"] = index.scale_free_grid().occupancy_histogram();
  stats["corpus_checksum"] = corpus.checksum();

  write_snapshot(a.out, index);
  Outputs files;
  files.add(a.out + ".stats.json", stats.dump(2) + "\n");
  files.flush();
  std::cout << "indexed " << index.size() << " fragments from " << corpus.size() << " curves into " << a.out << "\n";
}

// ---------------------------------------------------------------------------

struct ReconstructArgs {
  std::string snapshot;
  std::string corpus;
  std::string format = "canonical";
  std::vector<double> i1;
  std::vector<double> i2;
  ReconstructFlags recon;
  std::string out;
  std::string svg;
  bool euler = false;
};

struct LoadedIndex {
  FragmentIndex index;
  Corpus corpus;
};

LoadedIndex load_index(const std::string& snapshot, const std::string& corpus_path, const std::string& format) {
  FragmentIndex index = read_snapshot(snapshot);
  const std::string path = corpus_path.empty() ? index.meta().corpus_path : corpus_path;
  if (path.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "snapshot does not name its corpus file; pass --corpus");
  }
  Corpus corpus(load_curves(path, parse_curve_format(format)).curves);
  verify_snapshot(index, corpus);
  return {std::move(index), std::move(corpus)};
}

void cmd_reconstruct(const ReconstructArgs& a) {
  const LoadedIndex loaded = load_index(a.snapshot, a.corpus, a.format);
  const Inducer i1 = parse_inducer(a.i1);
  const Inducer i2 = parse_inducer(a.i2);
  const ReconstructOptions options = a.recon.resolved();
  const Reconstructor reconstructor(loaded.index, loaded.corpus, options);
  const Reconstruction rec = reconstructor.reconstruct(i1, i2);
  std::optional<Polyline> euler;
  if (a.euler || !a.svg.empty()) euler = euler_spiral_complete(i1, i2, options.n).curve;

  Outputs files;
  const std::string json = reconstruction_json(rec, i1, i2, options, euler);
  if (!a.svg.empty()) files.add(a.svg, svg_reconstruction(rec, i1, i2, a.euler ? euler : std::nullopt));
  if (a.out.empty() || a.out == "-") {
    std::cout << json;
  } else {
    files.add(a.out, json);
  }
  files.flush();
}

// ---------------------------------------------------------------------------

struct BenchArgs {
  CorpusSource source;
  BenchConfig config;
  FragmentFlags index_fragments;
  FragmentFlags sample_fragments;
  ReconstructFlags recon;
  double min_scale = 0.0;
  double max_scale = 0.0;
  bool no_difficult = false;
  std::string out_dir = "bench-out";
};

void cmd_bench(BenchArgs a) {
  const std::vector<CurveRecord> curves = a.source.load();
  BenchConfig cfg = a.config;
  cfg.index_fragments = a.index_fragments.config();
  cfg.sample.fragments = a.sample_fragments.config();
  cfg.reconstruct = a.recon.resolved();
  cfg.run_difficult = !a.no_difficult;
  if (a.max_scale > a.min_scale) cfg.sample.scale_range = std::make_pair(a.min_scale, a.max_scale);
  const BenchReport rep = run_benchmark(curves, cfg);

  const std::filesystem::path dir = a.out_dir;
  const std::string stem = "bench-s" + std::to_string(cfg.sample.seed);
  Outputs files;
  std::ostringstream csv;
  write_records_csv(csv, rep.full, rep.full_eval);
  files.add(dir / (stem + "-records.csv"), csv.str());
  nlohmann::json summary = nlohmann::json::parse(summary_json(rep));
  summary["corpus"]["source"] = a.source.label();
  files.add(dir / (stem + "-summary.json"), summary.dump(2) + "\n");
  files.add(dir / (stem + "-arc.svg"), svg_arc_plot(rep.full_eval, "Full benchmark"));
  if (rep.difficult && rep.difficult_eval) {
    std::ostringstream dcsv;
    write_records_csv(dcsv, *rep.difficult, *rep.difficult_eval);
    files.add(dir / (stem + "-difficult-records.csv"), dcsv.str());
    files.add(dir / (stem + "-difficult-arc.svg"), svg_arc_plot(*rep.difficult_eval, "Difficult configurations"));
  }
  files.flush();

  const auto line = [](const char* label, const EvalResult& e) {
    std::cout << label;
    for (const MethodResult& m : e.methods) std::cout << "  " << m.name << " AUC " << m.auc << " (" << m.failures << " failed)";
    std::cout << "\n";
  };
  line("full:", rep.full_eval);
  if (rep.difficult_eval) line("difficult:", *rep.difficult_eval);
  std::cout << "reports in " << dir.string() << "\n";
}

// ---------------------------------------------------------------------------

struct ScaleArgs {
  std::string snapshot;
  std::string corpus;
  std::string format = "canonical";
  int resolution = 9;
  std::vector<double> scales{10.0, 20.0, 40.0, 80.0};
  std::size_t min_samples = 50;
  QueryTolerances tolerances;
  std::string out_dir = "scale-out";
};

void cmd_analyze_scale(const ScaleArgs& a) {
  const LoadedIndex loaded = load_index(a.snapshot, a.corpus, a.format);
  a.tolerances.validate();
  const std::vector<ScaleGridCell> cells =
      scale_invariance_grid(loaded.index, loaded.corpus, a.resolution, a.scales, a.tolerances, a.min_samples);
  std::vector<double> std_mu;
  std::vector<double> sigma;
  for (const ScaleGridCell& c : cells) {
    std_mu.push_back(c.valid ? c.report.std_of_mu : std::nan(""));
    sigma.push_back(c.valid ? c.report.mean_of_sigma : std::nan(""));
  }
  const std::filesystem::path dir = a.out_dir;
  Outputs files;
  files.add(dir / "scale-grid.csv", scale_grid_csv(cells));
  files.add(dir / "std-of-mu.svg", svg_heatmap(std_mu, a.resolution, a.resolution, "STD of mu_s", "theta1", "theta2"));
  files.add(dir / "mean-of-sigma.svg",
            svg_heatmap(sigma, a.resolution, a.resolution, "Mean of sigma_s", "theta1", "theta2"));
  files.flush();
  const auto valid = std::count_if(cells.begin(), cells.end(), [](const ScaleGridCell& c) { return c.valid; });
  std::cout << valid << " of " << cells.size() << " cells have enough samples; reports in " << dir.string() << "\n";
}

// ---------------------------------------------------------------------------

struct SynthArgs {
  std::string family = "smoothed_random_walks";
  std::size_t curves = 1000;
  std::uint64_t seed = 1;
  std::string out;
};

void cmd_synth(const SynthArgs& a) {
  const std::vector<CurveRecord> curves = synth_corpus(a.seed, a.curves, parse_synth_family(a.family));
  write_curves(std::filesystem::path(a.out), curves);
  std::cout << "wrote " << curves.size() << " curves to " << a.out << "\n";
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"Curve completion from the mean of matching curve fragments"};
  app.set_config("--config", "", "key=value configuration file");
  app.require_subcommand(1);

  IngestArgs ingest;
  ingest.out = default_snapshot();
  CLI::App* c_ingest = app.add_subcommand("ingest", "Build a fragment index snapshot from a corpus");
  ingest.source.add(c_ingest, true);
  ingest.fragments.add(c_ingest);
  c_ingest->add_option("--cell-xy", ingest.bucket.cell_xy, "Same-scale bucket size in pixels (0 = automatic)");
  c_ingest->add_option("--cell-phi", ingest.bucket.cell_phi, "Direction bucket size (rad)")->capture_default_str();
  c_ingest->add_option("--cell-theta", ingest.bucket.cell_theta, "Orientation bucket size (rad)")->capture_default_str();
  c_ingest->add_option("--out,-o", ingest.out, "Snapshot path (default $MEANCURVE_SNAPSHOT)")->capture_default_str();

  ReconstructArgs recon;
  recon.snapshot = default_snapshot();
  CLI::App* c_recon = app.add_subcommand("reconstruct", "Complete the curve between two inducers");
  c_recon->add_option("--snapshot,-s", recon.snapshot, "Snapshot path (default $MEANCURVE_SNAPSHOT)")->capture_default_str();
  c_recon->add_option("--corpus", recon.corpus, "Corpus file (default: the path stored in the snapshot)");
  c_recon->add_option("--format", recon.format, "Corpus file format")->capture_default_str();
  c_recon->add_option("--i1", recon.i1, "First inducer x,y,theta")->required()->expected(3)->delimiter(',');
  c_recon->add_option("--i2", recon.i2, "Second inducer x,y,theta")->required()->expected(3)->delimiter(',');
  recon.recon.add(c_recon);
  c_recon->add_option("--out,-o", recon.out, "JSON output (default stdout)");
  c_recon->add_option("--svg", recon.svg, "SVG drawing of the reconstruction");
  c_recon->add_flag("--euler", recon.euler, "Include the Euler-spiral completion");

  BenchArgs bench;
  CLI::App* c_bench = app.add_subcommand("bench", "Run the reconstruction benchmark");
  bench.source.add(c_bench, true);
  c_bench->add_option("--split-seed", bench.config.split.seed, "Train/test split seed")->capture_default_str();
  c_bench->add_option("--test-fraction", bench.config.split.test_fraction, "Share of test images")->capture_default_str();
  c_bench->add_option("--count", bench.config.sample.count, "Benchmark records")->capture_default_str();
  c_bench->add_option("--bins", bench.config.sample.bins, "Scale bins")->capture_default_str();
  c_bench->add_option("--seed", bench.config.sample.seed, "Sampling seed")->capture_default_str();
  c_bench->add_option("--min-scale", bench.min_scale, "Scale range lower bound (default empirical)");
  c_bench->add_option("--max-scale", bench.max_scale, "Scale range upper bound (default empirical)");
  c_bench->add_option("--difficult-count", bench.config.difficult_count, "Difficult-set records")->capture_default_str();
  c_bench->add_flag("--no-difficult", bench.no_difficult, "Skip the difficult set");
  bench.index_fragments.add(c_bench);
  c_bench->add_option("--sample-min-points", bench.sample_fragments.min_points, "Minimum points per benchmark fragment");
  bench.recon.add(c_bench);
  c_bench->add_option("--out-dir", bench.out_dir, "Report directory")->capture_default_str();

  ScaleArgs scale;
  scale.snapshot = default_snapshot();
  CLI::App* c_scale = app.add_subcommand("analyze-scale", "Scale-invariance maps over horizontal configurations");
  c_scale->add_option("--snapshot,-s", scale.snapshot, "Snapshot path (default $MEANCURVE_SNAPSHOT)")->capture_default_str();
  c_scale->add_option("--corpus", scale.corpus, "Corpus file (default: the path stored in the snapshot)");
  c_scale->add_option("--format", scale.format, "Corpus file format")->capture_default_str();
  c_scale->add_option("--resolution", scale.resolution, "Grid points per angle")->capture_default_str();
  c_scale->add_option("--scales", scale.scales, "Inducer distances in pixels")->delimiter(',');
  c_scale->add_option("--min-samples", scale.min_samples, "Matches a scale needs to count")->capture_default_str();
  c_scale->add_option("--t1", scale.tolerances.t1_rel_dist, "Relative distance tolerance")->capture_default_str();
  c_scale->add_option("--t2", scale.tolerances.t2_orient, "Orientation tolerance (rad)")->capture_default_str();
  c_scale->add_option("--out-dir", scale.out_dir, "Report directory")->capture_default_str();

  SynthArgs synth;
  CLI::App* c_synth = app.add_subcommand("synth", "Write a synthetic corpus");
  c_synth->add_option("--family", synth.family, "circular_arcs, lines or smoothed_random_walks")->capture_default_str();
  c_synth->add_option("--curves", synth.curves, "Curve count")->capture_default_str();
  c_synth->add_option("--seed", synth.seed, "Seed")->capture_default_str();
  c_synth->add_option("--out,-o", synth.out, "Output file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (c_ingest->parsed()) cmd_ingest(ingest);
    if (c_recon->parsed()) cmd_reconstruct(recon);
    if (c_bench->parsed()) cmd_bench(bench);
    if (c_scale->parsed()) cmd_analyze_scale(scale);
    if (c_synth->parsed()) cmd_synth(synth);
  } catch (const Error& e) {
    std::cerr << "meancurve: " << e.what() << "\n";
    return exit_code(e.code());
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "meancurve: " << e.what() << "\n";
    return kExitData;
  }
  return kExitOk;
}

}  // namespace meancurve::cli
