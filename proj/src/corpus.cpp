#include "meancurve/corpus.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>
#include <unordered_set>

namespace meancurve {

void CorpusConfig::validate() const {
  if (min_fragment_points < 2 || fragment_stride < 1 || tangent_window < 2) {
    throw Error(ErrorCode::kInvalidArgument, "corpus config: min_fragment_points >= 2, stride >= 1, tangent_window >= 2");
  }
  if (max_fragments && *max_fragments == 0) {
    throw Error(ErrorCode::kInvalidArgument, "corpus config: max_fragments must be positive");
  }
}

Corpus::Corpus(std::vector<CurveRecord> curves) : curves_(std::move(curves)) {
  by_id_.reserve(curves_.size());
  for (std::size_t k = 0; k < curves_.size(); ++k) {
    if (curves_[k].poly.size() < kMinCurvePoints) {
      throw Error(ErrorCode::kInvalidArgument,
                  "curve " + std::to_string(curves_[k].curve_id) + " has fewer than 4 distinct points");
    }
    if (!by_id_.emplace(curves_[k].curve_id, k).second) {
      throw Error(ErrorCode::kInvalidArgument, "duplicate curve id " + std::to_string(curves_[k].curve_id));
    }
  }
}

const CurveRecord* Corpus::find(std::int64_t curve_id) const {
  const auto it = by_id_.find(curve_id);
  return it == by_id_.end() ? nullptr : &curves_[it->second];
}

const CurveRecord& Corpus::curve(std::int64_t curve_id) const {
  const CurveRecord* c = find(curve_id);
  if (c == nullptr) throw Error(ErrorCode::kOutOfRange, "unknown curve id " + std::to_string(curve_id));
  return *c;
}

namespace {

struct Fnv1a {
  std::uint64_t h = 1469598103934665603ULL;
  void bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t k = 0; k < n; ++k) {
      h ^= p[k];
      h *= 1099511628211ULL;
    }
  }
  template <typename T>
  void value(T v) {
    bytes(&v, sizeof v);
  }
};

}  // namespace

std::uint64_t Corpus::checksum() const {
  Fnv1a f;
  f.value(static_cast<std::uint64_t>(curves_.size()));
  for (const CurveRecord& c : curves_) {
    f.value(c.curve_id);
    f.bytes(c.image_id.data(), c.image_id.size());
    f.value(static_cast<std::uint64_t>(c.poly.size()));
    for (const Point2& p : c.poly.points()) {
      f.value(std::bit_cast<std::uint64_t>(p.x));
      f.value(std::bit_cast<std::uint64_t>(p.y));
    }
  }
  return f.h;
}

std::span<const Point2> Corpus::fragment_points(const FragmentRef& f) const {
  const auto pts = curve(f.curve_id).poly.points();
  if (f.end_index <= f.start_index || f.end_index >= pts.size()) {
    throw Error(ErrorCode::kOutOfRange, "fragment indices out of range");
  }
  return pts.subspan(f.start_index, f.end_index - f.start_index + 1);
}

CurveFormat parse_curve_format(const std::string& name) {
  if (name == "canonical" || name == "curves") return CurveFormat::kCanonical;
  throw Error(ErrorCode::kInvalidArgument, "unsupported curve format '" + name + "'");
}

namespace {

[[noreturn]] void parse_fail(std::size_t line, const std::string& msg) {
  throw Error(ErrorCode::kParseError, "line " + std::to_string(line) + ": " + msg);
}

bool next_content_line(std::istream& in, std::string& line, std::size_t& line_no) {
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    if (line[first] == '#') continue;
    return true;
  }
  return false;
}

}  // namespace

LoadResult read_curves(std::istream& in) {
  LoadResult result;
  std::unordered_set<std::int64_t> seen_ids;
  std::string line;
  std::size_t line_no = 0;
  if (!next_content_line(in, line, line_no)) parse_fail(line_no, "missing 'CURVES v1' header");
  {
    std::istringstream hs(line);
    std::string tag, version;
    hs >> tag >> version;
    if (tag != "CURVES" || version != "v1") parse_fail(line_no, "expected 'CURVES v1' header");
  }

  while (next_content_line(in, line, line_no)) {
    std::istringstream hs(line);
    std::string tag, image_id;
    std::int64_t id = 0;
    long long count = -1;
    if (!(hs >> tag >> id >> image_id >> count) || tag != "curve" || count < 0) {
      parse_fail(line_no, "expected 'curve <id> <image_id> <n_points>'");
    }
    const std::size_t header_line = line_no;
    std::vector<Point2> pts;
    pts.reserve(static_cast<std::size_t>(count));
    for (long long k = 0; k < count; ++k) {
      if (!next_content_line(in, line, line_no)) {
        parse_fail(line_no, "curve " + std::to_string(id) + " truncated after " + std::to_string(k) + " points");
      }
      std::istringstream ps(line);
      Point2 p;
      std::string extra;
      if (!(ps >> p.x >> p.y) || (ps >> extra) || !p.finite()) {
        parse_fail(line_no, "expected '<x> <y>' for curve " + std::to_string(id));
      }
      pts.push_back(p);
    }
    // Drop consecutive duplicates before the size check.
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() < kMinCurvePoints) {
      ++result.skipped;
      continue;
    }
    if (!seen_ids.insert(id).second) parse_fail(header_line, "duplicate curve id " + std::to_string(id));
    result.curves.push_back(CurveRecord{id, image_id, Polyline(std::move(pts))});
  }
  return result;
}

LoadResult load_curves(const std::filesystem::path& path, CurveFormat format) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  LoadResult result;
  switch (format) {
    case CurveFormat::kCanonical:
      result = read_curves(in);
      break;
  }
  if (result.curves.empty()) {
    throw Error(ErrorCode::kEmptyCorpus, path.string() + " contains no usable curves (skipped " +
                                             std::to_string(result.skipped) + ")");
  }
  return result;
}

void write_curves(std::ostream& out, std::span<const CurveRecord> curves) {
  out << "CURVES v1\n";
  out << std::setprecision(17);
  for (const CurveRecord& c : curves) {
    out << "curve " << c.curve_id << ' ' << c.image_id << ' ' << c.poly.size() << '\n';
    for (const Point2& p : c.poly.points()) out << p.x << ' ' << p.y << '\n';
  }
}

void write_curves(const std::filesystem::path& path, std::span<const CurveRecord> curves) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  write_curves(out, curves);
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

std::size_t fragment_count(std::size_t point_count, const CorpusConfig& cfg) {
  const auto min_span = static_cast<std::size_t>(cfg.min_fragment_points - 1);
  const auto stride = static_cast<std::size_t>(cfg.fragment_stride);
  std::size_t total = 0;
  for (std::size_t i = 0; i + min_span < point_count; i += stride) {
    total += (point_count - 1 - i - min_span) / stride + 1;
  }
  return total;
}

std::vector<FragmentRef> enumerate_fragments(std::span<const CurveRecord> curves, const CorpusConfig& cfg) {
  cfg.validate();
  std::vector<FragmentRef> out;
  if (!cfg.max_fragments) {
    std::size_t total = 0;
    for (const CurveRecord& c : curves) total += fragment_count(c.poly.size(), cfg);
    out.reserve(total);
    for_each_fragment(curves, cfg, [&](const CurveRecord&, FragmentRef f) { out.push_back(f); });
  } else {
    const std::size_t cap = *cfg.max_fragments;
    out.reserve(cap);
    std::mt19937_64 rng(cfg.seed);
    std::size_t seen = 0;
    for_each_fragment(curves, cfg, [&](const CurveRecord&, FragmentRef f) {
      if (out.size() < cap) {
        out.push_back(f);
      } else {
        const std::size_t slot = std::uniform_int_distribution<std::size_t>(0, seen)(rng);
        if (slot < cap) out[slot] = f;
      }
      ++seen;
    });
  }
  std::sort(out.begin(), out.end());
  return out;
}

double window_tangent(std::span<const Point2> pts, std::size_t from, int step, int window) {
  const auto count = static_cast<std::size_t>(window);
  const auto at = [&](std::size_t k) {
    return pts[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(from) + step * static_cast<std::ptrdiff_t>(k))];
  };
  Point2 mean{};
  for (std::size_t k = 0; k < count; ++k) mean += at(k);
  mean = (1.0 / static_cast<double>(count)) * mean;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < count; ++k) {
    const Point2 d = at(k) - mean;
    sxx += d.x * d.x;
    syy += d.y * d.y;
    sxy += d.x * d.y;
  }
  if (!(sxx + syy > 0.0)) throw Error(ErrorCode::kDegenerateTangent, "tangent window points are coincident");
  // Principal axis of the scatter matrix (total least squares line).
  double angle = 0.5 * std::atan2(2.0 * sxy, sxx - syy);
  const Point2 walk = at(count - 1) - at(0);
  if (dot(unit_vector(angle), walk) < 0.0) angle += kPi;
  return wrap_two_pi(angle);
}

std::pair<Inducer, Inducer> endpoint_inducers(const CurveRecord& curve, const FragmentRef& f, int tangent_window) {
  const auto pts = curve.poly.points();
  if (f.curve_id != curve.curve_id || f.end_index <= f.start_index || f.end_index >= pts.size()) {
    throw Error(ErrorCode::kOutOfRange, "fragment does not fit curve " + std::to_string(curve.curve_id));
  }
  const int span_points = static_cast<int>(f.end_index - f.start_index + 1);
  const int window = std::min(tangent_window, span_points);
  const double first = window_tangent(pts, f.start_index, +1, window);
  const double second = window_tangent(pts, f.end_index, -1, window);
  return {Inducer(pts[f.start_index], first), Inducer(pts[f.end_index], second)};
}

}  // namespace meancurve
