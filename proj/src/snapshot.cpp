#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <limits>

#include "meancurve/index.hpp"

namespace meancurve {

namespace {

constexpr std::array<char, 5> kMagic{'C', 'S', 'I', 'X', '1'};
constexpr std::uint32_t kVersion = 1;

class LeWriter {
 public:
  explicit LeWriter(std::ostream& out) : out_(out) {}

  void u8(std::uint8_t v) { out_.put(static_cast<char>(v)); }
  void u32(std::uint32_t v) {
    for (int k = 0; k < 4; ++k) u8(static_cast<std::uint8_t>(v >> (8 * k)));
  }
  void u64(std::uint64_t v) {
    for (int k = 0; k < 8; ++k) u8(static_cast<std::uint8_t>(v >> (8 * k)));
  }
  void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
  void i64(std::int64_t v) { u64(static_cast<std::uint64_t>(v)); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    out_.write(s.data(), static_cast<std::streamsize>(s.size()));
  }

 private:
  std::ostream& out_;
};

class LeReader {
 public:
  explicit LeReader(std::istream& in) : in_(in) {}

  std::uint8_t u8() {
    const int c = in_.get();
    if (c == std::char_traits<char>::eof()) throw Error(ErrorCode::kSnapshotMismatch, "snapshot truncated");
    return static_cast<std::uint8_t>(c);
  }
  std::uint32_t u32() {
    std::uint32_t v = 0;
    for (int k = 0; k < 4; ++k) v |= static_cast<std::uint32_t>(u8()) << (8 * k);
    return v;
  }
  std::uint64_t u64() {
    std::uint64_t v = 0;
    for (int k = 0; k < 8; ++k) v |= static_cast<std::uint64_t>(u8()) << (8 * k);
    return v;
  }
  std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
  std::int64_t i64() { return static_cast<std::int64_t>(u64()); }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string str() {
    const std::uint32_t n = u32();
    if (n > (1u << 20)) throw Error(ErrorCode::kSnapshotMismatch, "implausible string length in snapshot");
    std::string s(n, '\0');
    in_.read(s.data(), n);
    if (!in_) throw Error(ErrorCode::kSnapshotMismatch, "snapshot truncated");
    return s;
  }

 private:
  std::istream& in_;
};

void write_similarity(LeWriter& w, const Similarity2& s) {
  w.f64(s.rotation);
  w.f64(s.scale);
  w.f64(s.translation.x);
  w.f64(s.translation.y);
  w.u8(s.reflect ? 1 : 0);
}

Similarity2 read_similarity(LeReader& r) {
  Similarity2 s;
  s.rotation = r.f64();
  s.scale = r.f64();
  s.translation.x = r.f64();
  s.translation.y = r.f64();
  s.reflect = r.u8() != 0;
  return s;
}

void write_grid(LeWriter& w, const SortedGrid& g) {
  w.u64(g.order().size());
  for (const auto& k : g.sorted_keys()) {
    w.i32(k[0]);
    w.i32(k[1]);
    w.i32(k[2]);
  }
  for (std::uint32_t o : g.order()) w.u32(o);
}

SortedGrid read_grid(LeReader& r, std::size_t expected) {
  const std::uint64_t n = r.u64();
  if (n != expected) throw Error(ErrorCode::kSnapshotMismatch, "bucket table size differs from fragment count");
  std::vector<SortedGrid::Key> keys(n);
  for (auto& k : keys) k = {r.i32(), r.i32(), r.i32()};
  std::vector<std::uint32_t> order(n);
  for (auto& o : order) {
    o = r.u32();
    if (o >= expected) throw Error(ErrorCode::kSnapshotMismatch, "bucket entry out of range");
  }
  SortedGrid g;
  g.assign_sorted(std::move(keys), std::move(order));
  return g;
}

}  // namespace

void write_snapshot(const std::filesystem::path& path, const FragmentIndex& index) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  LeWriter w(out);
  out.write(kMagic.data(), kMagic.size());
  w.u32(kVersion);

  const IndexMeta& meta = index.meta();
  w.u64(meta.corpus_checksum);
  w.u64(meta.curve_count);
  w.i32(meta.corpus_config.min_fragment_points);
  w.i32(meta.corpus_config.fragment_stride);
  w.i32(meta.corpus_config.tangent_window);
  w.u64(meta.corpus_config.max_fragments.value_or(0));
  w.u64(meta.corpus_config.seed);
  w.str(meta.corpus_path);

  const BucketParams& bp = index.bucket_params();
  w.f64(bp.cell_xy);
  w.f64(bp.cell_phi);
  w.f64(bp.cell_theta);

  w.u64(index.size());
  for (const CanonicalFragment& f : index.fragments()) {
    w.i64(f.ref.curve_id);
    w.u32(f.ref.start_index);
    w.u32(f.ref.end_index);
    w.f64(f.config.p_xy.x);
    w.f64(f.config.p_xy.y);
    w.f64(f.config.p_theta);
    w.u8(f.config.reflected ? 1 : 0);
    write_similarity(w, f.to_canonical);
  }
  write_grid(w, index.same_scale_grid());
  write_grid(w, index.scale_free_grid());
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

FragmentIndex read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::array<char, 5> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw Error(ErrorCode::kSnapshotMismatch, path.string() + " is not a CSIX1 snapshot");
  LeReader r(in);
  if (const std::uint32_t v = r.u32(); v != kVersion) {
    throw Error(ErrorCode::kSnapshotMismatch, "unsupported snapshot version " + std::to_string(v));
  }

  IndexMeta meta;
  meta.corpus_checksum = r.u64();
  meta.curve_count = r.u64();
  meta.corpus_config.min_fragment_points = r.i32();
  meta.corpus_config.fragment_stride = r.i32();
  meta.corpus_config.tangent_window = r.i32();
  if (const std::uint64_t cap = r.u64(); cap != 0) meta.corpus_config.max_fragments = cap;
  meta.corpus_config.seed = r.u64();
  meta.corpus_path = r.str();

  BucketParams bp;
  bp.cell_xy = r.f64();
  bp.cell_phi = r.f64();
  bp.cell_theta = r.f64();
  if (!(bp.cell_xy > 0.0) || !(bp.cell_phi > 0.0) || !(bp.cell_theta > 0.0)) {
    throw Error(ErrorCode::kSnapshotMismatch, "snapshot has invalid bucket sizes");
  }

  const std::uint64_t n = r.u64();
  if (n > std::numeric_limits<std::uint32_t>::max()) throw Error(ErrorCode::kSnapshotMismatch, "fragment count too large");
  std::vector<CanonicalFragment> frags(n);
  for (CanonicalFragment& f : frags) {
    f.ref.curve_id = r.i64();
    f.ref.start_index = r.u32();
    f.ref.end_index = r.u32();
    f.config.p_xy.x = r.f64();
    f.config.p_xy.y = r.f64();
    f.config.p_theta = r.f64();
    f.config.reflected = r.u8() != 0;
    f.to_canonical = read_similarity(r);
  }
  SortedGrid same = read_grid(r, frags.size());
  SortedGrid free_grid = read_grid(r, frags.size());
  return FragmentIndex::from_tables(std::move(frags), bp, std::move(meta), std::move(same), std::move(free_grid));
}

void verify_snapshot(const FragmentIndex& index, const Corpus& corpus) {
  if (index.meta().curve_count != corpus.size() || index.meta().corpus_checksum != corpus.checksum()) {
    throw Error(ErrorCode::kSnapshotMismatch, "snapshot was built from a different corpus (curve checksum mismatch)");
  }
}

}  // namespace meancurve
