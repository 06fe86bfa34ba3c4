#include "kgs/snapshot.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

namespace kgs {

namespace {

static_assert(std::endian::native == std::endian::little, "snapshot I/O assumes a little-endian host");

constexpr char magic[4] = {'K', 'G', 'S', '1'};

template <class T>
void put(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

void put_array(std::string& out, const double* data, std::size_t count) {
  put<std::uint64_t>(out, count);
  out.append(reinterpret_cast<const char*>(data), count * sizeof(double));
}

class Reader {
public:
  explicit Reader(const std::string& bytes) : bytes_(bytes) {}

  template <class T>
  T get() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }

  std::string get_bytes(std::size_t n) {
    need(n);
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  void get_array(std::size_t expected, double* out) {
    const auto count = get<std::uint64_t>();
    if (count != expected) throw SnapshotError("snapshot payload length does not match the header");
    need(count * sizeof(double));
    std::memcpy(out, bytes_.data() + pos_, count * sizeof(double));
    pos_ += count * sizeof(double);
  }

  std::size_t position() const noexcept { return pos_; }
  std::size_t remaining() const noexcept { return bytes_.size() - pos_; }

private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw SnapshotError("snapshot is truncated");
  }

  const std::string& bytes_;
  std::size_t pos_ = 0;
};

} // namespace

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string encode_snapshot(const FieldState& s, double tau, const std::string& scheme) {
  const auto n = static_cast<std::size_t>(s.grid.size());
  if (s.phi.size() != n || s.phi_dot.size() != n || s.psi.size() != n) {
    throw SnapshotError("state arrays do not match the grid");
  }
  std::string payload;
  put_array(payload, s.phi.data(), n);
  put_array(payload, s.phi_dot.data(), n);
  put_array(payload, reinterpret_cast<const double*>(s.psi.data()), 2 * n);

  std::string out(magic, sizeof magic);
  put<std::uint32_t>(out, snapshot_version);
  put(out, s.grid.a());
  put(out, s.grid.b());
  put<std::uint64_t>(out, n);
  put(out, s.eps);
  put(out, tau);
  put(out, s.t);
  put<std::uint64_t>(out, scheme.size());
  out += scheme;
  put<std::uint64_t>(out, fnv1a64(payload));
  out += payload;
  return out;
}

Snapshot decode_snapshot(const std::string& bytes) {
  Reader r(bytes);
  if (r.get_bytes(4) != std::string(magic, sizeof magic)) throw SnapshotError("not a snapshot file (bad magic)");
  const auto version = r.get<std::uint32_t>();
  if (version != snapshot_version) {
    throw SnapshotError("unknown snapshot version " + std::to_string(version));
  }
  const double a = r.get<double>();
  const double b = r.get<double>();
  const auto n64 = r.get<std::uint64_t>();
  const double eps = r.get<double>();
  const double tau = r.get<double>();
  const double t = r.get<double>();
  const auto tag_len = r.get<std::uint64_t>();
  if (tag_len > 4096) throw SnapshotError("snapshot scheme tag is implausibly long");
  std::string scheme = r.get_bytes(tag_len);
  const auto checksum = r.get<std::uint64_t>();
  if (n64 > (1ULL << 30)) throw SnapshotError("snapshot grid size is implausible");
  if (fnv1a64(bytes.substr(r.position())) != checksum) {
    // distinguishes a short file from a corrupted one
    const std::size_t payload_size = 3 * sizeof(std::uint64_t) + 4 * n64 * sizeof(double);
    if (r.remaining() < payload_size) throw SnapshotError("snapshot is truncated");
    throw SnapshotError("snapshot checksum mismatch");
  }

  Grid grid = [&] {
    try {
      return make_grid(a, b, static_cast<int>(n64));
    } catch (const std::invalid_argument& e) {
      throw SnapshotError(std::string("snapshot header describes an invalid grid: ") + e.what());
    }
  }();
  const auto n = static_cast<std::size_t>(n64);
  FieldState s{grid, eps, t, RealVector(n), RealVector(n), ComplexVector(n)};
  r.get_array(n, s.phi.data());
  r.get_array(n, s.phi_dot.data());
  r.get_array(2 * n, reinterpret_cast<double*>(s.psi.data()));
  if (r.remaining() != 0) throw SnapshotError("snapshot has trailing bytes");
  return {std::move(s), tau, std::move(scheme)};
}

void save_snapshot(const std::string& path, const FieldState& state, double tau, const std::string& scheme) {
  const std::string bytes = encode_snapshot(state, tau, scheme);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw SnapshotError("cannot open '" + path + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw SnapshotError("write to '" + path + "' failed");
}

Snapshot load_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SnapshotError("cannot open snapshot '" + path + "'");
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_snapshot(bytes);
}

Snapshot load_snapshot(const std::string& path, const Grid& expected) {
  Snapshot snap = load_snapshot(path);
  if (!(snap.state.grid == expected)) {
    std::ostringstream msg;
    msg << "snapshot grid (N = " << snap.state.grid.size() << " on [" << snap.state.grid.a() << ", "
        << snap.state.grid.b() << "]) does not match the requested grid (N = " << expected.size() << " on ["
        << expected.a() << ", " << expected.b() << "])";
    throw SnapshotError(msg.str());
  }
  return snap;
}

} // namespace kgs
