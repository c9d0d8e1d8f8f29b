#include "mstab/recycle.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "mstab/errors.hpp"
#include "mstab/kernels.hpp"

namespace mstab {

static_assert(std::endian::native == std::endian::little,
              "the .mrd layout is little-endian");

FetchPolicy FetchPolicy::at_cycle(std::size_t k) {
  if (k < 1) throw ConfigError("fetch policy: cycle >= 1 required");
  return {Kind::AtCycle, k};
}

FetchPolicy FetchPolicy::at_half_tolerance() { return {Kind::AtHalfTolerance, 0}; }

FetchPolicy FetchPolicy::manual() { return {Kind::Manual, 0}; }

RecycleData fetch(const DenseMatrix& p, const DenseMatrix& u, const DenseMatrix& v,
                  std::vector<Complex> omega_history, std::size_t level_j,
                  std::uint64_t fingerprint) {
  RecycleData d;
  d.p = p;
  d.u = u;
  d.v = v;
  d.omega_history = std::move(omega_history);
  d.level_J = level_j;
  d.s = p.cols();
  d.matrix_fingerprint = fingerprint;
  return d;
}

ValidationReport validate(const RecycleData& data, const LinearOperator& a) {
  if (data.matrix_fingerprint != a.fingerprint())
    throw FingerprintMismatch("recycle data belongs to a different operator");
  if (data.p.rows() != a.size() || data.u.rows() != a.size() || data.v.rows() != a.size() ||
      data.p.cols() != data.s || data.u.cols() != data.s || data.v.cols() != data.s)
    throw DimensionMismatch("recycle data has inconsistent shapes");
  if (!data.omega_history.empty() && data.omega_history.size() != data.level_J)
    throw StaleData("recycle data: omega history length disagrees with level");

  ValidationReport rep;

  // V = A * U, relative
  double dev_num = 0.0, dev_den = 0.0;
  for (std::size_t q = 0; q < data.s; ++q) {
    Vector au = a.apply(data.u.col(q));
    auto vq = data.v.col(q);
    for (std::size_t i = 0; i < au.size(); ++i) dev_num += std::norm(vq[i] - au[i]);
    const double nv = norm2(vq);
    dev_den += nv * nv;
  }
  const double dev_v = dev_den > 0.0 ? std::sqrt(dev_num) / std::sqrt(dev_den)
                                     : std::sqrt(dev_num);

  // P^H P = I
  DenseMatrix gram = gemm(adjoint(data.p), data.p);
  double dev_p = 0.0;
  for (std::size_t j = 0; j < data.s; ++j)
    for (std::size_t i = 0; i < data.s; ++i) {
      const Complex want = i == j ? Complex(1.0) : Complex(0.0);
      dev_p = std::max(dev_p, std::abs(gram(i, j) - want));
    }

  rep.max_deviation = std::max(dev_v, dev_p);
  if (rep.max_deviation > 1e-6) throw StaleData("recycle data deviates from its invariants");

  // near-empty Sonneveld space hazard: V with collapsing smallest singular value
  DenseMatrix vgram = gemm(adjoint(data.v), data.v);
  const auto ev = hermitian_eigenvalues(vgram);
  const double smin = std::sqrt(std::max(0.0, ev.front()));
  const double smax = std::sqrt(std::max(0.0, ev.back()));
  rep.sigma_min_ratio = smax > 0.0 ? smin / smax : 0.0;
  rep.low_rank_warning = rep.sigma_min_ratio < 1e-10;
  return rep;
}

namespace {

constexpr char kMagic[8] = {'M', 'S', 'T', 'A', 'B', 'M', 'R', 'D'};
constexpr std::uint32_t kVersion = 1;
constexpr std::uint32_t kFlagRealBlocks = 1u;

struct Header {
  char magic[8];
  std::uint32_t version;
  std::uint32_t flags;
  std::uint64_t n;
  std::uint64_t s;
  std::uint64_t level_j;
  std::uint64_t omega_count;
  std::uint64_t fingerprint;
};
static_assert(sizeof(Header) == 56);

bool bitwise_real(const DenseMatrix& m) {
  for (const Complex& z : m.data())
    if (std::bit_cast<std::uint64_t>(z.imag()) != 0) return false;
  return true;
}

void write_block(std::ofstream& f, const DenseMatrix& m, bool real) {
  for (const Complex& z : m.data()) {
    const double re = z.real(), im = z.imag();
    f.write(reinterpret_cast<const char*>(&re), sizeof(double));
    if (!real) f.write(reinterpret_cast<const char*>(&im), sizeof(double));
  }
}

DenseMatrix read_block(std::ifstream& f, std::size_t n, std::size_t s, bool real) {
  DenseMatrix m(n, s);
  for (Complex& z : m.data()) {
    double re = 0.0, im = 0.0;
    f.read(reinterpret_cast<char*>(&re), sizeof(double));
    if (!real) f.read(reinterpret_cast<char*>(&im), sizeof(double));
    z = Complex(re, im);
  }
  return m;
}

}  // namespace

void save(const RecycleData& data, const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");

  const bool real = bitwise_real(data.p) && bitwise_real(data.u) && bitwise_real(data.v);
  Header h{};
  std::memcpy(h.magic, kMagic, sizeof(kMagic));
  h.version = kVersion;
  h.flags = real ? kFlagRealBlocks : 0u;
  h.n = data.p.rows();
  h.s = data.s;
  h.level_j = data.level_J;
  h.omega_count = data.omega_history.size();
  h.fingerprint = data.matrix_fingerprint;
  f.write(reinterpret_cast<const char*>(&h), sizeof(h));

  write_block(f, data.p, real);
  write_block(f, data.u, real);
  write_block(f, data.v, real);
  for (const Complex& w : data.omega_history) {
    const double re = w.real(), im = w.imag();
    f.write(reinterpret_cast<const char*>(&re), sizeof(double));
    f.write(reinterpret_cast<const char*>(&im), sizeof(double));
  }
  if (!f) throw IoError("write failed: " + path.string());
}

RecycleData load(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path.string());

  Header h{};
  f.read(reinterpret_cast<char*>(&h), sizeof(h));
  if (!f || std::memcmp(h.magic, kMagic, sizeof(kMagic)) != 0)
    throw ParseError(path.string() + ": not a .mrd file");
  if (h.version != kVersion)
    throw ParseError(path.string() + ": unsupported version " + std::to_string(h.version));

  const bool real = (h.flags & kFlagRealBlocks) != 0;
  const std::size_t scalar = real ? sizeof(double) : 2 * sizeof(double);
  const std::uintmax_t expect = sizeof(Header) + 3 * h.n * h.s * scalar +
                                h.omega_count * 2 * sizeof(double);
  std::error_code ec;
  const std::uintmax_t actual = std::filesystem::file_size(path, ec);
  if (ec || actual != expect) throw ParseError(path.string() + ": truncated or padded file");

  RecycleData d;
  d.p = read_block(f, h.n, h.s, real);
  d.u = read_block(f, h.n, h.s, real);
  d.v = read_block(f, h.n, h.s, real);
  d.omega_history.resize(h.omega_count);
  for (Complex& w : d.omega_history) {
    double re = 0.0, im = 0.0;
    f.read(reinterpret_cast<char*>(&re), sizeof(double));
    f.read(reinterpret_cast<char*>(&im), sizeof(double));
    w = Complex(re, im);
  }
  if (!f) throw ParseError(path.string() + ": unexpected end of file");
  d.level_J = h.level_j;
  d.s = h.s;
  d.matrix_fingerprint = h.fingerprint;
  return d;
}

}  // namespace mstab
