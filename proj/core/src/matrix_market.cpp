#include "mstab/io/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "mstab/errors.hpp"

namespace mstab {

namespace {

[[noreturn]] void fail(const std::filesystem::path& path, std::size_t line,
                       const std::string& msg) {
  throw ParseError(path.string() + ":" + std::to_string(line) + ": " + msg);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

}  // namespace

CsrMatrix read_matrix_market(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open " + path.string());

  std::string line;
  std::size_t lineno = 1;
  if (!std::getline(f, line)) fail(path, lineno, "empty file");

  std::istringstream head(line);
  std::string banner, object, format, field, symmetry;
  head >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%MatrixMarket") fail(path, lineno, "missing %%MatrixMarket banner");
  object = lower(object);
  format = lower(format);
  field = lower(field);
  symmetry = lower(symmetry);
  if (object != "matrix") fail(path, lineno, "unsupported object '" + object + "'");
  if (format != "coordinate") fail(path, lineno, "unsupported format '" + format + "'");
  const bool complex_field = field == "complex";
  if (field != "real" && field != "integer" && !complex_field)
    fail(path, lineno, "unsupported field '" + field + "'");
  if (symmetry != "general" && symmetry != "symmetric" && symmetry != "hermitian" &&
      symmetry != "skew-symmetric")
    fail(path, lineno, "unsupported symmetry '" + symmetry + "'");

  std::size_t rows = 0, cols = 0, entries = 0;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty() || line[0] == '%') continue;
    std::istringstream sizes(line);
    if (!(sizes >> rows >> cols >> entries)) fail(path, lineno, "bad size line");
    break;
  }
  if (rows == 0 && cols == 0) fail(path, lineno, "missing size line");

  std::vector<std::tuple<std::size_t, std::size_t, Complex>> t;
  t.reserve(symmetry == "general" ? entries : 2 * entries);
  std::size_t seen = 0;
  while (seen < entries) {
    if (!std::getline(f, line)) fail(path, lineno + 1, "unexpected end of file");
    ++lineno;
    if (line.empty() || line[0] == '%') continue;
    std::istringstream e(line);
    std::size_t i = 0, j = 0;
    double re = 0.0, im = 0.0;
    if (!(e >> i >> j >> re)) fail(path, lineno, "bad entry");
    if (complex_field && !(e >> im)) fail(path, lineno, "complex entry needs two values");
    if (i < 1 || i > rows || j < 1 || j > cols) fail(path, lineno, "index out of range");
    ++seen;
    const Complex v(re, im);
    t.emplace_back(i - 1, j - 1, v);
    if (i != j) {
      if (symmetry == "symmetric")
        t.emplace_back(j - 1, i - 1, v);
      else if (symmetry == "hermitian")
        t.emplace_back(j - 1, i - 1, std::conj(v));
      else if (symmetry == "skew-symmetric")
        t.emplace_back(j - 1, i - 1, -v);
    }
  }
  return CsrMatrix::from_triplets(rows, cols, std::move(t));
}

void write_matrix_market(const CsrMatrix& a, const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  const bool real = a.is_real();
  f << "%%MatrixMarket matrix coordinate " << (real ? "real" : "complex") << " general\n";
  f << a.n_rows << ' ' << a.n_cols << ' ' << a.nnz() << '\n';
  char buf[128];
  for (std::size_t i = 0; i < a.n_rows; ++i) {
    for (std::size_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) {
      if (real)
        std::snprintf(buf, sizeof(buf), "%zu %zu %.17g\n", i + 1, a.col_idx[k] + 1,
                      a.values[k].real());
      else
        std::snprintf(buf, sizeof(buf), "%zu %zu %.17g %.17g\n", i + 1, a.col_idx[k] + 1,
                      a.values[k].real(), a.values[k].imag());
      f << buf;
    }
  }
  if (!f) throw IoError("write failed: " + path.string());
}

Vector read_vector(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open " + path.string());

  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(f, line)) throw ParseError(path.string() + ":1: empty file");
  ++lineno;

  if (line.rfind("%%MatrixMarket", 0) == 0) {
    std::istringstream head(line);
    std::string banner, object, format, field, symmetry;
    head >> banner >> object >> format >> field >> symmetry;
    format = lower(format);
    field = lower(field);
    const bool complex_field = lower(field) == "complex";
    std::size_t rows = 0, cols = 0, entries = 0;
    while (std::getline(f, line)) {
      ++lineno;
      if (line.empty() || line[0] == '%') continue;
      std::istringstream sizes(line);
      if (format == "array") {
        if (!(sizes >> rows >> cols)) fail(path, lineno, "bad size line");
      } else {
        if (!(sizes >> rows >> cols >> entries)) fail(path, lineno, "bad size line");
      }
      break;
    }
    if (cols != 1) fail(path, lineno, "vector file must have one column");
    Vector v(rows, Complex(0.0));
    if (format == "array") {
      for (std::size_t i = 0; i < rows;) {
        if (!std::getline(f, line)) fail(path, lineno + 1, "unexpected end of file");
        ++lineno;
        if (line.empty() || line[0] == '%') continue;
        std::istringstream e(line);
        double re = 0.0, im = 0.0;
        if (!(e >> re)) fail(path, lineno, "bad entry");
        if (complex_field && !(e >> im)) fail(path, lineno, "complex entry needs two values");
        v[i++] = Complex(re, im);
      }
    } else {
      for (std::size_t seen = 0; seen < entries;) {
        if (!std::getline(f, line)) fail(path, lineno + 1, "unexpected end of file");
        ++lineno;
        if (line.empty() || line[0] == '%') continue;
        std::istringstream e(line);
        std::size_t i = 0, j = 0;
        double re = 0.0, im = 0.0;
        if (!(e >> i >> j >> re)) fail(path, lineno, "bad entry");
        if (complex_field && !(e >> im)) fail(path, lineno, "complex entry needs two values");
        if (i < 1 || i > rows || j != 1) fail(path, lineno, "index out of range");
        v[i - 1] = Complex(re, im);
        ++seen;
      }
    }
    return v;
  }

  // plain text: one value per line, "re" or "re im"
  Vector v;
  do {
    if (line.empty() || line[0] == '%' || line[0] == '#') continue;
    std::istringstream e(line);
    double re = 0.0, im = 0.0;
    if (!(e >> re)) fail(path, lineno, "bad entry");
    e >> im;
    v.emplace_back(re, im);
  } while (++lineno, std::getline(f, line));
  if (v.empty()) throw ParseError(path.string() + ": no values");
  return v;
}

}  // namespace mstab
