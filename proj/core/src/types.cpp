#include "mstab/types.hpp"

#include <cmath>

#include "mstab/errors.hpp"

namespace mstab {

double norm2(std::span<const Complex> v) {
  double acc = 0.0;
  for (const Complex& z : v) acc += std::norm(z);
  return std::sqrt(acc);
}

Complex dot(std::span<const Complex> a, std::span<const Complex> b) {
  Complex acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::conj(a[i]) * b[i];
  return acc;
}

void axpy(Complex alpha, std::span<const Complex> x, std::span<Complex> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

bool is_real(std::span<const Complex> v) {
  for (const Complex& z : v)
    if (z.imag() != 0.0) return false;
  return true;
}

bool all_finite(std::span<const Complex> v) {
  for (const Complex& z : v)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  return true;
}

void ensure_finite(std::span<const Complex> v, const char* what) {
  if (!all_finite(v)) throw Error(std::string(what) + ": non-finite entries");
}

}  // namespace mstab
