#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace mstab {

/// All arithmetic is complex double precision; real problems are embedded
/// with zero imaginary parts so that complex relaxations and test spaces
/// need no special casing.
using Complex = std::complex<double>;
using Vector = std::vector<Complex>;

double norm2(std::span<const Complex> v);

/// Inner product with the first argument conjugated: sum conj(a_i) * b_i.
Complex dot(std::span<const Complex> a, std::span<const Complex> b);

/// y += alpha * x
void axpy(Complex alpha, std::span<const Complex> x, std::span<Complex> y);

bool is_real(std::span<const Complex> v);
bool all_finite(std::span<const Complex> v);

/// Throws Error if v contains NaN or Inf entries.
void ensure_finite(std::span<const Complex> v, const char* what);

}  // namespace mstab
