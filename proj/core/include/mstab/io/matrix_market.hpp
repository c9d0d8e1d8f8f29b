#pragma once

#include <filesystem>

#include "mstab/csr.hpp"
#include "mstab/types.hpp"

namespace mstab {

/// Reads a Matrix Market coordinate file (real, integer or complex;
/// general, symmetric, hermitian or skew-symmetric with off-diagonal
/// expansion) into sorted CSR. Parse failures carry the offending line
/// number.
CsrMatrix read_matrix_market(const std::filesystem::path& path);

/// Writes coordinate format, full double precision.
void write_matrix_market(const CsrMatrix& a, const std::filesystem::path& path);

/// Reads a right-hand-side vector: a Matrix Market array or N x 1
/// coordinate file, or a plain text file with one value per line
/// ("re" or "re im").
Vector read_vector(const std::filesystem::path& path);

}  // namespace mstab
