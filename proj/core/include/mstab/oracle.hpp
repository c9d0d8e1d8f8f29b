#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mstab/dense.hpp"
#include "mstab/kernels.hpp"
#include "mstab/types.hpp"

namespace mstab::oracle {

/// Dense brute-force subspace machinery for small ambient dimensions
/// (N <= 64 by intent). This is the independent ground-truth engine used to
/// verify Sonneveld-space and M-space identities, dimension laws and solver
/// residual membership; it exists for verification, not performance.

/// A subspace of C^N represented by an orthonormal basis (N x d).
struct SubspaceBasis {
  DenseMatrix basis;

  std::size_t dim() const { return basis.cols(); }
  std::size_t ambient() const { return basis.rows(); }

  static SubspaceBasis full_space(std::size_t n);
  static SubspaceBasis zero_space(std::size_t n);

  /// Orthonormalizes the given spanning columns (rank-revealing).
  static SubspaceBasis from_span(const DenseMatrix& cols, double tol = kRankTol);
  static SubspaceBasis span_of(std::span<const Complex> v);
};

/// Nonzero relaxation scalars omega_1, omega_2, ...; together with an index
/// range they represent the stabilization polynomials prod (1 - omega_k t).
struct OmegaSequence {
  std::vector<Complex> values;

  std::size_t size() const { return values.size(); }
  Complex operator[](std::size_t level) const { return values.at(level - 1); }  ///< 1-based
};

/// Orthonormal basis of the block Krylov subspace
/// span{ A^k * T : k = 0..j-1 }; j = 0 yields the zero-dimensional space.
SubspaceBasis krylov_block(const DenseMatrix& a, const SubspaceBasis& t, std::size_t j);

SubspaceBasis subspace_sum(const SubspaceBasis& s1, const SubspaceBasis& s2);

/// Intersection via orthogonal complements: S1 ^ S2 = (S1perp + S2perp)perp.
SubspaceBasis subspace_intersect(const SubspaceBasis& s1, const SubspaceBasis& s2);

SubspaceBasis subspace_perp(const SubspaceBasis& s);

/// Basis of (I - omega * A) * S.
SubspaceBasis apply_shifted(const DenseMatrix& a, Complex omega, const SubspaceBasis& s);

/// Sonneveld space G_j by the literal recursion
/// G_0 = C^N, G_j = (I - omega_j * A) * (G_{j-1} ^ Pperp).
SubspaceBasis sonneveld_recursive(const DenseMatrix& a, const SubspaceBasis& p,
                                  const OmegaSequence& omegas, std::size_t j);

/// Same space in closed form:
/// G_j = (I - omega_1 A) * ... * (I - omega_j A) * K_j(A^H; P)perp.
/// Independent of sonneveld_recursive (built from krylov_block + perp +
/// repeated shifts); the two constructions cross-validate each other.
SubspaceBasis sonneveld_direct(const DenseMatrix& a, const SubspaceBasis& p,
                               const OmegaSequence& omegas, std::size_t j);

enum class TestSpaceMode { Direct, Recursive };

/// Test space C~_j with G_j = (C~_j)perp.
/// Direct mode spans the solved systems (p_{0,k}(A^H))^{-1} * P, k = 1..j;
/// recursive mode applies C_j = C_{j-1} + (I - omega_j A^H)^{-1} C_{j-1}
/// seeded with C_1 = (I - omega_1 A^H)^{-1} P.
/// Throws ShiftSingular when a shifted solve detects singularity.
SubspaceBasis test_space(const DenseMatrix& a, const SubspaceBasis& p,
                         const OmegaSequence& omegas, std::size_t j, TestSpaceMode mode);

enum class MspaceOrder { CutShearAdd, AddCutShear };

/// M-space recursion M_0 = C^N,
///   cut-shear-add:  M_j = (I - omega_j A) * (M_{j-1} ^ P_jperp) + Q_j
///   add-cut-shear:  M_j = (I - omega_j A) * ((M_{j-1} + Q_j) ^ P_jperp)
/// Callers are responsible for P_seq nondecreasing / Q_seq nonincreasing in
/// subspace order (checkable via is_subspace).
SubspaceBasis mspace_recursive(const DenseMatrix& a,
                               std::span<const SubspaceBasis> p_seq,
                               std::span<const SubspaceBasis> q_seq,
                               const OmegaSequence& omegas, std::size_t j,
                               MspaceOrder order = MspaceOrder::CutShearAdd);

/// True iff every column of S1 has distance <= tol from span(S2).
bool is_subspace(const SubspaceBasis& s1, const SubspaceBasis& s2, double tol);

/// || v - B B^H v ||_2, the distance of v from the subspace.
double distance_to(const SubspaceBasis& s, std::span<const Complex> v);

/// sin of the largest principal angle from S1 into S2 (0 when S1 is {0}).
double directed_gap(const SubspaceBasis& s1, const SubspaceBasis& s2);

/// Symmetric gap: max of the two directed gaps. Zero iff equal subspaces.
double subspace_gap(const SubspaceBasis& s1, const SubspaceBasis& s2);

}  // namespace mstab::oracle
