#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include "mstab/csr.hpp"
#include "mstab/types.hpp"

namespace mstab {

/// Operator abstraction consumed by the solvers: anything that provides
/// y = A*x (and its adjoint) on C^N. Implementations must be safe to share
/// read-only across concurrent solves.
class LinearOperator {
 public:
  virtual ~LinearOperator() = default;

  virtual std::size_t size() const = 0;
  virtual void apply(std::span<const Complex> x, std::span<Complex> y) const = 0;
  virtual void apply_adjoint(std::span<const Complex> x, std::span<Complex> y) const = 0;

  /// Content hash identifying the operator for recycle-data validation.
  virtual std::uint64_t fingerprint() const = 0;
  virtual bool is_real() const = 0;

  Vector apply(std::span<const Complex> x) const;
  Vector apply_adjoint(std::span<const Complex> x) const;
};

/// Plain CSR operator. Holds a non-owning reference; the matrix must
/// outlive the operator.
class CsrOperator final : public LinearOperator {
 public:
  explicit CsrOperator(const CsrMatrix& a);

  using LinearOperator::apply;
  using LinearOperator::apply_adjoint;

  std::size_t size() const override { return a_->n_rows; }
  void apply(std::span<const Complex> x, std::span<Complex> y) const override;
  void apply_adjoint(std::span<const Complex> x, std::span<Complex> y) const override;
  std::uint64_t fingerprint() const override;
  bool is_real() const override;

  const CsrMatrix& matrix() const { return *a_; }

 private:
  const CsrMatrix* a_;
};

}  // namespace mstab
