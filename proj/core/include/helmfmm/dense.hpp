#pragma once

#include <Eigen/Dense>

#include "helmfmm/krylov.hpp"

namespace helmfmm::dense {

using DenseMatrix = Eigen::MatrixXcd;

/// Partial-pivoting LU. Throws SingularError on an exactly zero pivot.
class DenseLu {
 public:
  explicit DenseLu(const DenseMatrix& a);
  CVector solve(std::span<const Complex> b) const;
  std::size_t size() const { return static_cast<std::size_t>(lu_.rows()); }

 private:
  Eigen::PartialPivLU<DenseMatrix> lu_;
};

class DenseOperator final : public krylov::LinearOperator {
 public:
  explicit DenseOperator(DenseMatrix a) : a_(std::move(a)) {}
  std::size_t size() const override { return static_cast<std::size_t>(a_.rows()); }
  void apply(std::span<const Complex> x, std::span<Complex> y) const override;
  const DenseMatrix& matrix() const { return a_; }

 private:
  DenseMatrix a_;
};

Eigen::Map<const Eigen::VectorXcd> view(std::span<const Complex> x);

}  // namespace helmfmm::dense
