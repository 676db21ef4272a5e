#pragma once

#include <span>
#include <vector>

#include "helmfmm/dense.hpp"
#include "helmfmm/krylov.hpp"

namespace helmfmm::sparse {

struct Triplet {
  std::size_t row = 0;
  std::size_t col = 0;
  Complex value;
};

/// Compressed sparse row matrix with sorted, unique column indices per row.
class CsrMatrix {
 public:
  CsrMatrix() = default;
  /// Duplicate entries are summed.
  static CsrMatrix fromTriplets(std::size_t rows, std::size_t cols, std::vector<Triplet> triplets);
  static CsrMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t nnz() const { return values_.size(); }
  const std::vector<std::size_t>& rowOffsets() const { return offsets_; }
  const std::vector<std::size_t>& columns() const { return columns_; }
  const std::vector<Complex>& values() const { return values_; }

  /// Entry (i, j), zero when not stored.
  Complex at(std::size_t i, std::size_t j) const;
  void multiply(std::span<const Complex> x, std::span<Complex> y) const;
  CVector operator*(std::span<const Complex> x) const;
  CsrMatrix transpose() const;
  CVector diagonal() const;
  dense::DenseMatrix toDense() const;
  /// True when the matrix equals its plain (unconjugated) transpose.
  bool isSymmetric(double tol = 0.0) const;

  /// alpha·A + beta·B for matrices of equal shape.
  static CsrMatrix combine(Complex alpha, const CsrMatrix& a, Complex beta, const CsrMatrix& b);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::size_t> offsets_{0};
  std::vector<std::size_t> columns_;
  std::vector<Complex> values_;
};

class CsrOperator final : public krylov::LinearOperator {
 public:
  explicit CsrOperator(const CsrMatrix& a) : a_(&a) {}
  std::size_t size() const override { return a_->rows(); }
  void apply(std::span<const Complex> x, std::span<Complex> y) const override { a_->multiply(x, y); }

 private:
  const CsrMatrix* a_;
};

}  // namespace helmfmm::sparse
