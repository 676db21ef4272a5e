#include "helmfmm/sparse.hpp"

#include <algorithm>

namespace helmfmm::sparse {

CsrMatrix CsrMatrix::fromTriplets(std::size_t rows, std::size_t cols, std::vector<Triplet> triplets) {
  for (const Triplet& t : triplets) {
    if (t.row >= rows || t.col >= cols) throw SizeError("CsrMatrix::fromTriplets: index out of range");
  }
  // Stable, so duplicates are summed in insertion order and symmetric input
  // assembles to an exactly symmetric matrix.
  std::stable_sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  CsrMatrix m;
  m.rows_ = rows;
  m.cols_ = cols;
  m.offsets_.assign(rows + 1, 0);
  for (std::size_t k = 0; k < triplets.size(); ++k) {
    const Triplet& t = triplets[k];
    if (!m.columns_.empty() && k > 0 && triplets[k - 1].row == t.row && triplets[k - 1].col == t.col) {
      m.values_.back() += t.value;
      continue;
    }
    m.columns_.push_back(t.col);
    m.values_.push_back(t.value);
    ++m.offsets_[t.row + 1];
  }
  for (std::size_t i = 0; i < rows; ++i) m.offsets_[i + 1] += m.offsets_[i];
  return m;
}

CsrMatrix CsrMatrix::identity(std::size_t n) {
  std::vector<Triplet> t;
  t.reserve(n);
  for (std::size_t i = 0; i < n; ++i) t.push_back({i, i, 1.0});
  return fromTriplets(n, n, std::move(t));
}

Complex CsrMatrix::at(std::size_t i, std::size_t j) const {
  if (i >= rows_ || j >= cols_) throw SizeError("CsrMatrix::at: index out of range");
  const auto first = columns_.begin() + static_cast<std::ptrdiff_t>(offsets_[i]);
  const auto last = columns_.begin() + static_cast<std::ptrdiff_t>(offsets_[i + 1]);
  const auto it = std::lower_bound(first, last, j);
  if (it == last || *it != j) return {0.0, 0.0};
  return values_[static_cast<std::size_t>(it - columns_.begin())];
}

void CsrMatrix::multiply(std::span<const Complex> x, std::span<Complex> y) const {
  if (x.size() != cols_ || y.size() != rows_) throw SizeError("CsrMatrix::multiply: length mismatch");
  for (std::size_t i = 0; i < rows_; ++i) {
    Complex sum(0.0, 0.0);
    for (std::size_t k = offsets_[i]; k < offsets_[i + 1]; ++k) sum += values_[k] * x[columns_[k]];
    y[i] = sum;
  }
}

CVector CsrMatrix::operator*(std::span<const Complex> x) const {
  CVector y(rows_);
  multiply(x, y);
  return y;
}

CsrMatrix CsrMatrix::transpose() const {
  std::vector<Triplet> t;
  t.reserve(nnz());
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t k = offsets_[i]; k < offsets_[i + 1]; ++k) t.push_back({columns_[k], i, values_[k]});
  }
  return fromTriplets(cols_, rows_, std::move(t));
}

CVector CsrMatrix::diagonal() const {
  CVector d(std::min(rows_, cols_));
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = at(i, i);
  return d;
}

dense::DenseMatrix CsrMatrix::toDense() const {
  dense::DenseMatrix d = dense::DenseMatrix::Zero(static_cast<Eigen::Index>(rows_), static_cast<Eigen::Index>(cols_));
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t k = offsets_[i]; k < offsets_[i + 1]; ++k) {
      d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(columns_[k])) = values_[k];
    }
  }
  return d;
}

bool CsrMatrix::isSymmetric(double tol) const {
  if (rows_ != cols_) return false;
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t k = offsets_[i]; k < offsets_[i + 1]; ++k) {
      if (std::abs(values_[k] - at(columns_[k], i)) > tol) return false;
    }
  }
  return true;
}

CsrMatrix CsrMatrix::combine(Complex alpha, const CsrMatrix& a, Complex beta, const CsrMatrix& b) {
  if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw SizeError("CsrMatrix::combine: shape mismatch");
  std::vector<Triplet> t;
  t.reserve(a.nnz() + b.nnz());
  for (std::size_t i = 0; i < a.rows_; ++i) {
    for (std::size_t k = a.offsets_[i]; k < a.offsets_[i + 1]; ++k) t.push_back({i, a.columns_[k], alpha * a.values_[k]});
    for (std::size_t k = b.offsets_[i]; k < b.offsets_[i + 1]; ++k) t.push_back({i, b.columns_[k], beta * b.values_[k]});
  }
  return fromTriplets(a.rows_, a.cols_, std::move(t));
}

}  // namespace helmfmm::sparse
