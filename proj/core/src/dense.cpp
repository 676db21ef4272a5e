#include "helmfmm/dense.hpp"

namespace helmfmm::dense {

Eigen::Map<const Eigen::VectorXcd> view(std::span<const Complex> x) {
  return {x.data(), static_cast<Eigen::Index>(x.size())};
}

DenseLu::DenseLu(const DenseMatrix& a) {
  if (a.rows() != a.cols()) throw SizeError("DenseLu: matrix is not square");
  lu_.compute(a);
  const auto& factors = lu_.matrixLU();
  for (Eigen::Index i = 0; i < factors.rows(); ++i) {
    if (factors(i, i) == Complex(0.0, 0.0)) throw SingularError("DenseLu: zero pivot at row " + std::to_string(i));
  }
}

CVector DenseLu::solve(std::span<const Complex> b) const {
  if (b.size() != size()) throw SizeError("DenseLu::solve: rhs has the wrong length");
  const Eigen::VectorXcd x = lu_.solve(view(b));
  return {x.data(), x.data() + x.size()};
}

void DenseOperator::apply(std::span<const Complex> x, std::span<Complex> y) const {
  Eigen::Map<Eigen::VectorXcd>(y.data(), static_cast<Eigen::Index>(y.size())) = a_ * view(x);
}

}  // namespace helmfmm::dense
