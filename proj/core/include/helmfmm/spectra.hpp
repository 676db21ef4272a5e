#pragma once

#include "helmfmm/dense.hpp"
#include "helmfmm/krylov.hpp"

namespace helmfmm::spectra {

/// Largest dimension accepted by the dense routines.
inline constexpr std::size_t kMaxDenseSize = 4096;

/// Column j is op(e_j).
dense::DenseMatrix materialize(const krylov::LinearOperator& op);
/// Column j is M⁻¹(A e_j).
dense::DenseMatrix materialize(const krylov::LinearOperator& a, const krylov::Preconditioner& m);

/// All eigenvalues by unitary Hessenberg reduction followed by Wilkinson-shifted
/// complex QR sweeps. Throws NoConvergence after 100·n sweeps.
CVector denseEigenvalues(const dense::DenseMatrix& a, double tol = 0.0);

/// Upper Hessenberg matrix unitarily similar to a.
dense::DenseMatrix hessenberg(const dense::DenseMatrix& a);

/// Eigenvector for an approximate eigenvalue by inverse iteration.
CVector inverseIteration(const dense::DenseMatrix& a, Complex lambda, int iterations = 3);

struct SpectrumReport {
  CVector eigenvalues;
  std::size_t nNegativeReal = 0;
  double minAbs = 0.0;
  double maxAbs = 0.0;
  double medianAbs = 0.0;
  /// max |λ − 1|
  double clusterRadius = 0.0;
};

SpectrumReport spectrumReport(CVector eigenvalues);

}  // namespace helmfmm::spectra
