#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "helmfmm/bem.hpp"
#include "helmfmm/discretize.hpp"
#include "helmfmm/spectra.hpp"

using namespace helmfmm;
using namespace helmfmm::spectra;

namespace {

// Greedy matching of two unordered eigenvalue lists.
double maxMismatch(CVector a, CVector b) {
  double worst = 0.0;
  for (const Complex& x : a) {
    auto it = std::min_element(b.begin(), b.end(), [&](Complex p, Complex q) { return std::abs(p - x) < std::abs(q - x); });
    worst = std::max(worst, std::abs(*it - x));
    b.erase(it);
  }
  return worst;
}

dense::DenseMatrix companion(const CVector& roots) {
  // Coefficients of Π(λ − r_k), highest degree first, monic.
  CVector c{1.0};
  for (const Complex& r : roots) {
    CVector next(c.size() + 1, 0.0);
    for (std::size_t i = 0; i < c.size(); ++i) {
      next[i] += c[i];
      next[i + 1] -= r * c[i];
    }
    c = next;
  }
  const auto n = static_cast<Eigen::Index>(roots.size());
  dense::DenseMatrix m = dense::DenseMatrix::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) m(0, j) = -c[static_cast<std::size_t>(j + 1)];
  for (Eigen::Index i = 1; i < n; ++i) m(i, i - 1) = 1.0;
  return m;
}

discretize::LinearSystem p1System(double kappa) {
  const auto p = discretize::problemP1(kappa);
  return discretize::buildSystem(p, p.gridForH(1.0 / 32), discretize::ElementType::Q1);
}

}  // namespace

TEST(Eigenvalues, Diagonal) {
  dense::DenseMatrix d = dense::DenseMatrix::Zero(3, 3);
  d(0, 0) = 1.0;
  d(1, 1) = 2.0;
  d(2, 2) = 3.0;
  EXPECT_LE(maxMismatch(denseEigenvalues(d), {1.0, 2.0, 3.0}), 1e-14);
}

TEST(Eigenvalues, Rotation) {
  dense::DenseMatrix r = dense::DenseMatrix::Zero(2, 2);
  r(0, 1) = -1.0;
  r(1, 0) = 1.0;
  EXPECT_LE(maxMismatch(denseEigenvalues(r), {Complex(0, 1), Complex(0, -1)}), 1e-14);
}

TEST(Eigenvalues, CompanionMatrixRoots) {
  const CVector roots{Complex(1, 0), Complex(-2, 0.5), Complex(0.3, -1.2), Complex(2.5, 0),
                      Complex(-0.7, -0.7), Complex(0, 3), Complex(1.5, 1.5), Complex(-3, 0)};
  EXPECT_LE(maxMismatch(denseEigenvalues(companion(roots)), roots), 1e-8);
}

TEST(Eigenvalues, AgreesWithEigenOnRandomMatrix) {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  dense::DenseMatrix a(60, 60);
  for (Eigen::Index i = 0; i < 60; ++i) {
    for (Eigen::Index j = 0; j < 60; ++j) a(i, j) = {u(rng), u(rng)};
  }
  const auto ours = denseEigenvalues(a);
  const Eigen::VectorXcd ref = Eigen::ComplexEigenSolver<dense::DenseMatrix>(a, false).eigenvalues();
  EXPECT_LE(maxMismatch(ours, CVector(ref.data(), ref.data() + ref.size())), 1e-9);
  Complex trace = 0.0;
  for (const Complex& l : ours) trace += l;
  EXPECT_LE(std::abs(trace - a.trace()), 1e-6 * std::abs(a.trace()));
}

TEST(Eigenvalues, BackwardErrorOfSampledPairs) {
  const auto s = p1System(10.0);
  const auto a = s.a.toDense();
  const auto ev = denseEigenvalues(a);
  const double anorm = a.norm();
  for (std::size_t k : {std::size_t{0}, ev.size() / 2, ev.size() - 1}) {
    const auto v = inverseIteration(a, ev[k]);
    const Eigen::VectorXcd x = dense::view(v);
    EXPECT_LE((a * x - ev[k] * x).norm() / (anorm * x.norm()), 1e-8);
  }
  double maxImag = 0.0;
  for (const Complex& l : ev) maxImag = std::max(maxImag, std::abs(l.imag()));
  EXPECT_LE(maxImag, 1e-8 * anorm);
}

TEST(Eigenvalues, HessenbergIsSimilar) {
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  dense::DenseMatrix a(12, 12);
  for (Eigen::Index i = 0; i < 12; ++i) {
    for (Eigen::Index j = 0; j < 12; ++j) a(i, j) = {u(rng), u(rng)};
  }
  const auto h = hessenberg(a);
  for (Eigen::Index i = 2; i < 12; ++i) {
    for (Eigen::Index j = 0; j + 1 < i; ++j) EXPECT_EQ(h(i, j), Complex(0.0));
  }
  EXPECT_NEAR(std::abs(h.trace() - a.trace()), 0.0, 1e-12);
  EXPECT_NEAR(h.norm(), a.norm(), 1e-12);
}

TEST(Eigenvalues, RejectsBadInput) {
  EXPECT_THROW(denseEigenvalues(dense::DenseMatrix::Zero(2, 3)), SizeError);
  dense::DenseMatrix bad = dense::DenseMatrix::Identity(2, 2);
  bad(0, 1) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(denseEigenvalues(bad), DomainError);
}

TEST(Materialize, IdentityAndDiagonal) {
  const dense::DenseOperator id(dense::DenseMatrix::Identity(4, 4));
  EXPECT_EQ(materialize(id), dense::DenseMatrix::Identity(4, 4));
  const krylov::FunctionOperator diag(3, [](std::span<const Complex> x, std::span<Complex> y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = static_cast<double>(i + 1) * x[i];
  });
  const auto d = materialize(diag);
  EXPECT_EQ(d(2, 2), Complex(3.0));
  EXPECT_EQ(d(0, 1), Complex(0.0));
  const krylov::FunctionOperator huge(kMaxDenseSize + 1, [](std::span<const Complex>, std::span<Complex>) {});
  EXPECT_THROW(materialize(huge), SizeError);
}

TEST(Materialize, DirectBackendPreconditionerIsDeterministic) {
  const auto p = discretize::problemP1(5.0);
  const auto s = discretize::buildSystem(p, p.gridForH(1.0 / 8), discretize::ElementType::Q1);
  bem::BemSettings settings;
  settings.fmm = fmm::FmmConfig::fromEpsilon(special::KernelId::helmholtz2d(5.0), 1e-6);
  settings.fmm.backend = fmm::Backend::Direct;
  settings.inner.method = bem::InnerSolveSettings::Method::DenseLu;
  const auto m = bem::BemPreconditioner::forSystem(s, settings);
  const sparse::CsrOperator a(s.a);
  EXPECT_EQ(materialize(a, m), materialize(a, m));
}

TEST(SpectrumReport, TrivialCases) {
  const auto ones = spectrumReport({1.0, 1.0, 1.0});
  EXPECT_EQ(ones.nNegativeReal, 0u);
  EXPECT_DOUBLE_EQ(ones.minAbs, 1.0);
  EXPECT_DOUBLE_EQ(ones.clusterRadius, 0.0);
  const auto mixed = spectrumReport({-1.0, 2.0});
  EXPECT_EQ(mixed.nNegativeReal, 1u);
  EXPECT_DOUBLE_EQ(mixed.minAbs, 1.0);
  EXPECT_DOUBLE_EQ(mixed.maxAbs, 2.0);
  EXPECT_DOUBLE_EQ(mixed.clusterRadius, 2.0);
}

TEST(SpectrumReport, NegativeCountGrowsWithWavenumber) {
  const auto low = spectrumReport(denseEigenvalues(p1System(5.0).a.toDense()));
  const auto high = spectrumReport(denseEigenvalues(p1System(40.0).a.toDense()));
  EXPECT_GT(high.nNegativeReal, low.nNegativeReal);
}
