#include <gtest/gtest.h>

#include "helmfmm/special.hpp"

using namespace helmfmm;
using namespace helmfmm::special;

namespace {

// Reference values from tests/oracles/oracles.py (mpmath, 40 digits).
struct BesselCase {
  int n;
  double x;
  double value;
};

const BesselCase kJ[] = {
    {0, 1e-3, 0.999999750000015625},   {0, 0.5, 0.93846980724081290423},  {0, 1, 0.76519768655796655145},
    {0, 2.5, -0.048383776468197996327}, {0, 7.3, 0.28821694763501439904},  {0, 19.9, 0.17287775639261846235},
    {0, 20.1, 0.15953606793729709074},  {0, 35, -0.12684568275631256981},  {0, 100, 0.019985850304223122424},
    {1, 1e-3, 0.00049999993750000261457}, {1, 1, 0.44005058574493351596}, {1, 7.3, 0.082570430493257831051},
    {1, 20.1, 0.082801005760209763489}, {1, 100, -0.077145352014112158033}, {2, 2.5, 0.44605905843961722674},
    {2, 19.9, -0.16784082927629889004}, {5, 0.5, 8.053627241357474086e-6}, {5, 7.3, 0.31370617089730907746},
    {5, 35, -0.0015053072953907044842}, {10, 1, 2.630615123687453207e-10}, {10, 7.3, 0.032111623954048501212},
    {10, 19.9, 0.18259078806620767458}, {10, 100, -0.054732176935472014742},
};

const BesselCase kY[] = {
    {0, 1e-3, -4.4714166113759232557}, {0, 0.5, -0.44451873350670655715}, {0, 1, 0.088256964215676957983},
    {0, 2.5, 0.49807035961523188783},  {0, 19.9, 0.045762094159385478714}, {0, 20.1, 0.078810592428750292646},
    {0, 100, -0.077244313365083152254}, {1, 1e-3, -636.62216723113941482}, {1, 1, -0.78121282130028871655},
    {1, 7.3, -0.28459437186807210845}, {1, 35, 0.12751273354559011719},   {2, 0.5, -5.4413708371742657196},
    {2, 20.1, -0.094494769617587261069}, {5, 1, -260.40586662581222072},   {5, 7.3, 0.1336454913195124951},
};

void expectRelative(double actual, double expected, double tol) {
  EXPECT_LE(std::abs(actual - expected), tol * std::abs(expected)) << "actual " << actual << " expected " << expected;
}

}  // namespace

TEST(Bessel, JMatchesOracle) {
  for (const auto& c : kJ) {
    SCOPED_TRACE(::testing::Message() << "J_" << c.n << "(" << c.x << ")");
    expectRelative(besselJ(c.n, c.x), c.value, 1e-10);
  }
}

TEST(Bessel, YMatchesOracle) {
  for (const auto& c : kY) {
    SCOPED_TRACE(::testing::Message() << "Y_" << c.n << "(" << c.x << ")");
    expectRelative(besselY(c.n, c.x), c.value, 1e-10);
  }
}

TEST(Bessel, ValuesAtOrigin) {
  EXPECT_DOUBLE_EQ(besselJ(0, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(besselJ(1, 0.0), 0.0);
  EXPECT_THROW(besselY(0, 0.0), DomainError);
  EXPECT_THROW(hankel1(0, 0.0), DomainError);
}

TEST(Bessel, HankelCombinesJAndY) {
  const Complex h = hankel1(1, 1.0);
  EXPECT_NEAR(h.real(), 0.44005058574493351596, 1e-12);
  EXPECT_NEAR(h.imag(), -0.78121282130028871655, 1e-12);
  const Complex far = hankel1(0, 50.0);
  EXPECT_NEAR(far.real(), 0.055812327669251815005, 1e-11);
  EXPECT_NEAR(far.imag(), -0.098064995470077079029, 1e-11);
}

TEST(Bessel, Wronskian) {
  for (int n = 0; n <= 16; ++n) {
    for (double x = 0.1; x <= 100.0; x *= 1.37) {
      const double w = besselJ(n, x) * besselY(n + 1, x) - besselJ(n + 1, x) * besselY(n, x);
      const double expected = -2.0 / (kPi * x);
      EXPECT_LE(std::abs(w - expected), 1e-10 * std::abs(expected)) << "n=" << n << " x=" << x;
    }
  }
}

TEST(Bessel, YRecurrence) {
  for (double x : {0.3, 4.0, 15.0, 60.0}) {
    for (int n = 1; n < 10; ++n) {
      const double lhs = besselY(n + 1, x);
      const double rhs = 2.0 * n / x * besselY(n, x) - besselY(n - 1, x);
      EXPECT_LE(std::abs(lhs - rhs), 1e-9 * std::max(1.0, std::abs(lhs)));
    }
  }
}

TEST(Bessel, RangeHelpersAgreeWithScalarCalls) {
  std::vector<double> j(11), y(11);
  besselJRange(10, 3.7, j);
  besselYRange(10, 3.7, y);
  for (int n = 0; n <= 10; ++n) {
    EXPECT_NEAR(j[static_cast<std::size_t>(n)], besselJ(n, 3.7), 1e-13);
    EXPECT_NEAR(y[static_cast<std::size_t>(n)], besselY(n, 3.7), 1e-10 * std::max(1.0, std::abs(y[static_cast<std::size_t>(n)])));
  }
  Complex h0, h1;
  hankel01(2.5, h0, h1);
  EXPECT_NEAR(std::abs(h0 - hankel1(0, 2.5)), 0.0, 1e-13);
  EXPECT_NEAR(std::abs(h1 - hankel1(1, 2.5)), 0.0, 1e-13);
}

TEST(Kernel, HelmholtzGreensAtUnitDistance) {
  const Complex g = greens(KernelId::helmholtz2d(1.0), Vec2{0, 0}, Vec2{1, 0});
  EXPECT_NEAR(g.real(), -0.022064241053919239496, 1e-12);
  EXPECT_NEAR(g.imag(), 0.19129942163949163786, 1e-12);
}

TEST(Kernel, LaplaceKernels) {
  EXPECT_NEAR(greens(KernelId::laplace2d(), Vec2{0, 0}, Vec2{2, 0}).real(), -std::log(2.0) / (2 * kPi), 1e-15);
  const Complex l3 = greens(KernelId::laplace3d(), Vec3{0, 0, 0}, Vec3{0, 0, 2});
  EXPECT_NEAR(l3.real(), 1.0 / (8 * kPi), 1e-15);
  const Complex h3 = greens(KernelId::helmholtz3d(1e-9), Vec3{0, 0, 0}, Vec3{0, 0, 2});
  EXPECT_NEAR(h3.real(), 1.0 / (8 * kPi), 1e-12);
}

TEST(Kernel, CoincidentPointsAreSingular) {
  EXPECT_THROW(greens(KernelId::helmholtz2d(1.0), Vec2{1, 1}, Vec2{1, 1}), SingularError);
  EXPECT_THROW(greens(KernelId::laplace3d(), Vec3{}, Vec3{}), SingularError);
  EXPECT_THROW(greensNormalDeriv(KernelId::laplace2d(), Vec2{}, Vec2{}, Vec2{1, 0}), SingularError);
}

TEST(Kernel, NormalDerivative) {
  const auto k = KernelId::helmholtz2d(1.0);
  // r = source − target = (1, 0).
  const Complex along = greensNormalDeriv(k, Vec2{1, 0}, Vec2{0, 0}, Vec2{1, 0});
  EXPECT_NEAR(along.real(), -0.19530320532507217914, 1e-12);
  EXPECT_NEAR(along.imag(), -0.11001264643623337899, 1e-12);
  const Complex across = greensNormalDeriv(k, Vec2{1, 0}, Vec2{0, 0}, Vec2{0, 1});
  EXPECT_NEAR(std::abs(across), 0.0, 1e-15);
  const Complex flipped = greensNormalDeriv(k, Vec2{1, 0}, Vec2{0, 0}, Vec2{-1, 0});
  EXPECT_NEAR(std::abs(flipped + along), 0.0, 1e-15);
  const Complex l3 = greensNormalDeriv(KernelId::laplace3d(), Vec3{0, 0, 2}, Vec3{0, 0, 0}, Vec3{0, 0, 1});
  EXPECT_NEAR(l3.real(), -1.0 / (16 * kPi), 1e-15);
}

TEST(Kernel, SymmetricInSourceAndTarget) {
  const Vec2 a{0.3, -0.2};
  const Vec2 b{-1.1, 0.7};
  for (const auto& k : {KernelId::laplace2d(), KernelId::helmholtz2d(3.0)}) {
    EXPECT_EQ(greens(k, a, b), greens(k, b, a));
  }
}

TEST(Kernel, HelmholtzNeedsPositiveWavenumber) {
  EXPECT_THROW(KernelId::helmholtz2d(0.0), DomainError);
  EXPECT_EQ(KernelId::forWavenumber2d(0.0).kind(), KernelKind::Laplace2D);
  EXPECT_EQ(KernelId::forWavenumber2d(2.0).kind(), KernelKind::Helmholtz2D);
}

TEST(SingularDiagonal, ClosedForm) {
  // Closed form evaluated directly with γ = 1.781072418.
  const Complex v = singularDiagonal2D(1.0, 0.1);
  EXPECT_NEAR(v.real(), 0.1, 1e-15);
  EXPECT_NEAR(v.imag(), -0.26175664655369236419, 1e-12);
  const Complex one = singularDiagonal2D(4.0 / kExpEulerGamma * std::exp(1.0), 1.0);
  EXPECT_NEAR(one.real(), 1.0, 1e-14);
  EXPECT_NEAR(one.imag(), 0.0, 1e-12);
  EXPECT_THROW(singularDiagonal2D(1.0, 0.0), DomainError);
}

TEST(SingularDiagonal, AgreesWithQuadratureForSmallArguments) {
  // Adaptive quadrature of H0 over (−w/2, w/2), κ = 1, w = 0.1.
  const Complex oracle{0.09997916861969478841, -0.26169769893120183025};
  EXPECT_LE(std::abs(singularDiagonal2D(1.0, 0.1) - oracle), 1e-2 * std::abs(oracle));
}

TEST(SingularDiagonal, SelfIntegralScalesByIOver4) {
  const Complex self = singularSelfIntegral(KernelId::helmholtz2d(1.0), 0.1);
  const Complex expected = Complex(0.0, 0.25) * singularDiagonal2D(1.0, 0.1);
  EXPECT_NEAR(std::abs(self - expected), 0.0, 1e-15);
  EXPECT_NEAR(self.real(), 0.0654391616, 1e-9);
  EXPECT_NEAR(self.imag(), 0.025, 1e-15);
}
