#include <gtest/gtest.h>

#include <chrono>
#include <random>

#include "helmfmm/expansion.hpp"
#include "helmfmm/fmm.hpp"

using namespace helmfmm;
using namespace helmfmm::fmm;

namespace {

struct Instance {
  std::vector<Vec2> points;
  CVector charges;
};

Instance randomInstance(std::size_t n, unsigned seed, double lo = 0.0, double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  std::uniform_real_distribution<double> c(-1.0, 1.0);
  Instance in;
  in.points.resize(n);
  in.charges.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    in.points[i] = {u(rng), u(rng)};
    in.charges[i] = {c(rng), c(rng)};
  }
  return in;
}

double relErr(const CVector& a, const CVector& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a[i] - b[i]);
    den += std::norm(b[i]);
  }
  return std::sqrt(num / den);
}

Complex direct(const KernelId& k, const Instance& in, Vec2 target) {
  Complex s = 0.0;
  for (std::size_t i = 0; i < in.points.size(); ++i) s += in.charges[i] * special::greens(k, in.points[i], target);
  return s;
}

FmmConfig config(const KernelId& k, int p, double theta = 0.4) {
  FmmConfig c;
  c.kernel = k;
  c.p = p;
  c.theta = theta;
  return c;
}

}  // namespace

TEST(AccuracyToOrder, DesignRule) {
  EXPECT_EQ(accuracyToOrder(1e-6), 6);
  EXPECT_EQ(accuracyToOrder(1e-4), 4);
  EXPECT_EQ(accuracyToOrder(1e-2), 2);
  EXPECT_EQ(accuracyToOrder(0.5), 1);
  EXPECT_THROW(accuracyToOrder(1.0), DomainError);
  EXPECT_THROW(accuracyToOrder(1e-13), DomainError);
}

TEST(FmmConfig, EpsilonMustMatchOrder) {
  auto c = FmmConfig::fromEpsilon(KernelId::helmholtz2d(1.0), 1e-4);
  EXPECT_EQ(c.p, 4);
  EXPECT_NO_THROW(c.validate());
  c.p = 6;
  EXPECT_THROW(c.validate(), DomainError);
  c.epsilon.reset();
  c.theta = 0.0;
  EXPECT_THROW(c.validate(), DomainError);
}

TEST(Expansion, UnitChargeAtCenter) {
  const std::vector<Vec2> src{{0.5, 0.5}};
  const CVector w{1.0};
  const auto m = p2m(KernelId::helmholtz2d(3.0), 6, Vec2{0.5, 0.5}, src, w);
  ASSERT_EQ(m.coeffs.size(), 13u);
  EXPECT_NEAR(std::abs(m[0] - 1.0), 0.0, 1e-15);
  for (int k = -6; k <= 6; ++k) {
    if (k != 0) EXPECT_EQ(m[k], Complex(0.0));
  }
}

TEST(Expansion, ZeroChargesGiveZeroExpansions) {
  const auto in = randomInstance(8, 1);
  const CVector zero(8, 0.0);
  for (const auto& k : {KernelId::laplace2d(), KernelId::helmholtz2d(2.0)}) {
    const auto m = p2m(k, 5, Vec2{0.5, 0.5}, in.points, zero);
    const auto shifted = m2m(m, Vec2{0.0, 0.0});
    const auto local = m2l(shifted, Vec2{5.0, 5.0});
    const auto moved = l2l(local, Vec2{5.1, 4.9});
    for (const auto* e : {&m, &shifted, &local, &moved}) {
      for (const Complex& c : e->coeffs) EXPECT_EQ(c, Complex(0.0));
    }
    const std::vector<Vec2> t{{5.1, 4.95}};
    EXPECT_EQ(l2p(moved, t)[0], Complex(0.0));
  }
}

TEST(Expansion, ZeroShiftIsIdentity) {
  const auto in = randomInstance(10, 2, 0.4, 0.6);
  for (const auto& k : {KernelId::laplace2d(), KernelId::helmholtz2d(2.0)}) {
    const auto m = p2m(k, 8, Vec2{0.5, 0.5}, in.points, in.charges);
    const auto same = m2m(m, Vec2{0.5, 0.5});
    for (std::size_t i = 0; i < m.coeffs.size(); ++i) EXPECT_NEAR(std::abs(same.coeffs[i] - m.coeffs[i]), 0.0, 1e-14);
    const auto local = m2l(m, Vec2{3.0, 0.5});
    const auto lsame = l2l(local, Vec2{3.0, 0.5});
    for (std::size_t i = 0; i < local.coeffs.size(); ++i)
      EXPECT_NEAR(std::abs(lsame.coeffs[i] - local.coeffs[i]), 0.0, 1e-14 * std::abs(local.coeffs[i]) + 1e-16);
  }
}

TEST(Expansion, MultipoleMatchesDirectSumInFarField) {
  const double radius = 0.1 * std::sqrt(2.0);
  const auto in = randomInstance(10, 3, 0.4, 0.6);
  for (const auto& k : {KernelId::laplace2d(), KernelId::helmholtz2d(1.0), KernelId::helmholtz2d(5.0)}) {
    const auto m = p2m(k, 8, Vec2{0.5, 0.5}, in.points, in.charges);
    for (double angle : {0.0, 1.0, 2.5, 4.0}) {
      const Vec2 t{0.5 + 4 * radius * std::cos(angle), 0.5 + 4 * radius * std::sin(angle)};
      const Complex exact = direct(k, in, t);
      EXPECT_LE(std::abs(m2p(m, t) - exact), 1e-6 * std::abs(exact)) << special::toString(k);
    }
  }
}

TEST(Expansion, M2mPreservesFarField) {
  // Child of half-width 0.1 centered at (0.1, 0.1), shifted by its half-width
  // to the parent center.
  const auto in = randomInstance(10, 4, 0.0, 0.2);
  const Vec2 child{0.1, 0.1};
  const Vec2 parent{0.0, 0.2};
  const double parentRadius = 0.2 * std::sqrt(2.0);
  for (const auto& k : {KernelId::laplace2d(), KernelId::helmholtz2d(3.0)}) {
    const auto m = p2m(k, 8, child, in.points, in.charges);
    const auto moved = m2m(m, parent);
    for (double angle : {0.3, 1.9, 3.3, 5.0}) {
      const Vec2 t{parent.x + 5 * parentRadius * std::cos(angle), parent.y + 5 * parentRadius * std::sin(angle)};
      const Complex before = m2p(m, t);
      EXPECT_LE(std::abs(m2p(moved, t) - before), 1e-6 * std::abs(before));
    }
  }
}

TEST(Expansion, M2lReproducesDistantSource) {
  const std::vector<Vec2> src{{0.07, -0.04}};
  const CVector w{1.0};
  const Vec2 target{2.0, 0.3};
  for (int p : {4, 6, 8}) {
    for (const auto& k : {KernelId::laplace2d(), KernelId::helmholtz2d(1.0)}) {
      const auto local = m2l(p2m(k, p, Vec2{0, 0}, src, w), target);
      const std::vector<Vec2> t{target};
      const Complex exact = special::greens(k, src[0], target);
      EXPECT_LE(std::abs(l2p(local, t)[0] - exact), std::pow(10.0, 1 - p) * std::abs(exact))
          << "p=" << p << " " << special::toString(k);
    }
  }
}

TEST(Expansion, L2lPreservesLocalField) {
  const auto far = randomInstance(6, 5, 3.0, 3.5);
  const Vec2 parent{0.5, 0.5};
  const Vec2 child{0.55, 0.45};
  for (const auto& k : {KernelId::laplace2d(), KernelId::helmholtz2d(2.0)}) {
    Expansion local = Expansion::zero(k, 8, ExpansionKind::Local, parent);
    for (std::size_t i = 0; i < far.points.size(); ++i) {
      const std::vector<Vec2> one{far.points[i]};
      const CVector w{far.charges[i]};
      const Vec2 c = far.points[i];
      const auto contribution = m2l(p2m(k, 8, c, one, w), parent);
      for (std::size_t j = 0; j < local.coeffs.size(); ++j) local.coeffs[j] += contribution.coeffs[j];
    }
    const auto moved = l2l(local, child);
    const std::vector<Vec2> probes{{0.56, 0.44}, {0.52, 0.47}, {0.58, 0.43}};
    const auto before = l2p(local, probes);
    const auto after = l2p(moved, probes);
    for (std::size_t i = 0; i < probes.size(); ++i) EXPECT_LE(std::abs(after[i] - before[i]), 1e-8 * std::abs(before[i]));
  }
}

TEST(Expansion, L2pMatchesTermByTermSum) {
  const auto k = KernelId::helmholtz2d(4.0);
  Expansion local = Expansion::zero(k, 5, ExpansionKind::Local, Vec2{1.0, 2.0});
  std::mt19937 rng(6);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (auto& c : local.coeffs) c = {u(rng), u(rng)};
  const std::vector<Vec2> t{{1.05, 2.02}, {0.97, 1.93}, {1.0, 2.0}};
  const auto got = l2p(local, t);
  for (std::size_t j = 0; j < t.size(); ++j) {
    const Vec2 d = t[j] - local.center;
    const double rho = norm(d);
    const double phi = std::atan2(d.y, d.x);
    Complex sum = 0.0;
    for (int m = -5; m <= 5; ++m) {
      // J_{−m} = (−1)^m J_m
      const double jm = (m < 0 && (-m) % 2 == 1 ? -1.0 : 1.0) * special::besselJ(std::abs(m), 4.0 * rho);
      sum += local[m] * jm * std::exp(Complex(0.0, m * phi));
    }
    sum *= Complex(0.0, 0.25);
    EXPECT_NEAR(std::abs(got[j] - sum), 0.0, 1e-13 * std::max(1.0, std::abs(sum)));
  }
  // At the center only L_0 survives.
  EXPECT_NEAR(std::abs(got[2] - Complex(0.0, 0.25) * local[0]), 0.0, 1e-15);
}

TEST(P2p, UnitSourceAtUnitDistance) {
  const std::vector<Vec2> s{{0.0, 0.0}};
  const std::vector<Vec2> t{{1.0, 0.0}};
  const CVector w{1.0};
  CVector out(1, 0.0);
  p2p(KernelId::helmholtz2d(1.0), s, w, t, out);
  EXPECT_NEAR(out[0].real(), -0.022064241053919239496, 1e-12);
  EXPECT_NEAR(out[0].imag(), 0.19129942163949163786, 1e-12);
}

TEST(P2p, SkipsCoincidentPair) {
  const std::vector<Vec2> s{{0.3, 0.3}};
  const CVector w{1.0};
  CVector out(1, 0.0);
  p2p(KernelId::helmholtz2d(1.0), s, w, s, out);
  EXPECT_EQ(out[0], Complex(0.0));
}

TEST(P2p, MatchesDenseKernelMatrix) {
  const auto src = randomInstance(50, 7);
  const auto tgt = randomInstance(50, 8);
  const auto k = KernelId::helmholtz2d(6.0);
  CVector out(50, 0.0);
  p2p(k, src.points, src.charges, tgt.points, out);
  for (std::size_t j = 0; j < 50; ++j) {
    Complex s = 0.0;
    for (std::size_t i = 0; i < 50; ++i) s += src.charges[i] * special::greens(k, src.points[i], tgt.points[j]);
    EXPECT_NEAR(std::abs(out[j] - s), 0.0, 1e-14 * std::abs(s));
  }
}

TEST(Evaluate, HelmholtzAccuracyAtDefaultSettings) {
  const auto in = randomInstance(2000, 42);
  const auto k = KernelId::helmholtz2d(10.0);
  auto c = config(k, 6);
  const auto approx = evaluate(in.points, in.charges, in.points, c);
  c.backend = Backend::Direct;
  const auto exact = evaluate(in.points, in.charges, in.points, c);
  EXPECT_LE(relErr(approx, exact), 1e-5);
  auto c2 = config(k, 2);
  EXPECT_GT(relErr(evaluate(in.points, in.charges, in.points, c2), exact), relErr(approx, exact));
}

TEST(Evaluate, ErrorDecreasesWithOrder) {
  const auto in = randomInstance(500, 13);
  for (double kappa : {1.0, 10.0}) {
    const auto k = KernelId::helmholtz2d(kappa);
    auto d = config(k, 2);
    d.backend = Backend::Direct;
    const auto exact = evaluate(in.points, in.charges, in.points, d);
    double previous = 1e300;
    for (int p : {2, 4, 6, 8}) {
      const double err = relErr(evaluate(in.points, in.charges, in.points, config(k, p)), exact);
      EXPECT_LE(err, previous) << "kappa=" << kappa << " p=" << p;
      EXPECT_LT(err, std::pow(10.0, 1 - p)) << "kappa=" << kappa << " p=" << p;
      previous = err;
    }
  }
}

TEST(Evaluate, ZeroChargesGiveZeroPotential) {
  const auto in = randomInstance(300, 14);
  const CVector zero(300, 0.0);
  for (const Complex& v : evaluate(in.points, zero, in.points, config(KernelId::helmholtz2d(3.0), 6)))
    EXPECT_EQ(v, Complex(0.0));
}

TEST(Evaluate, Linearity) {
  const auto a = randomInstance(400, 15);
  const auto b = randomInstance(400, 16);
  const Complex alpha{0.7, -1.3};
  const Complex beta{-2.0, 0.4};
  for (Backend backend : {Backend::Fmm, Backend::Direct}) {
    auto c = config(KernelId::helmholtz2d(5.0), 6);
    c.backend = backend;
    FmmPlan plan(a.points, a.points, c);
    CVector mix(400);
    for (std::size_t i = 0; i < 400; ++i) mix[i] = alpha * a.charges[i] + beta * b.charges[i];
    const auto ua = plan.evaluate(a.charges);
    const auto ub = plan.evaluate(b.charges);
    const auto um = plan.evaluate(mix);
    CVector combined(400);
    for (std::size_t i = 0; i < 400; ++i) combined[i] = alpha * ua[i] + beta * ub[i];
    EXPECT_LE(relErr(um, combined), 1e-12) << toString(backend);
  }
}

TEST(Evaluate, SmallThetaAgreesWithDirect) {
  const auto in = randomInstance(300, 17);
  for (const auto& k : {KernelId::laplace2d(), KernelId::helmholtz2d(8.0)}) {
    auto c = config(k, 6, 1e-3);
    const auto near = evaluate(in.points, in.charges, in.points, c);
    c.backend = Backend::Direct;
    EXPECT_LE(relErr(near, evaluate(in.points, in.charges, in.points, c)), 1e-12);
  }
}

TEST(Evaluate, DipolesMatchDirect) {
  const auto in = randomInstance(600, 18);
  std::vector<Vec2> normals(600);
  for (std::size_t i = 0; i < 600; ++i) {
    const double a = 0.37 * static_cast<double>(i);
    normals[i] = {std::cos(a), std::sin(a)};
  }
  auto c = config(KernelId::helmholtz2d(10.0), 6);
  const auto approx = evaluateDipole(in.points, normals, in.charges, in.points, c);
  c.backend = Backend::Direct;
  EXPECT_LE(relErr(approx, evaluateDipole(in.points, normals, in.charges, in.points, c)), 1e-4);
}

TEST(Evaluate, DeterministicAcrossCalls) {
  const auto in = randomInstance(800, 19);
  const auto c = config(KernelId::helmholtz2d(4.0), 6);
  EXPECT_EQ(evaluate(in.points, in.charges, in.points, c), evaluate(in.points, in.charges, in.points, c));
}

TEST(Evaluate, ThreeDimensionalKernelsNeedDirectBackend) {
  const std::vector<Vec3> pts{{0, 0, 0}, {1, 0, 0}};
  const CVector w{1.0, 1.0};
  FmmConfig c;
  c.kernel = KernelId::laplace3d();
  c.backend = Backend::Direct;
  const auto u = evaluate(pts, w, pts, c);
  EXPECT_NEAR(u[0].real(), 1.0 / (4 * kPi), 1e-15);
  c.backend = Backend::Fmm;
  EXPECT_THROW(evaluate(pts, w, pts, c), DomainError);
}

TEST(Evaluate, RoughlyNLogNScaling) {
  const auto k = KernelId::helmholtz2d(10.0);
  auto timeFor = [&](std::size_t n) {
    const auto in = randomInstance(n, static_cast<unsigned>(n));
    double best = 1e300;
    for (int rep = 0; rep < 2; ++rep) {
      const auto start = std::chrono::steady_clock::now();
      evaluate(in.points, in.charges, in.points, config(k, 6));
      best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    }
    return best;
  };
  const double t14 = timeFor(1u << 14);
  const double t15 = timeFor(1u << 15);
  const double t16 = timeFor(1u << 16);
  EXPECT_LE(t15 / t14, 2.6);
  EXPECT_LE(t16 / t15, 2.6);
}
