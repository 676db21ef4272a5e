#include "helmfmm/expansion.hpp"

#include <array>
#include <vector>

#include "translation.hpp"

namespace helmfmm::fmm {

namespace detail {

double binomial(int n, int k) {
  constexpr int kSize = 2 * special::kMaxBesselOrder;
  static const std::vector<double> table = [] {
    std::vector<double> t(static_cast<std::size_t>(kSize * kSize), 0.0);
    for (int row = 0; row < kSize; ++row) {
      t[static_cast<std::size_t>(row * kSize)] = 1.0;
      for (int col = 1; col <= row; ++col) {
        t[static_cast<std::size_t>(row * kSize + col)] =
            t[static_cast<std::size_t>((row - 1) * kSize + col - 1)] + t[static_cast<std::size_t>((row - 1) * kSize + col)];
      }
    }
    return t;
  }();
  if (k < 0 || k > n || n >= kSize) return 0.0;
  return table[static_cast<std::size_t>(n * kSize + k)];
}

void regularBasis(double kappa, Vec2 rel, int mmax, Complex* out) {
  const double rho = norm(rel);
  std::array<double, special::kMaxBesselOrder + 2> j{};
  special::besselJRange(mmax, kappa * rho, j);
  const double phi = std::atan2(rel.y, rel.x);
  const Complex step(std::cos(phi), std::sin(phi));
  Complex phase(1.0, 0.0);
  out[mmax] = j[0];
  for (int m = 1; m <= mmax; ++m) {
    phase *= step;
    const Complex f = j[static_cast<std::size_t>(m)] * phase;
    out[mmax + m] = f;
    // F_{−m} = (−1)^m conj(F_m) since J_{−m} = (−1)^m J_m.
    out[mmax - m] = (m % 2 == 0 ? 1.0 : -1.0) * std::conj(f);
  }
}

void helmholtzShift(double kappa, Vec2 d, int kmax, bool singular, Complex* out) {
  const double r = norm(d);
  std::array<double, special::kMaxBesselOrder + 2> j{};
  std::array<double, special::kMaxBesselOrder + 2> y{};
  special::besselJRange(kmax, kappa * r, j);
  if (singular) special::besselYRange(kmax, kappa * r, y);
  const double theta = std::atan2(d.y, d.x);
  const Complex step(std::cos(theta), std::sin(theta));
  Complex phase(1.0, 0.0);
  for (int k = 0; k <= kmax; ++k) {
    const auto uk = static_cast<std::size_t>(k);
    const Complex z = singular ? Complex(j[uk], y[uk]) : Complex(j[uk], 0.0);
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    out[kmax + k] = z * phase;
    out[kmax - k] = sign * z * std::conj(phase);
    phase *= step;
  }
}

void applyShift(const Complex* in, const Complex* shift, int p, Complex* out) {
  const Complex* t = shift + 2 * p;  // t[k] for k ∈ [−2p, 2p]
  for (int n = -p; n <= p; ++n) {
    Complex sum(0.0, 0.0);
    for (int m = -p; m <= p; ++m) sum += in[m + p] * t[m - n];
    out[n + p] += sum;
  }
}

void helmholtzP2M(double kappa, Vec2 rel, const Vec2* normal, Complex charge, int p, Complex* out) {
  std::array<Complex, 2 * special::kMaxBesselOrder + 3> f{};
  if (normal == nullptr) {
    regularBasis(kappa, rel, p, f.data());
    // J_m e^{−imφ} = conj(F_m)
    for (int m = -p; m <= p; ++m) out[m + p] += charge * std::conj(f[static_cast<std::size_t>(m + p)]);
    return;
  }
  const int q = p + 1;
  regularBasis(kappa, rel, q, f.data());
  auto F = [&](int m) { return f[static_cast<std::size_t>(m + q)]; };
  const double half = 0.5 * kappa;
  for (int m = -p; m <= p; ++m) {
    // J_m e^{−imφ} = (−1)^m F_{−m}; differentiate F along the normal.
    const int r = -m;
    const Complex grad = half * (normal->x * (F(r - 1) - F(r + 1)) + Complex(0.0, normal->y) * (F(r + 1) + F(r - 1)));
    out[m + p] += charge * ((m % 2 == 0) ? grad : -grad);
  }
}

void laplaceP2M(Complex rel, const Complex* normal, Complex charge, int p, Complex* out) {
  const Complex relBar = std::conj(rel);
  if (normal == nullptr) {
    out[p] += charge;
    Complex power = 1.0;
    Complex powerBar = 1.0;
    for (int k = 1; k <= p; ++k) {
      power *= rel;
      powerBar *= relBar;
      out[p + k] -= charge * power / static_cast<double>(k);
      out[p - k] -= charge * powerBar / static_cast<double>(k);
    }
    return;
  }
  const Complex n = *normal;
  const Complex nBar = std::conj(n);
  Complex power = 1.0;
  Complex powerBar = 1.0;
  for (int k = 1; k <= p; ++k) {
    out[p + k] -= charge * n * power;
    out[p - k] -= charge * nBar * powerBar;
    power *= rel;
    powerBar *= relBar;
  }
}

namespace {

// Holomorphic half of the Greengard–Rokhlin multipole shift; a[0] is the log
// coefficient and a[k] multiplies z^{−k}.
void m2mHalf(const Complex* a, int p, Complex z0, Complex* b, int stride) {
  std::vector<Complex> powers(static_cast<std::size_t>(p) + 1);
  powers[0] = 1.0;
  for (int i = 1; i <= p; ++i) powers[static_cast<std::size_t>(i)] = powers[static_cast<std::size_t>(i) - 1] * z0;
  for (int l = 1; l <= p; ++l) {
    Complex sum = -a[0] * powers[static_cast<std::size_t>(l)] / static_cast<double>(l);
    for (int k = 1; k <= l; ++k) sum += a[k * stride] * powers[static_cast<std::size_t>(l - k)] * binomial(l - 1, k - 1);
    b[l * stride] += sum;
  }
}

void m2lHalf(const Complex* a, int p, Complex z0, Complex* b, int stride) {
  std::vector<Complex> inversePowers(static_cast<std::size_t>(p) + 1);
  inversePowers[0] = 1.0;
  const Complex inv = 1.0 / z0;
  for (int i = 1; i <= p; ++i) inversePowers[static_cast<std::size_t>(i)] = inversePowers[static_cast<std::size_t>(i) - 1] * inv;
  std::vector<Complex> scaled(static_cast<std::size_t>(p) + 1);
  for (int k = 1; k <= p; ++k) {
    scaled[static_cast<std::size_t>(k)] = ((k % 2 == 0) ? 1.0 : -1.0) * a[k * stride] * inversePowers[static_cast<std::size_t>(k)];
  }
  for (int l = 1; l <= p; ++l) {
    Complex sum = -a[0] / static_cast<double>(l);
    for (int k = 1; k <= p; ++k) sum += scaled[static_cast<std::size_t>(k)] * binomial(l + k - 1, k - 1);
    b[l * stride] += sum * inversePowers[static_cast<std::size_t>(l)];
  }
}

void l2lHalf(const Complex* a, int p, Complex s, Complex* b, int stride) {
  std::vector<Complex> powers(static_cast<std::size_t>(p) + 1);
  powers[0] = 1.0;
  for (int i = 1; i <= p; ++i) powers[static_cast<std::size_t>(i)] = powers[static_cast<std::size_t>(i) - 1] * s;
  for (int j = 1; j <= p; ++j) {
    Complex sum(0.0, 0.0);
    for (int l = j; l <= p; ++l) sum += a[l * stride] * binomial(l, j) * powers[static_cast<std::size_t>(l - j)];
    b[j * stride] += sum;
  }
}

}  // namespace

void laplaceM2M(const Complex* in, int p, Complex childMinusParent, Complex* out) {
  const Complex* center = in + p;
  Complex* target = out + p;
  target[0] += center[0];
  // Each half carries ½M_0 log and ½M_k; the shift is linear, so the common
  // factor ½ drops out and M_0, M_k enter unscaled.
  std::vector<Complex> a(static_cast<std::size_t>(p) + 1);
  a[0] = center[0];
  for (int k = 1; k <= p; ++k) a[static_cast<std::size_t>(k)] = center[k];
  m2mHalf(a.data(), p, childMinusParent, target, 1);
  for (int k = 1; k <= p; ++k) a[static_cast<std::size_t>(k)] = center[-k];
  std::vector<Complex> b(static_cast<std::size_t>(p) + 1);
  m2mHalf(a.data(), p, std::conj(childMinusParent), b.data(), 1);
  for (int k = 1; k <= p; ++k) target[-k] += b[static_cast<std::size_t>(k)];
}

void laplaceM2L(const Complex* in, int p, Complex sourceMinusTarget, Complex* out) {
  const Complex* center = in + p;
  Complex* target = out + p;
  const Complex z0 = sourceMinusTarget;
  const Complex z0Bar = std::conj(z0);
  Complex constant = center[0] * std::log(std::abs(z0));
  Complex inv = 1.0;
  Complex invBar = 1.0;
  Complex tail(0.0, 0.0);
  for (int k = 1; k <= p; ++k) {
    inv /= z0;
    invBar /= z0Bar;
    tail += ((k % 2 == 0) ? 1.0 : -1.0) * (center[k] * inv + center[-k] * invBar);
  }
  target[0] += constant + 0.5 * tail;

  std::vector<Complex> a(static_cast<std::size_t>(p) + 1);
  a[0] = center[0];
  for (int k = 1; k <= p; ++k) a[static_cast<std::size_t>(k)] = center[k];
  m2lHalf(a.data(), p, z0, target, 1);
  for (int k = 1; k <= p; ++k) a[static_cast<std::size_t>(k)] = center[-k];
  std::vector<Complex> b(static_cast<std::size_t>(p) + 1);
  m2lHalf(a.data(), p, z0Bar, b.data(), 1);
  for (int k = 1; k <= p; ++k) target[-k] += b[static_cast<std::size_t>(k)];
}

void laplaceL2L(const Complex* in, int p, Complex newMinusOld, Complex* out) {
  const Complex* center = in + p;
  Complex* target = out + p;
  const Complex s = newMinusOld;
  const Complex sBar = std::conj(s);
  Complex power = 1.0;
  Complex powerBar = 1.0;
  Complex tail(0.0, 0.0);
  for (int l = 1; l <= p; ++l) {
    power *= s;
    powerBar *= sBar;
    tail += center[l] * power + center[-l] * powerBar;
  }
  target[0] += center[0] + 0.5 * tail;

  std::vector<Complex> a(static_cast<std::size_t>(p) + 1);
  for (int l = 1; l <= p; ++l) a[static_cast<std::size_t>(l)] = center[l];
  l2lHalf(a.data(), p, s, target, 1);
  for (int l = 1; l <= p; ++l) a[static_cast<std::size_t>(l)] = center[-l];
  std::vector<Complex> b(static_cast<std::size_t>(p) + 1);
  l2lHalf(a.data(), p, sBar, b.data(), 1);
  for (int l = 1; l <= p; ++l) target[-l] += b[static_cast<std::size_t>(l)];
}

Complex laplaceLocalSeries(const Complex* local, int p, Complex rel) {
  const Complex* center = local + p;
  const Complex relBar = std::conj(rel);
  Complex power = 1.0;
  Complex powerBar = 1.0;
  Complex tail(0.0, 0.0);
  for (int l = 1; l <= p; ++l) {
    power *= rel;
    powerBar *= relBar;
    tail += center[l] * power + center[-l] * powerBar;
  }
  return center[0] + 0.5 * tail;
}

Complex laplaceMultipoleSeries(const Complex* multipole, int p, Complex rel) {
  const Complex* center = multipole + p;
  const Complex inv = 1.0 / rel;
  const Complex invBar = std::conj(inv);
  Complex power = 1.0;
  Complex powerBar = 1.0;
  Complex tail(0.0, 0.0);
  for (int k = 1; k <= p; ++k) {
    power *= inv;
    powerBar *= invBar;
    tail += center[k] * power + center[-k] * powerBar;
  }
  return center[0] * std::log(std::abs(rel)) + 0.5 * tail;
}

}  // namespace detail

namespace {

constexpr int kMaxOrder = special::kMaxBesselOrder / 2 - 1;

void checkKernel(const KernelId& kernel, int order) {
  if (!kernel.is2d()) throw DomainError("expansions are available for 2D kernels only");
  if (order < 1 || order > kMaxOrder) throw DomainError("expansion order out of range [1, 31]");
}

const Complex kHelmholtzPrefactor(0.0, 0.25);
const double kLaplacePrefactor = -1.0 / (2.0 * kPi);

}  // namespace

Expansion Expansion::zero(const KernelId& kernel, int order, ExpansionKind kind, Vec2 center) {
  checkKernel(kernel, order);
  return Expansion{kernel, order, kind, center, CVector(static_cast<std::size_t>(2 * order + 1))};
}

Expansion p2m(const KernelId& kernel, int order, Vec2 center, std::span<const Vec2> sources,
              std::span<const Complex> charges) {
  if (sources.size() != charges.size()) throw SizeError("p2m: sources and charges differ in length");
  Expansion result = Expansion::zero(kernel, order, ExpansionKind::Multipole, center);
  for (std::size_t i = 0; i < sources.size(); ++i) {
    if (kernel.kind() == special::KernelKind::Helmholtz2D) {
      detail::helmholtzP2M(kernel.kappa(), sources[i] - center, nullptr, charges[i], order, result.coeffs.data());
    } else {
      detail::laplaceP2M(toComplex(sources[i] - center), nullptr, charges[i], order, result.coeffs.data());
    }
  }
  return result;
}

Expansion p2mDipole(const KernelId& kernel, int order, Vec2 center, std::span<const Vec2> sources,
                    std::span<const Vec2> normals, std::span<const Complex> charges) {
  if (sources.size() != charges.size() || sources.size() != normals.size()) {
    throw SizeError("p2mDipole: sources, normals and charges differ in length");
  }
  Expansion result = Expansion::zero(kernel, order, ExpansionKind::Multipole, center);
  for (std::size_t i = 0; i < sources.size(); ++i) {
    if (kernel.kind() == special::KernelKind::Helmholtz2D) {
      detail::helmholtzP2M(kernel.kappa(), sources[i] - center, &normals[i], charges[i], order, result.coeffs.data());
    } else {
      const Complex n = toComplex(normals[i]);
      detail::laplaceP2M(toComplex(sources[i] - center), &n, charges[i], order, result.coeffs.data());
    }
  }
  return result;
}

Expansion m2m(const Expansion& child, Vec2 parentCenter) {
  if (child.kind != ExpansionKind::Multipole) throw DomainError("m2m expects a multipole expansion");
  Expansion result = Expansion::zero(child.kernel, child.order, ExpansionKind::Multipole, parentCenter);
  const int p = child.order;
  if (child.kernel.kind() == special::KernelKind::Helmholtz2D) {
    std::vector<Complex> shift(static_cast<std::size_t>(4 * p + 1));
    detail::helmholtzShift(child.kernel.kappa(), parentCenter - child.center, 2 * p, false, shift.data());
    detail::applyShift(child.coeffs.data(), shift.data(), p, result.coeffs.data());
  } else {
    detail::laplaceM2M(child.coeffs.data(), p, toComplex(child.center - parentCenter), result.coeffs.data());
  }
  return result;
}

Expansion m2l(const Expansion& multipole, Vec2 targetCenter) {
  if (multipole.kind != ExpansionKind::Multipole) throw DomainError("m2l expects a multipole expansion");
  if (multipole.center == targetCenter) throw SingularError("m2l: coincident source and target centers");
  Expansion result = Expansion::zero(multipole.kernel, multipole.order, ExpansionKind::Local, targetCenter);
  const int p = multipole.order;
  if (multipole.kernel.kind() == special::KernelKind::Helmholtz2D) {
    std::vector<Complex> shift(static_cast<std::size_t>(4 * p + 1));
    detail::helmholtzShift(multipole.kernel.kappa(), targetCenter - multipole.center, 2 * p, true, shift.data());
    detail::applyShift(multipole.coeffs.data(), shift.data(), p, result.coeffs.data());
  } else {
    detail::laplaceM2L(multipole.coeffs.data(), p, toComplex(multipole.center - targetCenter), result.coeffs.data());
  }
  return result;
}

Expansion l2l(const Expansion& parent, Vec2 childCenter) {
  if (parent.kind != ExpansionKind::Local) throw DomainError("l2l expects a local expansion");
  Expansion result = Expansion::zero(parent.kernel, parent.order, ExpansionKind::Local, childCenter);
  const int p = parent.order;
  if (parent.kernel.kind() == special::KernelKind::Helmholtz2D) {
    std::vector<Complex> shift(static_cast<std::size_t>(4 * p + 1));
    detail::helmholtzShift(parent.kernel.kappa(), childCenter - parent.center, 2 * p, false, shift.data());
    detail::applyShift(parent.coeffs.data(), shift.data(), p, result.coeffs.data());
  } else {
    detail::laplaceL2L(parent.coeffs.data(), p, toComplex(childCenter - parent.center), result.coeffs.data());
  }
  return result;
}

CVector l2p(const Expansion& local, std::span<const Vec2> targets) {
  if (local.kind != ExpansionKind::Local) throw DomainError("l2p expects a local expansion");
  const int p = local.order;
  CVector out(targets.size());
  std::vector<Complex> basis(static_cast<std::size_t>(2 * p + 1));
  for (std::size_t j = 0; j < targets.size(); ++j) {
    if (local.kernel.kind() == special::KernelKind::Helmholtz2D) {
      detail::regularBasis(local.kernel.kappa(), targets[j] - local.center, p, basis.data());
      Complex sum(0.0, 0.0);
      for (std::size_t m = 0; m < basis.size(); ++m) sum += local.coeffs[m] * basis[m];
      out[j] = kHelmholtzPrefactor * sum;
    } else {
      out[j] = kLaplacePrefactor * detail::laplaceLocalSeries(local.coeffs.data(), p, toComplex(targets[j] - local.center));
    }
  }
  return out;
}

Complex m2p(const Expansion& multipole, Vec2 target) {
  if (multipole.kind != ExpansionKind::Multipole) throw DomainError("m2p expects a multipole expansion");
  const int p = multipole.order;
  const Vec2 rel = target - multipole.center;
  if (norm(rel) == 0.0) throw SingularError("m2p: target at the expansion center");
  if (multipole.kernel.kind() == special::KernelKind::Laplace2D) {
    return kLaplacePrefactor * detail::laplaceMultipoleSeries(multipole.coeffs.data(), p, toComplex(rel));
  }
  std::vector<Complex> shift(static_cast<std::size_t>(2 * p + 1));
  detail::helmholtzShift(multipole.kernel.kappa(), rel, p, true, shift.data());
  Complex sum(0.0, 0.0);
  for (int m = -p; m <= p; ++m) sum += multipole[m] * shift[static_cast<std::size_t>(m + p)];
  return kHelmholtzPrefactor * sum;
}

void p2p(const KernelId& kernel, std::span<const Vec2> sources, std::span<const Complex> charges,
         std::span<const Vec2> targets, std::span<Complex> out) {
  if (sources.size() != charges.size() || out.size() != targets.size()) throw SizeError("p2p: length mismatch");
  for (std::size_t j = 0; j < targets.size(); ++j) {
    Complex sum(0.0, 0.0);
    for (std::size_t i = 0; i < sources.size(); ++i) {
      if (sources[i] == targets[j]) continue;
      sum += charges[i] * special::greens(kernel, sources[i], targets[j]);
    }
    out[j] += sum;
  }
}

void p2pDipole(const KernelId& kernel, std::span<const Vec2> sources, std::span<const Vec2> normals,
               std::span<const Complex> charges, std::span<const Vec2> targets, std::span<Complex> out) {
  if (sources.size() != charges.size() || sources.size() != normals.size() || out.size() != targets.size()) {
    throw SizeError("p2pDipole: length mismatch");
  }
  for (std::size_t j = 0; j < targets.size(); ++j) {
    Complex sum(0.0, 0.0);
    for (std::size_t i = 0; i < sources.size(); ++i) {
      if (sources[i] == targets[j]) continue;
      sum += charges[i] * special::greensNormalDeriv(kernel, sources[i], targets[j], normals[i]);
    }
    out[j] += sum;
  }
}

}  // namespace helmfmm::fmm
