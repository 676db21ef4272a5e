#include "helmfmm/special.hpp"

#include <algorithm>
#include <limits>
#include <sstream>
#include <vector>

namespace helmfmm::special {

namespace {

constexpr double kEulerGamma = 0.57721566490153286060651209;
// Power series below this argument, Hankel asymptotics above. The series is
// summed in extended precision so the cancellation near the switch point
// stays below 1e-11.
constexpr double kSeriesLimit = 20.0;

void checkOrder(int n) {
  if (n < 0 || n > kMaxBesselOrder) {
    throw DomainError("Bessel order out of range [0, 64]: " + std::to_string(n));
  }
}

// J_n(x) = (x/2)^n Σ (−x²/4)^k / (k!(n+k)!)
long double seriesJ(int n, long double x) {
  const long double q = -0.25L * x * x;
  long double term = 1.0L;
  long double sum = 1.0L;
  for (int k = 1; k < 2000; ++k) {
    term *= q / (static_cast<long double>(k) * static_cast<long double>(n + k));
    sum += term;
    if (std::fabs(term) <= 1e-21L * std::fabs(sum) &&
        static_cast<long double>(k) * (n + k) > -q) {
      break;
    }
  }
  const long double logPrefactor = n * std::log(0.5L * x) - std::lgamma(static_cast<long double>(n) + 1.0L);
  return sum * std::exp(logPrefactor);
}

// Joint series for J0, J1, Y0, Y1 sharing the power terms.
template <typename Real>
void seriesJY01(Real x, Real& j0, Real& j1, Real& y0, Real& y1) {
  const Real t = Real(0.25) * x * x;
  const Real pi = static_cast<Real>(kPi);
  const Real gamma = static_cast<Real>(kEulerGamma);
  Real term = 1;  // (−t)^k / (k!)²
  Real harmonic = 0;
  Real sumJ0 = 1;
  Real sumJ1 = 1;                                  // Σ u_k, u_k = term_k/(k+1)
  Real sumY0 = 0;                                  // Σ H_k term_k
  Real sumY1 = 1;                                  // Σ (2H_k + 1/(k+1)) u_k, k=0 term is 1
  const Real eps = std::numeric_limits<Real>::epsilon() * Real(1e-2);
  for (int k = 1; k < 500; ++k) {
    term *= -t / (Real(k) * Real(k));
    harmonic += Real(1) / Real(k);
    const Real u = term / Real(k + 1);
    sumJ0 += term;
    sumJ1 += u;
    sumY0 += harmonic * term;
    sumY1 += (Real(2) * harmonic + Real(1) / Real(k + 1)) * u;
    if (std::fabs(term) * (harmonic + 1) < eps && Real(k) * Real(k) > t) break;
  }
  const Real half = Real(0.5) * x;
  const Real logTerm = std::log(half) + gamma;
  j0 = sumJ0;
  j1 = half * sumJ1;
  y0 = (Real(2) / pi) * (logTerm * j0 - sumY0);
  y1 = -Real(2) / (pi * x) + (Real(2) / pi) * logTerm * j1 - half * sumY1 / pi;
}

// Hankel's asymptotic expansion with the phase χ = x − (ν/2 + 1/4)π,
// truncated at the smallest term.
void asymptoticJY(int nu, double x, double& j, double& y) {
  const double mu = 4.0 * nu * nu;
  const double eightX = 8.0 * x;
  double p = 1.0;
  double q = 0.0;
  double term = 1.0;
  double previous = std::numeric_limits<double>::infinity();
  for (int k = 1; k < 200; ++k) {
    const double odd = 2.0 * k - 1.0;
    const double next = term * (mu - odd * odd) / (k * eightX);
    if (std::abs(next) >= previous) break;
    term = next;
    previous = std::abs(term);
    const double sign = ((k / 2) % 2 == 0) ? 1.0 : -1.0;
    if (k % 2 == 0) {
      p += sign * term;
    } else {
      q += sign * term;
    }
    if (previous < 1e-18) break;
  }
  const double chi = x - (0.5 * nu + 0.25) * kPi;
  const double amplitude = std::sqrt(2.0 / (kPi * x));
  const double c = std::cos(chi);
  const double s = std::sin(chi);
  j = amplitude * (p * c - q * s);
  y = amplitude * (p * s + q * c);
}

void jy01(double x, double& j0, double& j1, double& y0, double& y1) {
  if (x <= kSeriesLimit) {
    long double lj0, lj1, ly0, ly1;
    seriesJY01<long double>(x, lj0, lj1, ly0, ly1);
    j0 = static_cast<double>(lj0);
    j1 = static_cast<double>(lj1);
    y0 = static_cast<double>(ly0);
    y1 = static_cast<double>(ly1);
  } else {
    asymptoticJY(0, x, j0, y0);
    asymptoticJY(1, x, j1, y1);
  }
}

// Downward recurrence from well above max(n, x), normalized with
// 1 = J0 + 2 Σ J_2k.
void millerJ(int nmax, double x, std::span<double> out) {
  const int top = std::max(nmax, static_cast<int>(std::ceil(x)));
  int start = top + 16 + static_cast<int>(4.0 * std::sqrt(static_cast<double>(top)));
  start += start % 2;
  std::vector<double> values(static_cast<std::size_t>(start) + 2, 0.0);
  values[static_cast<std::size_t>(start)] = 1e-30;
  double sum = 0.0;
  constexpr double kBig = 1e250;
  for (int k = start; k >= 1; --k) {
    const auto uk = static_cast<std::size_t>(k);
    values[uk - 1] = (2.0 * k / x) * values[uk] - values[uk + 1];
    if (k % 2 == 0) sum += 2.0 * values[uk];
    if (std::abs(values[uk - 1]) > kBig) {
      for (std::size_t i = uk - 1; i < values.size(); ++i) values[i] /= kBig;
      sum /= kBig;
    }
  }
  sum += values[0];
  for (int k = 0; k <= nmax; ++k) out[static_cast<std::size_t>(k)] = values[static_cast<std::size_t>(k)] / sum;
}

}  // namespace

KernelId KernelId::helmholtz2d(double kappa) {
  if (!(kappa > 0.0) || !std::isfinite(kappa)) {
    throw DomainError("Helmholtz2D kernel requires a finite wavenumber > 0");
  }
  return {KernelKind::Helmholtz2D, kappa};
}

KernelId KernelId::helmholtz3d(double kappa) {
  if (!(kappa > 0.0) || !std::isfinite(kappa)) {
    throw DomainError("Helmholtz3D kernel requires a finite wavenumber > 0");
  }
  return {KernelKind::Helmholtz3D, kappa};
}

KernelId KernelId::forWavenumber2d(double kappa) {
  if (kappa < 0.0 || !std::isfinite(kappa)) throw DomainError("wavenumber must be finite and >= 0");
  return kappa == 0.0 ? laplace2d() : helmholtz2d(kappa);
}

std::string toString(const KernelId& kernel) {
  std::ostringstream out;
  switch (kernel.kind()) {
    case KernelKind::Laplace2D: out << "laplace2d"; break;
    case KernelKind::Helmholtz2D: out << "helmholtz2d(kappa=" << kernel.kappa() << ")"; break;
    case KernelKind::Laplace3D: out << "laplace3d"; break;
    case KernelKind::Helmholtz3D: out << "helmholtz3d(kappa=" << kernel.kappa() << ")"; break;
  }
  return out.str();
}

double besselJ(int n, double x) {
  checkOrder(n);
  if (!std::isfinite(x) || x < 0.0) throw DomainError("besselJ requires finite x >= 0");
  if (x == 0.0) return n == 0 ? 1.0 : 0.0;
  if (x <= kSeriesLimit) return static_cast<double>(seriesJ(n, x));
  if (n <= 1) {
    double j, y;
    asymptoticJY(n, x, j, y);
    return j;
  }
  std::vector<double> values(static_cast<std::size_t>(n) + 1);
  millerJ(n, x, values);
  return values.back();
}

double besselY(int n, double x) {
  checkOrder(n);
  if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("besselY requires finite x > 0");
  double j0, j1, y0, y1;
  jy01(x, j0, j1, y0, y1);
  if (n == 0) return y0;
  double previous = y0;
  double current = y1;
  for (int k = 1; k < n; ++k) {
    const double next = (2.0 * k / x) * current - previous;
    previous = current;
    current = next;
  }
  return current;
}

Complex hankel1(int n, double x) {
  if (!(x > 0.0)) throw DomainError("hankel1 requires x > 0");
  return {besselJ(n, x), besselY(n, x)};
}

void besselJRange(int nmax, double x, std::span<double> out) {
  if (nmax < 0 || out.size() < static_cast<std::size_t>(nmax) + 1) {
    throw DomainError("besselJRange: output span too small");
  }
  if (x < 0.0 || !std::isfinite(x)) throw DomainError("besselJRange requires finite x >= 0");
  if (x == 0.0) {
    std::fill(out.begin(), out.begin() + nmax + 1, 0.0);
    out[0] = 1.0;
    return;
  }
  millerJ(nmax, x, out);
}

void besselYRange(int nmax, double x, std::span<double> out) {
  if (nmax < 0 || out.size() < static_cast<std::size_t>(nmax) + 1) {
    throw DomainError("besselYRange: output span too small");
  }
  if (!(x > 0.0)) throw DomainError("besselYRange requires x > 0");
  double j0, j1, y0, y1;
  jy01(x, j0, j1, y0, y1);
  out[0] = y0;
  if (nmax >= 1) out[1] = y1;
  for (int k = 1; k < nmax; ++k) {
    const auto uk = static_cast<std::size_t>(k);
    out[uk + 1] = (2.0 * k / x) * out[uk] - out[uk - 1];
  }
}

void hankel01(double x, Complex& h0, Complex& h1) {
  double j0, j1, y0, y1;
  if (x <= 8.0) {
    seriesJY01<double>(x, j0, j1, y0, y1);
  } else {
    jy01(x, j0, j1, y0, y1);
  }
  h0 = {j0, y0};
  h1 = {j1, y1};
}

Complex greens(const KernelId& kernel, Vec2 source, Vec2 target) {
  const double r = norm(source - target);
  if (r == 0.0) throw SingularError("greens: source and target coincide");
  switch (kernel.kind()) {
    case KernelKind::Laplace2D:
      return {-std::log(r) / (2.0 * kPi), 0.0};
    case KernelKind::Helmholtz2D: {
      Complex h0, h1;
      hankel01(kernel.kappa() * r, h0, h1);
      return Complex(0.0, 0.25) * h0;
    }
    case KernelKind::Laplace3D:
    case KernelKind::Helmholtz3D:
      return greens(kernel, Vec3{source.x, source.y, 0.0}, Vec3{target.x, target.y, 0.0});
  }
  return {};
}

Complex greens(const KernelId& kernel, Vec3 source, Vec3 target) {
  const double r = norm(source - target);
  if (r == 0.0) throw SingularError("greens: source and target coincide");
  switch (kernel.kind()) {
    case KernelKind::Laplace3D:
      return {1.0 / (4.0 * kPi * r), 0.0};
    case KernelKind::Helmholtz3D: {
      const double kr = kernel.kappa() * r;
      return Complex(std::cos(kr), std::sin(kr)) / (4.0 * kPi * r);
    }
    case KernelKind::Laplace2D:
    case KernelKind::Helmholtz2D:
      throw DomainError("2D kernel evaluated on 3D points (z ignored is not supported)");
  }
  return {};
}

Complex greensNormalDeriv(const KernelId& kernel, Vec2 source, Vec2 target, Vec2 normal) {
  const Vec2 separation = source - target;
  const double r = norm(separation);
  if (r == 0.0) throw SingularError("greensNormalDeriv: source and target coincide");
  const double rn = dot(separation, normal) / r;
  switch (kernel.kind()) {
    case KernelKind::Laplace2D:
      return {-rn / (2.0 * kPi * r), 0.0};
    case KernelKind::Helmholtz2D: {
      Complex h0, h1;
      hankel01(kernel.kappa() * r, h0, h1);
      return Complex(0.0, -0.25 * kernel.kappa()) * h1 * rn;
    }
    case KernelKind::Laplace3D:
    case KernelKind::Helmholtz3D:
      return greensNormalDeriv(kernel, Vec3{source.x, source.y, 0.0}, Vec3{target.x, target.y, 0.0},
                               Vec3{normal.x, normal.y, 0.0});
  }
  return {};
}

Complex greensNormalDeriv(const KernelId& kernel, Vec3 source, Vec3 target, Vec3 normal) {
  const Vec3 separation = source - target;
  const double r = norm(separation);
  if (r == 0.0) throw SingularError("greensNormalDeriv: source and target coincide");
  const double rn = dot(separation, normal) / r;
  switch (kernel.kind()) {
    case KernelKind::Laplace3D:
      return {-rn / (4.0 * kPi * r * r), 0.0};
    case KernelKind::Helmholtz3D: {
      // The r_n factor mirrors the 2D form; see the header note on conventions.
      const double kr = kernel.kappa() * r;
      const Complex phase(std::cos(kr), std::sin(kr));
      return Complex(-1.0, kr) / (4.0 * kPi * r * r) * phase * rn;
    }
    case KernelKind::Laplace2D:
    case KernelKind::Helmholtz2D:
      throw DomainError("2D kernel evaluated on 3D points");
  }
  return {};
}

Complex singularDiagonal2D(double kappa, double width) {
  if (!(width > 0.0)) throw DomainError("singularDiagonal2D requires width > 0");
  if (!(kappa > 0.0)) throw DomainError("singularDiagonal2D requires kappa > 0");
  const double logTerm = std::log(kExpEulerGamma * kappa * width / 4.0) - 1.0;
  return {width, (2.0 / kPi) * width * logTerm};
}

Complex singularSelfIntegral(const KernelId& kernel, double width) {
  if (!(width > 0.0)) throw DomainError("singularSelfIntegral requires width > 0");
  switch (kernel.kind()) {
    case KernelKind::Helmholtz2D:
      return Complex(0.0, 0.25) * singularDiagonal2D(kernel.kappa(), width);
    case KernelKind::Laplace2D:
      return {-(width / (2.0 * kPi)) * (std::log(0.5 * width) - 1.0), 0.0};
    default:
      throw DomainError("singularSelfIntegral is defined for 2D kernels only");
  }
}

}  // namespace helmfmm::special
