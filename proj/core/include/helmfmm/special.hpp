#pragma once

#include <span>

#include "helmfmm/common.hpp"

/// Bessel and Hankel functions of integer order and real argument, and the
/// free-space Green's kernels of the Laplace and Helmholtz operators.
///
/// Kernels follow the convention (Δ + κ²)G = −δ, i.e.
///   Helmholtz2D  G = (i/4) H₀¹(κr)        Laplace2D  G = −ln(r) / 2π
///   Helmholtz3D  G = e^{iκr} / (4πr)      Laplace3D  G = 1 / (4πr)
/// Normal derivatives are taken with respect to the source point along the
/// source normal, with the separation vector r⃗ = source − target.
namespace helmfmm::special {

enum class KernelKind { Laplace2D, Helmholtz2D, Laplace3D, Helmholtz3D };

/// A kernel together with its wavenumber. Helmholtz kernels need κ > 0,
/// Laplace kernels always carry κ = 0.
class KernelId {
 public:
  static KernelId laplace2d() { return {KernelKind::Laplace2D, 0.0}; }
  static KernelId laplace3d() { return {KernelKind::Laplace3D, 0.0}; }
  static KernelId helmholtz2d(double kappa);
  static KernelId helmholtz3d(double kappa);
  /// Helmholtz2D for κ > 0, Laplace2D for κ = 0.
  static KernelId forWavenumber2d(double kappa);

  KernelKind kind() const { return kind_; }
  double kappa() const { return kappa_; }
  bool isHelmholtz() const { return kind_ == KernelKind::Helmholtz2D || kind_ == KernelKind::Helmholtz3D; }
  bool is2d() const { return kind_ == KernelKind::Laplace2D || kind_ == KernelKind::Helmholtz2D; }

  friend bool operator==(const KernelId&, const KernelId&) = default;

 private:
  KernelId(KernelKind kind, double kappa) : kind_(kind), kappa_(kappa) {}

  KernelKind kind_;
  double kappa_;
};

std::string toString(const KernelId& kernel);

inline constexpr int kMaxBesselOrder = 64;

/// J_n(x) for 0 ≤ n ≤ 64 and finite x ≥ 0.
double besselJ(int n, double x);

/// Y_n(x) for n ≥ 0; throws DomainError for x ≤ 0.
double besselY(int n, double x);

/// H¹_n(x) = J_n(x) + i Y_n(x); throws DomainError for x ≤ 0.
Complex hankel1(int n, double x);

/// J_0(x) … J_nmax(x) into out[0..nmax] by normalized downward recurrence.
void besselJRange(int nmax, double x, std::span<double> out);

/// Y_0(x) … Y_nmax(x) into out[0..nmax] by upward recurrence.
void besselYRange(int nmax, double x, std::span<double> out);

/// H¹_0(x) and H¹_1(x) together. Hot path for the direct 2D Helmholtz kernel.
void hankel01(double x, Complex& h0, Complex& h1);

Complex greens(const KernelId& kernel, Vec2 source, Vec2 target);
Complex greens(const KernelId& kernel, Vec3 source, Vec3 target);

Complex greensNormalDeriv(const KernelId& kernel, Vec2 source, Vec2 target, Vec2 normal);
Complex greensNormalDeriv(const KernelId& kernel, Vec3 source, Vec3 target, Vec3 normal);

/// Exponential of Euler's constant, to the precision used by the
/// singular-element formula.
inline constexpr double kExpEulerGamma = 1.781072418;

/// ∫ H₀¹(κ r) dΓ over a straight element of width w, evaluated at its own
/// midpoint: w + i(2/π)w[ln(γκw/4) − 1]. Small-argument formula; accurate for
/// κw ≲ 0.5. Multiply by i/4 for the single-layer diagonal.
Complex singularDiagonal2D(double kappa, double width);

/// ∫ G dΓ over a straight element of width w evaluated at its own midpoint,
/// for the 2D kernels (Helmholtz uses singularDiagonal2D, Laplace is exact).
Complex singularSelfIntegral(const KernelId& kernel, double width);

}  // namespace helmfmm::special
