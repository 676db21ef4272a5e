#pragma once

#include <span>

#include "helmfmm/special.hpp"

/// Multipole and local expansions for the 2D kernels.
///
/// Helmholtz2D (Graf basis), with (ρ, φ) polar coordinates about the center:
///   multipole  u(x) = (i/4) Σ_m M_m H_m(κρ) e^{imφ}
///   local      u(x) = (i/4) Σ_m L_m J_m(κρ) e^{imφ}
/// Laplace2D, with z = x − center as a complex number:
///   multipole  u(x) = −(1/2π) [M_0 ln|z| + ½ Σ_{k≥1} (M_k z^{−k} + M_{−k} z̄^{−k})]
///   local      u(x) = −(1/2π) [L_0 + ½ Σ_{l≥1} (L_l z^l + L_{−l} z̄^l)]
/// Charges are complex, so the Laplace series keeps the holomorphic and
/// antiholomorphic halves separately. Both kernels store 2p+1 coefficients
/// indexed m ∈ [−p, p].
namespace helmfmm::fmm {

using special::KernelId;

enum class ExpansionKind { Multipole, Local };

struct Expansion {
  KernelId kernel = KernelId::laplace2d();
  int order = 1;
  ExpansionKind kind = ExpansionKind::Multipole;
  Vec2 center;
  CVector coeffs;

  static Expansion zero(const KernelId& kernel, int order, ExpansionKind kind, Vec2 center);

  Complex& operator[](int m) { return coeffs[static_cast<std::size_t>(m + order)]; }
  const Complex& operator[](int m) const { return coeffs[static_cast<std::size_t>(m + order)]; }
};

Expansion p2m(const KernelId& kernel, int order, Vec2 center, std::span<const Vec2> sources,
              std::span<const Complex> charges);
/// Multipole of dipoles: each source contributes w ∂G/∂n_source.
Expansion p2mDipole(const KernelId& kernel, int order, Vec2 center, std::span<const Vec2> sources,
                    std::span<const Vec2> normals, std::span<const Complex> charges);
Expansion m2m(const Expansion& child, Vec2 parentCenter);
Expansion m2l(const Expansion& multipole, Vec2 targetCenter);
Expansion l2l(const Expansion& parent, Vec2 childCenter);
CVector l2p(const Expansion& local, std::span<const Vec2> targets);
/// Direct evaluation of a multipole expansion at a far point.
Complex m2p(const Expansion& multipole, Vec2 target);

/// out[j] += Σ_i w_i G(x_i, y_j), skipping coincident source/target pairs.
void p2p(const KernelId& kernel, std::span<const Vec2> sources, std::span<const Complex> charges,
         std::span<const Vec2> targets, std::span<Complex> out);
/// out[j] += Σ_i w_i ∂G/∂n(x_i, y_j), skipping coincident pairs.
void p2pDipole(const KernelId& kernel, std::span<const Vec2> sources, std::span<const Vec2> normals,
               std::span<const Complex> charges, std::span<const Vec2> targets, std::span<Complex> out);

}  // namespace helmfmm::fmm
