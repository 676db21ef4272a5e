#pragma once

// Coefficient-array kernels shared by the standalone expansion operators and
// the precomputed FMM plan. Coefficient arrays hold 2p+1 entries, index m + p.

#include "helmfmm/common.hpp"

namespace helmfmm::fmm::detail {

/// F_m = J_m(κρ) e^{imφ} for m ∈ [−mmax, mmax]; out has 2·mmax+1 entries.
void regularBasis(double kappa, Vec2 rel, int mmax, Complex* out);

/// T_k = Z_k(κ|d|) e^{ikθ_d} for k ∈ [−kmax, kmax], Z = J (regular) or H¹.
void helmholtzShift(double kappa, Vec2 d, int kmax, bool singular, Complex* out);

/// out_n += Σ_m in_m T_{m−n} for n, m ∈ [−p, p]; T holds k ∈ [−2p, 2p].
void applyShift(const Complex* in, const Complex* shift, int p, Complex* out);

/// Helmholtz P2M contribution of one charge (or dipole when normal != null).
void helmholtzP2M(double kappa, Vec2 rel, const Vec2* normal, Complex charge, int p, Complex* out);

/// Laplace P2M contribution of one charge (or dipole when normal != null).
void laplaceP2M(Complex rel, const Complex* normal, Complex charge, int p, Complex* out);

// Laplace translations; results are accumulated into out.
void laplaceM2M(const Complex* in, int p, Complex childMinusParent, Complex* out);
void laplaceM2L(const Complex* in, int p, Complex sourceMinusTarget, Complex* out);
void laplaceL2L(const Complex* in, int p, Complex newMinusOld, Complex* out);

/// Φ-series evaluations before the kernel prefactor.
Complex laplaceLocalSeries(const Complex* local, int p, Complex rel);
Complex laplaceMultipoleSeries(const Complex* multipole, int p, Complex rel);

/// Binomial coefficient as a double, exact for the orders used here.
double binomial(int n, int k);

}  // namespace helmfmm::fmm::detail
