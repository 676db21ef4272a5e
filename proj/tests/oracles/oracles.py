"""Reference values for the unit tests, computed with mpmath at 40 digits.

Run `python3 oracles.py > oracle_values.json`; the tests embed the printed
numbers and this script is the record of where they came from.
"""
import json
from fractions import Fraction

import mpmath as mp

mp.mp.dps = 40


def c(z):
    z = mp.mpc(z)
    return [mp.nstr(z.real, 20), mp.nstr(z.imag, 20)]


def r(x):
    return mp.nstr(mp.mpf(x), 20)


out = {}

# Bessel and Hankel functions across the small-argument, series and
# asymptotic regimes.
args = [1e-3, 0.5, 1, 2.5, 7.3, 19.9, 20.1, 35, 100]
out["besselJ"] = {f"{n},{x}": r(mp.besselj(n, x)) for n in (0, 1, 2, 5, 10) for x in args}
out["besselY"] = {f"{n},{x}": r(mp.bessely(n, x)) for n in (0, 1, 2, 5) for x in args}
out["hankel1"] = {f"{n},{x}": c(mp.hankel1(n, x)) for n in (0, 1) for x in (1, 20.5, 50)}

# Kernels. G = (i/4) H0(kr); normal derivative at the source with r = source - target.
k = mp.mpf(1)
out["greens_k1_r1"] = c(mp.mpc(0, 0.25) * mp.hankel1(0, k))
out["dGdn_k1_r1"] = c(-mp.mpc(0, 0.25) * k * mp.hankel1(1, k))
out["laplace_r2"] = r(-mp.log(2) / (2 * mp.pi))


def h0_integral(kappa, w):
    """Integral of H0(kappa |t|) over the element (-w/2, w/2)."""
    f = lambda t: mp.hankel1(0, kappa * t)
    return 2 * mp.quad(f, [0, w / 4, w / 2])


out["h0_self_integral_k1_w0.1"] = c(h0_integral(mp.mpf(1), mp.mpf("0.1")))
gamma_e = mp.mpf("1.781072418")
w = mp.mpf("0.1")
out["singular_diag_formula_k1_w0.1"] = c(
    w * (1 + mp.mpc(0, 2) / mp.pi * (mp.log(gamma_e * 1 * w / 4) - 1)))


def element_integral(a, b, p, kappa, layer):
    ax, ay = a
    bx, by = b
    px, py = p
    L = mp.sqrt((bx - ax) ** 2 + (by - ay) ** 2)
    tx, ty = (bx - ax) / L, (by - ay) / L
    nx, ny = ty, -tx  # outward normal for a counterclockwise boundary

    def f(s):
        x = ax + s * tx
        y = ay + s * ty
        dx, dy = x - px, y - py
        rr = mp.sqrt(dx * dx + dy * dy)
        if layer == "single":
            return mp.mpc(0, 0.25) * mp.hankel1(0, kappa * rr)
        return -mp.mpc(0, 0.25) * kappa * mp.hankel1(1, kappa * rr) * (dx * nx + dy * ny) / rr

    return mp.quad(f, [0, L / 2, L])


cases = {
    "k1_sep1": ((0, 0), (mp.mpf("0.1"), 0), (mp.mpf("0.05"), mp.mpf("0.1")), 1),
    "k10_sep1": ((0, 0), (mp.mpf("0.1"), 0), (mp.mpf("0.05"), mp.mpf("0.1")), 10),
    "k10_diag": ((0, 0), (mp.mpf("0.1"), 0), (mp.mpf("0.25"), mp.mpf("0.12")), 10),
    "k10_sep3": ((0, 0), (mp.mpf("0.1"), 0), (mp.mpf("0.05"), mp.mpf("0.3")), 10),
    "k15_sep4": ((0, 0), (mp.mpf("0.1"), 0), (mp.mpf("-0.3"), mp.mpf("0.2")), 15),
}
out["element_single"] = {n: c(element_integral(*v[:3], mp.mpf(v[3]), "single")) for n, v in cases.items()}
out["element_double"] = {n: c(element_integral(*v[:3], mp.mpf(v[3]), "double")) for n, v in cases.items()}

# Biquadratic element matrices on the unit reference square, exact rationals.
# 1D quadratic Lagrange basis on [0, 1] with nodes 0, 1/2, 1.
def poly_mul(p, q):
    res = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            res[i + j] += a * b
    return res


def poly_int01(p):
    return sum(a / (i + 1) for i, a in enumerate(p))


def poly_der(p):
    return [i * p[i] for i in range(1, len(p))]


basis = [
    [Fraction(1), Fraction(-3), Fraction(2)],   # (1-x)(1-2x)
    [Fraction(0), Fraction(4), Fraction(-4)],   # 4x(1-x)
    [Fraction(0), Fraction(-1), Fraction(2)],   # x(2x-1)
]
m1 = [[poly_int01(poly_mul(basis[i], basis[j])) for j in range(3)] for i in range(3)]
k1 = [[poly_int01(poly_mul(poly_der(basis[i]), poly_der(basis[j]))) for j in range(3)] for i in range(3)]
# local index a + 3 b, x fastest
mass2 = [[m1[i % 3][j % 3] * m1[i // 3][j // 3] for j in range(9)] for i in range(9)]
stiff2 = [[k1[i % 3][j % 3] * m1[i // 3][j // 3] + m1[i % 3][j % 3] * k1[i // 3][j // 3] for j in range(9)]
          for i in range(9)]
out["q2_mass_unit"] = [[str(v) for v in row] for row in mass2]
out["q2_stiffness"] = [[str(v) for v in row] for row in stiff2]

print(json.dumps(out, indent=1))
