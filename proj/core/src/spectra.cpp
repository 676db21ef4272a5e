#include "helmfmm/spectra.hpp"

#include <algorithm>
#include <limits>

namespace helmfmm::spectra {

namespace {

void checkSize(std::size_t n, const char* who) {
  if (n > kMaxDenseSize) throw SizeError(std::string(who) + ": dimension exceeds the dense limit of 4096");
}

/// Eigenvalues of [[a, b], [c, d]].
std::pair<Complex, Complex> eig2(Complex a, Complex b, Complex c, Complex d) {
  const Complex half = 0.5 * (a + d);
  const Complex disc = std::sqrt(0.25 * (a - d) * (a - d) + b * c);
  return {half + disc, half - disc};
}

struct Givens {
  double c = 1.0;
  Complex s;
};

/// Rotation G with G·[x; y] = [r; 0], G = [[c, s], [−s̄, c]].
Givens givens(Complex x, Complex y) {
  const double ax = std::abs(x);
  const double ay = std::abs(y);
  if (ay == 0.0) return {1.0, {0.0, 0.0}};
  if (ax == 0.0) return {0.0, {1.0, 0.0}};
  const double r = std::hypot(ax, ay);
  return {ax / r, (x / ax) * std::conj(y) / r};
}

}  // namespace

dense::DenseMatrix materialize(const krylov::LinearOperator& op) {
  const std::size_t n = op.size();
  checkSize(n, "materialize");
  dense::DenseMatrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  CVector e(n);
  CVector col(n);
  for (std::size_t j = 0; j < n; ++j) {
    e[j] = 1.0;
    op.apply(e, col);
    e[j] = 0.0;
    for (std::size_t i = 0; i < n; ++i) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = col[i];
  }
  return m;
}

dense::DenseMatrix materialize(const krylov::LinearOperator& a, const krylov::Preconditioner& m) {
  if (a.size() != m.size()) throw SizeError("materialize: operator and preconditioner sizes differ");
  const krylov::FunctionOperator composed(a.size(), [&](std::span<const Complex> x, std::span<Complex> y) {
    CVector ax(x.size());
    a.apply(x, ax);
    m.apply(ax, y);
  });
  return materialize(composed);
}

dense::DenseMatrix hessenberg(const dense::DenseMatrix& a) {
  if (a.rows() != a.cols()) throw SizeError("hessenberg: matrix is not square");
  checkSize(static_cast<std::size_t>(a.rows()), "hessenberg");
  dense::DenseMatrix h = a;
  const Eigen::Index n = h.rows();
  Eigen::VectorXcd v;
  for (Eigen::Index k = 0; k + 2 < n; ++k) {
    const Eigen::Index m = n - k - 1;
    v = h.col(k).tail(m);
    const double xnorm = v.norm();
    if (xnorm == 0.0) continue;
    const Complex x0 = v(0);
    const Complex phase = std::abs(x0) == 0.0 ? Complex(1.0, 0.0) : x0 / std::abs(x0);
    v(0) += phase * xnorm;
    const double vnorm = v.norm();
    if (vnorm == 0.0) continue;
    v /= vnorm;
    // H ← (I − 2vvᴴ) H (I − 2vvᴴ) on the trailing block.
    auto rows = h.bottomRows(m);
    const Eigen::RowVectorXcd left = v.adjoint() * rows;
    rows.noalias() -= 2.0 * v * left;
    auto cols = h.rightCols(m);
    const Eigen::VectorXcd right = cols * v;
    cols.noalias() -= 2.0 * right * v.adjoint();
    h.col(k).tail(m - 1).setZero();
  }
  return h;
}

CVector denseEigenvalues(const dense::DenseMatrix& a, double tol) {
  if (a.rows() != a.cols()) throw SizeError("denseEigenvalues: matrix is not square");
  const Eigen::Index n = a.rows();
  checkSize(static_cast<std::size_t>(n), "denseEigenvalues");
  CVector eig(static_cast<std::size_t>(n));
  if (n == 0) return eig;
  if (!a.allFinite()) throw DomainError("denseEigenvalues: matrix has non-finite entries");
  dense::DenseMatrix h = hessenberg(a);
  const double eps = tol > 0.0 ? tol : std::numeric_limits<double>::epsilon();
  const double scale = std::max(h.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());

  Eigen::Index hi = n - 1;
  long sweeps = 0;
  int sinceDeflation = 0;
  const long maxSweeps = 100L * static_cast<long>(n);
  while (hi >= 0) {
    if (hi == 0) {
      eig[0] = h(0, 0);
      break;
    }
    Eigen::Index lo = hi;
    while (lo > 0) {
      const double sub = std::abs(h(lo, lo - 1));
      const double diag = std::abs(h(lo - 1, lo - 1)) + std::abs(h(lo, lo));
      if (sub <= eps * (diag > 0.0 ? diag : scale)) {
        h(lo, lo - 1) = 0.0;
        break;
      }
      --lo;
    }
    if (lo == hi) {
      eig[static_cast<std::size_t>(hi)] = h(hi, hi);
      --hi;
      sinceDeflation = 0;
      continue;
    }
    if (lo + 1 == hi) {
      const auto [l1, l2] = eig2(h(lo, lo), h(lo, hi), h(hi, lo), h(hi, hi));
      eig[static_cast<std::size_t>(lo)] = l1;
      eig[static_cast<std::size_t>(hi)] = l2;
      hi -= 2;
      sinceDeflation = 0;
      continue;
    }
    if (++sweeps > maxSweeps) throw NoConvergence("denseEigenvalues: QR iteration did not converge");
    ++sinceDeflation;

    Complex shift;
    if (sinceDeflation % 11 == 10) {
      // Exceptional shift to break cycles.
      shift = h(hi, hi) + Complex(0.75 * std::abs(h(hi, hi - 1)), 0.25 * std::abs(h(hi - 1, hi - 2)));
    } else {
      const auto [l1, l2] = eig2(h(hi - 1, hi - 1), h(hi - 1, hi), h(hi, hi - 1), h(hi, hi));
      shift = std::abs(l1 - h(hi, hi)) <= std::abs(l2 - h(hi, hi)) ? l1 : l2;
    }

    // Implicit single-shift sweep on rows/columns lo..hi.
    Complex x = h(lo, lo) - shift;
    Complex y = h(lo + 1, lo);
    for (Eigen::Index k = lo; k < hi; ++k) {
      if (k > lo) {
        x = h(k, k - 1);
        y = h(k + 1, k - 1);
      }
      const Givens g = givens(x, y);
      const Eigen::Index c0 = k > lo ? k - 1 : lo;
      for (Eigen::Index j = c0; j <= hi; ++j) {
        const Complex p = h(k, j);
        const Complex q = h(k + 1, j);
        h(k, j) = g.c * p + g.s * q;
        h(k + 1, j) = -std::conj(g.s) * p + g.c * q;
      }
      if (k > lo) h(k + 1, k - 1) = 0.0;
      const Eigen::Index r1 = std::min(k + 2, hi);
      for (Eigen::Index i = lo; i <= r1; ++i) {
        const Complex p = h(i, k);
        const Complex q = h(i, k + 1);
        h(i, k) = g.c * p + std::conj(g.s) * q;
        h(i, k + 1) = -g.s * p + g.c * q;
      }
    }
  }
  return eig;
}

CVector inverseIteration(const dense::DenseMatrix& a, Complex lambda, int iterations) {
  if (a.rows() != a.cols()) throw SizeError("inverseIteration: matrix is not square");
  const Eigen::Index n = a.rows();
  // Perturb the shift slightly so the shifted matrix stays invertible.
  const double perturb = 1e-10 * std::max(1.0, a.cwiseAbs().maxCoeff());
  dense::DenseMatrix shifted = a;
  shifted.diagonal().array() -= lambda + perturb;
  const Eigen::PartialPivLU<dense::DenseMatrix> lu(shifted);
  Eigen::VectorXcd v = Eigen::VectorXcd::Ones(n) / std::sqrt(static_cast<double>(n));
  for (int it = 0; it < iterations; ++it) {
    v = lu.solve(v);
    const double nv = v.norm();
    if (!(nv > 0.0) || !std::isfinite(nv)) throw SingularError("inverseIteration: iteration broke down");
    v /= nv;
  }
  return {v.data(), v.data() + v.size()};
}

SpectrumReport spectrumReport(CVector eigenvalues) {
  SpectrumReport r;
  r.eigenvalues = std::move(eigenvalues);
  if (r.eigenvalues.empty()) return r;
  std::vector<double> mags;
  mags.reserve(r.eigenvalues.size());
  r.minAbs = std::numeric_limits<double>::infinity();
  for (const Complex& l : r.eigenvalues) {
    if (l.real() < 0.0) ++r.nNegativeReal;
    const double m = std::abs(l);
    mags.push_back(m);
    r.minAbs = std::min(r.minAbs, m);
    r.maxAbs = std::max(r.maxAbs, m);
    r.clusterRadius = std::max(r.clusterRadius, std::abs(l - 1.0));
  }
  std::sort(mags.begin(), mags.end());
  const std::size_t k = mags.size();
  r.medianAbs = k % 2 == 1 ? mags[k / 2] : 0.5 * (mags[k / 2 - 1] + mags[k / 2]);
  return r;
}

}  // namespace helmfmm::spectra
