#include "helmfmm/krylov.hpp"

#include <algorithm>

namespace helmfmm::krylov {

CVector LinearOperator::operator()(std::span<const Complex> x) const {
  CVector y(size());
  apply(x, y);
  return y;
}

CVector Preconditioner::operator()(std::span<const Complex> r) const {
  CVector z(size());
  apply(r, z);
  return z;
}

void IdentityPreconditioner::apply(std::span<const Complex> r, std::span<Complex> z) const {
  std::copy(r.begin(), r.end(), z.begin());
}

double norm2(std::span<const Complex> x) {
  double sum = 0.0;
  for (const Complex& v : x) sum += std::norm(v);
  return std::sqrt(sum);
}

Complex dotc(std::span<const Complex> x, std::span<const Complex> y) {
  Complex sum(0.0, 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) sum += std::conj(x[i]) * y[i];
  return sum;
}

namespace {

void checkSizes(const LinearOperator& a, std::span<const Complex> b, const Preconditioner& m) {
  if (a.size() != b.size() || m.size() != b.size()) throw SizeError("Krylov solve: operator, rhs and preconditioner sizes differ");
}

CVector residual(const LinearOperator& a, std::span<const Complex> b, std::span<const Complex> x) {
  CVector r(b.size());
  a.apply(x, r);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
  return r;
}

}  // namespace

SolveReport gmres(const LinearOperator& a, std::span<const Complex> b, const Preconditioner& m,
                  const GmresOptions& options) {
  checkSizes(a, b, m);
  if (options.restart < 1 || options.maxOuter < 1 || options.maxIterations < 1) {
    throw DomainError("gmres: restart, maxOuter and maxIterations must be positive");
  }
  const std::size_t n = b.size();
  const double bnorm = norm2(b);
  if (bnorm == 0.0) throw DomainError("gmres: right-hand side is zero");

  SolveReport report;
  report.solution = options.x0 ? *options.x0 : CVector(n);
  if (report.solution.size() != n) throw SizeError("gmres: x0 has the wrong length");
  CVector r = options.x0 ? residual(a, b, report.solution) : CVector(b.begin(), b.end());
  double beta = norm2(r);
  report.residualHistory.push_back(beta / bnorm);
  if (beta / bnorm <= options.tol) {
    report.converged = true;
    report.finalResidual = beta / bnorm;
    return report;
  }

  const auto mdim = static_cast<std::size_t>(options.restart);
  std::vector<CVector> v(mdim + 1, CVector(n));
  std::vector<CVector> z(mdim, CVector(n));
  std::vector<Complex> h((mdim + 1) * mdim);
  auto H = [&](std::size_t i, std::size_t j) -> Complex& { return h[j * (mdim + 1) + i]; };
  std::vector<double> cs(mdim);
  std::vector<Complex> sn(mdim);
  std::vector<Complex> g(mdim + 1);
  CVector w(n);

  for (int outer = 0; outer < options.maxOuter && report.iterations < options.maxIterations; ++outer) {
    for (std::size_t i = 0; i < n; ++i) v[0][i] = r[i] / beta;
    std::fill(g.begin(), g.end(), Complex(0.0, 0.0));
    g[0] = beta;
    std::size_t k = 0;
    bool happy = false;
    while (k < mdim && report.iterations < options.maxIterations) {
      m.apply(v[k], z[k]);
      a.apply(z[k], w);
      ++report.iterations;
      ++report.matvecs;
      for (std::size_t i = 0; i <= k; ++i) {
        H(i, k) = dotc(v[i], w);
        for (std::size_t t = 0; t < n; ++t) w[t] -= H(i, k) * v[i][t];
      }
      const double hnext = norm2(w);
      H(k + 1, k) = hnext;
      for (std::size_t i = 0; i < k; ++i) {
        const Complex upper = cs[i] * H(i, k) + sn[i] * H(i + 1, k);
        H(i + 1, k) = -std::conj(sn[i]) * H(i, k) + cs[i] * H(i + 1, k);
        H(i, k) = upper;
      }
      const Complex diag = H(k, k);
      const double t = std::hypot(std::abs(diag), hnext);
      if (t == 0.0) {
        cs[k] = 1.0;
        sn[k] = 0.0;
      } else if (std::abs(diag) == 0.0) {
        cs[k] = 0.0;
        sn[k] = 1.0;
      } else {
        cs[k] = std::abs(diag) / t;
        sn[k] = diag / std::abs(diag) * hnext / t;
      }
      H(k, k) = cs[k] * diag + sn[k] * hnext;
      H(k + 1, k) = 0.0;
      g[k + 1] = -std::conj(sn[k]) * g[k];
      g[k] = cs[k] * g[k];
      const double estimate = std::abs(g[k + 1]) / bnorm;
      report.residualHistory.push_back(estimate);
      ++k;
      if (hnext == 0.0) {
        happy = true;
        break;
      }
      if (estimate <= options.tol) break;
      for (std::size_t i = 0; i < n; ++i) v[k][i] = w[i] / hnext;
    }

    if (options.checkOrthogonality) {
      for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
          const double deviation = std::abs(dotc(v[i], v[j]) - (i == j ? 1.0 : 0.0));
          report.orthogonalityError = std::max(report.orthogonalityError, deviation);
        }
      }
    }

    // Back substitution for y, then x += Z y.
    std::vector<Complex> y(k);
    for (std::size_t ii = k; ii-- > 0;) {
      Complex sum = g[ii];
      for (std::size_t j = ii + 1; j < k; ++j) sum -= H(ii, j) * y[j];
      if (H(ii, ii) == Complex(0.0, 0.0)) {
        report.finalResidual = norm2(residual(a, b, report.solution)) / bnorm;
        throw BreakdownError("gmres: singular Hessenberg matrix", report);
      }
      y[ii] = sum / H(ii, ii);
    }
    for (std::size_t j = 0; j < k; ++j) {
      for (std::size_t i = 0; i < n; ++i) report.solution[i] += y[j] * z[j][i];
    }
    r = residual(a, b, report.solution);
    beta = norm2(r);
    report.finalResidual = beta / bnorm;
    if (report.finalResidual <= options.tol) {
      report.converged = true;
      break;
    }
    if (happy) throw BreakdownError("gmres: Krylov space exhausted without reaching the tolerance", report);
  }
  return report;
}

SolveReport gmres(const LinearOperator& a, std::span<const Complex> b, const GmresOptions& options) {
  return gmres(a, b, IdentityPreconditioner(a.size()), options);
}

SolveReport bicgstab(const LinearOperator& a, std::span<const Complex> b, const Preconditioner& m,
                     const BicgstabOptions& options) {
  checkSizes(a, b, m);
  if (options.maxIterations < 1) throw DomainError("bicgstab: maxIterations must be positive");
  const std::size_t n = b.size();
  const double bnorm = norm2(b);
  if (bnorm == 0.0) throw DomainError("bicgstab: right-hand side is zero");

  SolveReport report;
  report.solution = options.x0 ? *options.x0 : CVector(n);
  if (report.solution.size() != n) throw SizeError("bicgstab: x0 has the wrong length");
  CVector r = options.x0 ? residual(a, b, report.solution) : CVector(b.begin(), b.end());
  report.residualHistory.push_back(norm2(r) / bnorm);
  auto finish = [&](bool converged) {
    report.finalResidual = norm2(residual(a, b, report.solution)) / bnorm;
    report.converged = converged && report.finalResidual <= options.tol;
  };
  if (report.residualHistory.back() <= options.tol) {
    finish(true);
    return report;
  }

  const CVector shadow = r;
  CVector p(n), v(n), phat(n), s(n), shat(n), t(n);
  Complex rhoOld = 1.0, alpha = 1.0, omega = 1.0;
  for (int it = 0; it < options.maxIterations; ++it) {
    const Complex rho = dotc(shadow, r);
    if (rho == Complex(0.0, 0.0)) {
      finish(false);
      throw BreakdownError("bicgstab: rho = 0", report);
    }
    const Complex beta = (rho / rhoOld) * (alpha / omega);
    for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
    m.apply(p, phat);
    a.apply(phat, v);
    ++report.matvecs;
    ++report.iterations;
    const Complex sv = dotc(shadow, v);
    if (sv == Complex(0.0, 0.0)) {
      finish(false);
      throw BreakdownError("bicgstab: (r0, v) = 0", report);
    }
    alpha = rho / sv;
    for (std::size_t i = 0; i < n; ++i) s[i] = r[i] - alpha * v[i];
    for (std::size_t i = 0; i < n; ++i) report.solution[i] += alpha * phat[i];
    const double halfResidual = norm2(s) / bnorm;
    if (halfResidual <= options.tol) {
      report.residualHistory.push_back(halfResidual);
      finish(true);
      if (report.converged) return report;
    }
    m.apply(s, shat);
    a.apply(shat, t);
    ++report.matvecs;
    const double tt = std::real(dotc(t, t));
    omega = tt == 0.0 ? Complex(0.0, 0.0) : dotc(t, s) / tt;
    if (omega == Complex(0.0, 0.0)) {
      finish(false);
      throw BreakdownError("bicgstab: omega = 0", report);
    }
    for (std::size_t i = 0; i < n; ++i) report.solution[i] += omega * shat[i];
    for (std::size_t i = 0; i < n; ++i) r[i] = s[i] - omega * t[i];
    const double fullResidual = norm2(r) / bnorm;
    if (halfResidual > options.tol) report.residualHistory.push_back(fullResidual);
    else report.residualHistory.back() = fullResidual;
    if (fullResidual <= options.tol) {
      finish(true);
      if (report.converged) return report;
    }
    rhoOld = rho;
  }
  finish(false);
  return report;
}

}  // namespace helmfmm::krylov
