// Acceptance runner: one PASS/FAIL line per criterion AC-1 … AC-11.
#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

#include "helmfmm/baselines.hpp"
#include "helmfmm/bem.hpp"
#include "helmfmm/dense.hpp"
#include "helmfmm/discretize.hpp"
#include "helmfmm/fmm.hpp"
#include "helmfmm/harness/experiments.hpp"
#include "helmfmm/krylov.hpp"
#include "helmfmm/spectra.hpp"
#include "helmfmm/tree.hpp"

using namespace helmfmm;
using harness::PreconditionerId;
using harness::ResultRow;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

struct Criterion {
  std::string id;
  double budgetSeconds;
  std::function<void(Outcome&)> run;
};

int threads = 1;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::vector<ResultRow> runCatalogSweep(const std::string& id, std::size_t sweep, std::vector<PreconditionerId> precs) {
  auto config = harness::catalog(id).sweeps.at(sweep).config;
  config.preconditioners = std::move(precs);
  harness::RunOptions options;
  options.threads = threads;
  return harness::runSweep(config, options);
}

std::vector<const ResultRow*> select(const std::vector<ResultRow>& rows, const std::string& prec) {
  std::vector<const ResultRow*> out;
  for (const auto& r : rows) {
    if (r.preconditioner == prec) out.push_back(&r);
  }
  return out;
}

std::string counts(const std::vector<const ResultRow*>& rows) {
  std::string s = "{";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    s += (i ? "," : "") + (rows[i]->converged ? std::to_string(rows[i]->iterations) : std::string("nc"));
  }
  return s + "}";
}

bool within(const ResultRow& r, int expected, int slack = 2) {
  return r.converged && std::abs(r.iterations - expected) <= slack;
}

int spread(const std::vector<const ResultRow*>& rows) {
  int lo = 1 << 30, hi = -1;
  for (const auto* r : rows) {
    lo = std::min(lo, r->iterations);
    hi = std::max(hi, r->iterations);
  }
  return hi - lo;
}

double relErr(std::span<const Complex> a, std::span<const Complex> b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a[i] - b[i]);
    den += std::norm(b[i]);
  }
  return std::sqrt(num / den);
}

void ac1(Outcome& o) {
  std::mt19937_64 rng(2000);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Vec2> pts(2000);
  CVector q(2000);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    pts[i] = {u(rng), u(rng)};
    q[i] = {2 * u(rng) - 1, 2 * u(rng) - 1};
  }
  fmm::FmmConfig c;
  c.kernel = special::KernelId::helmholtz2d(10.0);
  c.theta = 0.4;
  c.backend = fmm::Backend::Direct;
  const auto exact = fmm::evaluate(pts, q, pts, c);
  c.backend = fmm::Backend::Fmm;
  std::map<int, double> err;
  for (int p : {2, 4, 6}) {
    c.p = p;
    err[p] = relErr(fmm::evaluate(pts, q, pts, c), exact);
  }
  o.detail << "err p=6 " << fmt(err[6]) << ", p=4 " << fmt(err[4]) << ", p=2 " << fmt(err[2]);
  o.require(err[6] <= 1e-5, "p=6 <= 1e-5");
  o.require(err[4] <= 1e-3, "p=4 <= 1e-3");
  o.require(err[2] <= 1e-1, "p=2 <= 1e-1");
  o.require(err[6] < err[4] && err[4] < err[2], "strictly decreasing in p");
}

void ac2(Outcome& o) {
  const auto rows = runCatalogSweep("E2", 0, {PreconditionerId::Gmg, PreconditionerId::Fmm, PreconditionerId::Ic});
  const auto f = select(rows, "fmm");
  const auto g = select(rows, "gmg");
  const auto ic = select(rows, "ic");
  const int expected[] = {4, 4, 4, 5};
  o.detail << "fmm " << counts(f) << " gmg " << counts(g) << " ic " << counts(ic);
  for (std::size_t i = 0; i < 4; ++i) o.require(within(*f[i], expected[i]), "fmm at kappa=" + fmt(f[i]->kappa));
  o.require(g[0]->converged, "gmg converges at kappa=5");
  o.require(ic[0]->converged, "ic converges at kappa=5");
  for (std::size_t i = 1; i < 4; ++i) {
    o.require(!g[i]->converged, "gmg fails at kappa=" + fmt(g[i]->kappa));
    o.require(!ic[i]->converged, "ic fails at kappa=" + fmt(ic[i]->kappa));
  }
}

void ac3(Outcome& o) {
  const auto mesh = runCatalogSweep("E3", 0, {PreconditionerId::Fmm});
  const auto sweep = runCatalogSweep("E4", 0, {PreconditionerId::Fmm, PreconditionerId::Ic});
  const auto f = select(mesh, "fmm");
  const auto fk = select(sweep, "fmm");
  const auto ic = select(sweep, "ic");
  o.detail << "kappa=5 over h " << counts(f) << "; h=1/64 over kappa fmm " << counts(fk) << " ic " << counts(ic);
  const int expected[] = {5, 4, 4};
  for (std::size_t i = 0; i < 3; ++i) o.require(within(*f[i], expected[i]), "fmm at h=" + fmt(f[i]->h));
  o.require(spread(f) <= 2, "mesh spread <= 2");
  for (const auto* r : fk) o.require(within(*r, 4), "fmm at kappa=" + fmt(r->kappa));
  for (const auto* r : ic) o.require(!r->converged, "ic fails at kappa=" + fmt(r->kappa));
}

void ac4(Outcome& o) {
  const auto rows = runCatalogSweep("E5", 0, {PreconditionerId::Fmm});
  const auto f = select(rows, "fmm");
  o.detail << "12 cells " << counts(f) << ", spread " << spread(f);
  for (const auto* r : f) {
    o.require(r->converged && r->iterations >= 4 && r->iterations <= 9, "mu=" + fmt(*r->mu) + " h=" + fmt(r->h));
  }
  o.require(f.size() == 12, "12 cells");
  o.require(spread(f) <= 3, "spread <= 3");
}

void ac5(Outcome& o) {
  const auto q1 = select(runCatalogSweep("E1", 0, {PreconditionerId::Fmm}), "fmm");
  const auto q2 = select(runCatalogSweep("E1", 1, {PreconditionerId::Fmm}), "fmm");
  o.detail << "Q1 " << counts(q1) << " Q2 " << counts(q2);
  const int e1[] = {4, 4, 3};
  const int e2[] = {6, 6, 5};
  for (std::size_t i = 0; i < 3; ++i) {
    o.require(within(*q1[i], e1[i]), "Q1 at h=" + fmt(q1[i]->h));
    o.require(within(*q2[i], e2[i]), "Q2 at h=" + fmt(q2[i]->h));
    o.require(q1[i]->iterations <= q2[i]->iterations, "Q1 <= Q2 at h=" + fmt(q1[i]->h));
  }
}

void ac6(Outcome& o) {
  harness::SpectrumJob job{"A", discretize::ProblemId::P2, 1.0 / 32, 7.0, std::nullopt, 0.4};
  const auto a = harness::runSpectrum(job).report;
  std::vector<spectra::SpectrumReport> m;
  for (double eps : {1e-2, 1e-4, 1e-6}) {
    job.epsilon = eps;
    m.push_back(harness::runSpectrum(job).report);
  }
  o.detail << "minAbs " << fmt(m[0].minAbs) << "/" << fmt(m[1].minAbs) << "/" << fmt(m[2].minAbs) << " (Δ "
           << fmt(m[1].minAbs - m[0].minAbs) << ", " << fmt(m[2].minAbs - m[1].minAbs) << "), clusterRadius "
           << fmt(m[0].clusterRadius) << "/" << fmt(m[1].clusterRadius) << "/" << fmt(m[2].clusterRadius);
  o.require(m[0].minAbs < m[1].minAbs && m[1].minAbs < m[2].minAbs, "minAbs strictly increasing");
  o.require(m[0].clusterRadius > m[1].clusterRadius && m[1].clusterRadius > m[2].clusterRadius,
            "clusterRadius strictly decreasing");
  const double bound = 10.0 * a.minAbs / a.maxAbs * m[2].maxAbs;
  o.detail << ", origin distance " << fmt(m[2].minAbs) << " vs bound " << fmt(bound);
  o.require(m[2].minAbs > bound, "normalized origin distance > 10x");
}

void ac7(Outcome& o) {
  std::vector<std::size_t> negatives;
  for (double k : {5.0, 10.0, 20.0, 40.0}) {
    const harness::SpectrumJob job{"A", discretize::ProblemId::P1, 1.0 / 32, k, std::nullopt, 0.4};
    negatives.push_back(harness::runSpectrum(job).report.nNegativeReal);
  }
  o.detail << "negative real parts " << negatives[0] << "/" << negatives[1] << "/" << negatives[2] << "/" << negatives[3];
  for (std::size_t i = 1; i < negatives.size(); ++i) o.require(negatives[i] >= negatives[i - 1], "nondecreasing");
  o.require(negatives[3] >= negatives[0] + 1, "kappa=40 exceeds kappa=5");
}

void ac8(Outcome& o) {
  const auto rows = runCatalogSweep("E7", 0, {PreconditionerId::Fmm, PreconditionerId::Gmg, PreconditionerId::Ic});
  const auto f = select(rows, "fmm");  // ε = 1e-2, 1e-4, 1e-6
  const auto g = select(rows, "gmg");
  const auto ic = select(rows, "ic");
  o.detail << "fmm eps 1e-2/1e-4/1e-6 " << counts(f) << " gmg " << counts(g) << " ic " << counts(ic);
  for (const auto* r : f) o.require(r->converged, "fmm converged at eps=" + fmt(*r->epsilon));
  o.require(f[2]->iterations <= f[1]->iterations && f[1]->iterations <= f[0]->iterations, "monotone in eps");
  o.require(f[0]->iterations <= 20, "within maxit");
  for (const auto* r : {g[0], ic[0]}) {
    o.require(!r->converged || r->iterations > f[0]->iterations, r->preconditioner + " behind eps=1e-2");
  }
}

void ac9(Outcome& o) {
  const auto rows = runCatalogSweep("E6", 0, {PreconditionerId::Fmm});
  std::map<double, std::pair<const ResultRow*, const ResultRow*>> byKappa;
  for (const auto& r : rows) (r.solver == "gmres" ? byKappa[r.kappa].first : byKappa[r.kappa].second) = &r;
  for (const auto& [k, pair] : byKappa) {
    o.detail << "k=" << fmt(k) << " gmres " << pair.first->iterations << " bicgstab "
             << (pair.second->converged ? std::to_string(pair.second->iterations) : "nc") << "; ";
    o.require(pair.first->converged, "gmres converged at kappa=" + fmt(k));
    o.require(pair.first->iterations <= pair.second->iterations, "gmres <= bicgstab at kappa=" + fmt(k));
  }
  o.require(byKappa.size() == 4, "four wavenumbers");
}

void ac10(Outcome& o) {
  const auto rows = runCatalogSweep("E7", 1, {PreconditionerId::None});
  const ResultRow& laplace = rows.at(0);
  const ResultRow& helm = rows.at(1);
  int reached = -1;
  for (std::size_t i = 0; i < laplace.residualHistory.size(); ++i) {
    if (laplace.residualHistory[i] <= 1e-6) {
      reached = static_cast<int>(i);
      break;
    }
  }
  double best = 1.0;
  for (std::size_t i = 0; i < helm.residualHistory.size() && i <= 100; ++i) best = std::min(best, helm.residualHistory[i]);
  o.detail << "kappa=0 reaches 1e-6 at iteration " << reached << "; kappa=15 best residual " << fmt(best)
           << " in " << helm.residualHistory.size() - 1 << " iterations";
  o.require(reached >= 0 && reached <= 60, "kappa=0 within 60");
  o.require(best > 1e-2, "kappa=15 stays above 1e-2");
}

void ac11(Outcome& o) {
  int checks = 0;
  auto check = [&](bool ok, const std::string& what) {
    ++checks;
    o.require(ok, what);
  };

  double worst = 0.0;
  for (int n = 0; n <= 12; ++n) {
    for (double x = 0.1; x <= 100.0; x *= 1.9) {
      const double w = special::besselJ(n, x) * special::besselY(n + 1, x) - special::besselJ(n + 1, x) * special::besselY(n, x);
      worst = std::max(worst, std::abs(w * kPi * x / 2.0 + 1.0));
    }
  }
  check(worst <= 1e-10, "Wronskian");

  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Vec2> pts(500);
  for (auto& p : pts) p = {u(rng), u(rng)};
  const auto t = tree::Tree::build(pts, 8);
  const auto lists = tree::dualTraversal(t, t, 0.4);
  std::size_t covered = 0;
  for (const auto& [a, b] : lists.farPairs) covered += t.cells()[a].size() * t.cells()[b].size();
  for (const auto& [a, b] : lists.nearPairs) covered += t.cells()[a].size() * t.cells()[b].size();
  check(covered == pts.size() * pts.size(), "tree pair coverage");

  CVector q1(pts.size()), q2(pts.size()), mix(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    q1[i] = {u(rng) - 0.5, u(rng) - 0.5};
    q2[i] = {u(rng) - 0.5, u(rng) - 0.5};
    mix[i] = 2.0 * q1[i] - Complex(0, 3) * q2[i];
  }
  fmm::FmmConfig c;
  c.kernel = special::KernelId::helmholtz2d(8.0);
  const fmm::FmmPlan plan(pts, pts, c);
  const auto a1 = plan.evaluate(q1), a2 = plan.evaluate(q2), am = plan.evaluate(mix);
  CVector combined(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) combined[i] = 2.0 * a1[i] - Complex(0, 3) * a2[i];
  check(relErr(am, combined) <= 1e-12, "FMM linearity");
  c.theta = 1e-3;
  const auto nearOnly = fmm::evaluate(pts, q1, pts, c);
  c.backend = fmm::Backend::Direct;
  check(relErr(nearOnly, fmm::evaluate(pts, q1, pts, c)) <= 1e-12, "theta to 0 agrees with direct");

  {
    const auto p = discretize::problemP1(15.0);
    const auto s = discretize::buildSystem(p, p.gridForH(1.0 / 32), discretize::ElementType::Q1);
    bem::BemSettings settings;
    settings.fmm = fmm::FmmConfig::fromEpsilon(special::KernelId::helmholtz2d(15.0), 1e-6);
    settings.fmm.backend = fmm::Backend::Direct;
    settings.inner.method = bem::InnerSolveSettings::Method::DenseLu;
    const auto m = bem::BemPreconditioner::forSystem(s, settings);
    const double h = s.grid.spacing();
    const bem::DenseBemPipeline pipeline(m.mesh(), s.nodes, h * h, settings,
                                         bem::stencilSelfValues(s, settings.fmm.kernel));
    CVector r(m.size());
    for (auto& v : r) v = {u(rng) - 0.5, u(rng) - 0.5};
    check(relErr(m(r), pipeline.apply(r)) <= 1e-12, "BEM dense-pipeline equivalence");
  }

  {
    const auto p = discretize::problemP1(15.0);
    std::vector<double> errs;
    for (double h : {1.0 / 16, 1.0 / 32, 1.0 / 64}) {
      const auto s = discretize::buildSystem(p, p.gridForH(h), discretize::ElementType::Q1);
      errs.push_back(relErr(dense::DenseLu(s.a.toDense()).solve(s.b), discretize::exactSolution(p, s)));
    }
    const double r1 = errs[0] / errs[1], r2 = errs[1] / errs[2];
    o.detail << "Q1 error ratios " << fmt(r1) << ", " << fmt(r2) << "; ";
    check(r1 > 3.0 && r1 < 5.0 && r2 > 3.0 && r2 < 5.0, "Q1 O(h^2) convergence");
  }

  {
    const int n = 48;
    dense::DenseMatrix a(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) a(i, j) = Complex(u(rng) - 0.5, u(rng) - 0.5) / std::sqrt(double(n));
    }
    a += 3.0 * dense::DenseMatrix::Identity(n, n);
    const dense::DenseOperator op(a);
    CVector b(n);
    for (auto& v : b) v = {u(rng), u(rng)};
    krylov::GmresOptions opts;
    opts.tol = 1e-4;
    const auto rep = krylov::gmres(op, b, opts);
    const Eigen::VectorXcd res = dense::view(b) - a * dense::view(rep.solution);
    check(std::abs(res.norm() / dense::view(b).norm() - rep.residualHistory.back()) <= 1e-10, "GMRES true residual");
    const dense::DenseLu lu(a);
    const krylov::FunctionPreconditioner inv(n, [&](std::span<const Complex> r, std::span<Complex> z) {
      const auto x = lu.solve(r);
      std::copy(x.begin(), x.end(), z.begin());
    });
    check(krylov::gmres(op, b, inv).iterations == 1, "GMRES with M = inverse(A) in one step");
  }

  {
    std::vector<sparse::Triplet> tri;
    for (std::size_t i = 0; i < 30; ++i) {
      tri.push_back({i, i, 4.0});
      if (i + 1 < 30) {
        tri.push_back({i, i + 1, -1.0});
        tri.push_back({i + 1, i, -1.0});
      }
    }
    const auto a = sparse::CsrMatrix::fromTriplets(30, 30, std::move(tri));
    const Eigen::MatrixXd l = Eigen::LLT<Eigen::MatrixXd>(a.toDense().real()).matrixL();
    const auto f = baselines::ic0(a);
    check((f.lower.toDense().real() - l).cwiseAbs().maxCoeff() <= 1e-14 && f.shift == 0.0, "IC(0) equals Cholesky");
  }

  {
    const CVector roots{Complex(1, 0), Complex(-2, 0.5), Complex(0.3, -1.2), Complex(2.5, 0),
                        Complex(-0.7, -0.7), Complex(0, 3), Complex(1.5, 1.5), Complex(-3, 0)};
    CVector coef{1.0};
    for (const Complex& r : roots) {
      CVector next(coef.size() + 1, 0.0);
      for (std::size_t i = 0; i < coef.size(); ++i) {
        next[i] += coef[i];
        next[i + 1] -= r * coef[i];
      }
      coef = next;
    }
    dense::DenseMatrix comp = dense::DenseMatrix::Zero(8, 8);
    for (Eigen::Index j = 0; j < 8; ++j) comp(0, j) = -coef[static_cast<std::size_t>(j + 1)];
    for (Eigen::Index i = 1; i < 8; ++i) comp(i, i - 1) = 1.0;
    auto ev = spectra::denseEigenvalues(comp);
    double mismatch = 0.0;
    for (const Complex& r : roots) {
      auto it = std::min_element(ev.begin(), ev.end(), [&](Complex x, Complex y) { return std::abs(x - r) < std::abs(y - r); });
      mismatch = std::max(mismatch, std::abs(*it - r));
      ev.erase(it);
    }
    check(mismatch <= 1e-8, "companion-matrix eigenvalues");
  }
  o.detail << checks << " properties checked";
}

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all{
      {"AC-1", 10, ac1},   {"AC-2", 600, ac2},   {"AC-3", 600, ac3}, {"AC-4", 900, ac4},
      {"AC-5", 600, ac5},  {"AC-6", 1200, ac6},  {"AC-7", 300, ac7}, {"AC-8", 600, ac8},
      {"AC-9", 600, ac9},  {"AC-10", 300, ac10}, {"AC-11", 300, ac11},
  };
  return all;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria AC-1 to AC-11"};
  std::vector<std::string> only;
  app.add_option("--only", only, "Run only these criteria (e.g. AC-3)");
  app.add_option("--threads", threads, "Worker threads for sweeps")->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);

  int failures = 0;
  int ran = 0;
  for (const auto& c : criteria()) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    ++ran;
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.run(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " [error: " << e.what() << "]";
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    o.require(seconds < c.budgetSeconds, "runtime under " + fmt(c.budgetSeconds) + " s");
    std::cout << c.id << " " << (o.pass ? "PASS" : "FAIL") << " (" << fmt(seconds) << " s) " << o.detail.str() << "\n"
              << std::flush;
    if (!o.pass) ++failures;
  }
  if (ran == 0) {
    std::cerr << "no criterion matched --only\n";
    return 2;
  }
  return failures == 0 ? 0 : 1;
}
