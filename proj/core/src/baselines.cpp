#include "helmfmm/baselines.hpp"

#include <algorithm>
#include <array>

namespace helmfmm::baselines {

namespace {

/// Returns false on a non-positive pivot.
bool tryIc0(const sparse::CsrMatrix& a, double shift, sparse::CsrMatrix& out) {
  const std::size_t n = a.rows();
  const auto& offsets = a.rowOffsets();
  const auto& cols = a.columns();
  const auto& vals = a.values();

  // Row-wise storage of L; row i holds its strictly lower pattern then the diagonal.
  std::vector<std::size_t> lOffsets(n + 1, 0);
  std::vector<std::size_t> lCols;
  CVector lVals;
  lCols.reserve(a.nnz() / 2 + n);
  lVals.reserve(a.nnz() / 2 + n);

  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t rowStart = lCols.size();
    Complex diag(shift, 0.0);
    for (std::size_t k = offsets[i]; k < offsets[i + 1]; ++k) {
      const std::size_t j = cols[k];
      if (j > i) break;
      if (j == i) {
        diag += vals[k];
        break;
      }
      // L_ij = (a_ij − Σ_{m<j} L_im L_jm) / L_jj over the shared pattern.
      Complex sum = vals[k];
      std::size_t p = rowStart;
      std::size_t q = lOffsets[j];
      const std::size_t qEnd = lOffsets[j + 1] - 1;  // excludes L_jj
      while (p < lCols.size() && q < qEnd) {
        if (lCols[p] == lCols[q]) {
          sum -= lVals[p] * lVals[q];
          ++p;
          ++q;
        } else if (lCols[p] < lCols[q]) {
          ++p;
        } else {
          ++q;
        }
      }
      lCols.push_back(j);
      lVals.push_back(sum / lVals[lOffsets[j + 1] - 1]);
    }
    for (std::size_t p = rowStart; p < lCols.size(); ++p) diag -= lVals[p] * lVals[p];
    if (!(diag.real() > 0.0) || !std::isfinite(diag.real())) return false;
    lCols.push_back(i);
    lVals.push_back(std::sqrt(diag));
    lOffsets[i + 1] = lCols.size();
  }

  std::vector<sparse::Triplet> t;
  t.reserve(lCols.size());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t p = lOffsets[i]; p < lOffsets[i + 1]; ++p) t.push_back({i, lCols[p], lVals[p]});
  }
  out = sparse::CsrMatrix::fromTriplets(n, n, std::move(t));
  return true;
}

}  // namespace

IcFactors ic0(const sparse::CsrMatrix& a) {
  if (a.rows() != a.cols()) throw SizeError("ic0: matrix is not square");
  for (std::size_t i = 0; i < a.rows(); ++i) {
    if (a.at(i, i) == Complex(0.0, 0.0)) throw FactorizationError("ic0: structurally zero diagonal at row " + std::to_string(i));
  }
  IcFactors f;
  if (tryIc0(a, 0.0, f.lower)) return f;
  double diagMax = 0.0;
  for (const Complex& d : a.diagonal()) diagMax = std::max(diagMax, std::abs(d));
  for (double factor : {1e-3, 1e-2, 1e-1, 1.0}) {
    const double alpha = factor * diagMax;
    if (tryIc0(a, alpha, f.lower)) {
      f.shift = alpha;
      return f;
    }
  }
  throw FactorizationError("ic0: pivot breakdown persists with every diagonal shift");
}

IcPreconditioner::IcPreconditioner(IcFactors factors) : factors_(std::move(factors)), upper_(factors_.lower.transpose()) {}

void IcPreconditioner::apply(std::span<const Complex> r, std::span<Complex> z) const {
  const std::size_t n = size();
  if (r.size() != n || z.size() != n) throw SizeError("IcPreconditioner::apply: length mismatch");
  const auto& lo = factors_.lower.rowOffsets();
  const auto& lc = factors_.lower.columns();
  const auto& lv = factors_.lower.values();
  CVector y(n);
  for (std::size_t i = 0; i < n; ++i) {
    Complex s = r[i];
    const std::size_t last = lo[i + 1] - 1;  // diagonal is the last entry of the row
    for (std::size_t k = lo[i]; k < last; ++k) s -= lv[k] * y[lc[k]];
    y[i] = s / lv[last];
  }
  const auto& uo = upper_.rowOffsets();
  const auto& uc = upper_.columns();
  const auto& uv = upper_.values();
  for (std::size_t ii = n; ii-- > 0;) {
    Complex s = y[ii];
    const std::size_t first = uo[ii];  // diagonal is the first entry of the row
    for (std::size_t k = first + 1; k < uo[ii + 1]; ++k) s -= uv[k] * z[uc[k]];
    z[ii] = s / uv[first];
  }
}

sparse::CsrMatrix bilinearProlongation(int fineCells) {
  if (fineCells < 4 || fineCells % 2 != 0) throw DomainError("bilinearProlongation: fine grid needs an even n >= 4");
  const int nf = fineCells;
  const int nc = nf / 2;
  auto fineIndex = [nf](int i, int j) { return static_cast<std::size_t>((i - 1) + (j - 1) * (nf - 1)); };
  auto coarseIndex = [nc](int i, int j) { return static_cast<std::size_t>((i - 1) + (j - 1) * (nc - 1)); };
  std::vector<sparse::Triplet> t;
  for (int j = 1; j < nf; ++j) {
    for (int i = 1; i < nf; ++i) {
      // Coarse neighbours along each axis with their 1D weights.
      std::array<std::pair<int, double>, 2> xs{};
      std::array<std::pair<int, double>, 2> ys{};
      const int nx = i % 2 == 0 ? 1 : 2;
      const int ny = j % 2 == 0 ? 1 : 2;
      if (nx == 1) xs[0] = {i / 2, 1.0}; else xs = {std::pair{i / 2, 0.5}, std::pair{i / 2 + 1, 0.5}};
      if (ny == 1) ys[0] = {j / 2, 1.0}; else ys = {std::pair{j / 2, 0.5}, std::pair{j / 2 + 1, 0.5}};
      for (int a = 0; a < nx; ++a) {
        for (int b = 0; b < ny; ++b) {
          const int ci = xs[static_cast<std::size_t>(a)].first;
          const int cj = ys[static_cast<std::size_t>(b)].first;
          if (ci < 1 || ci >= nc || cj < 1 || cj >= nc) continue;
          t.push_back({fineIndex(i, j), coarseIndex(ci, cj), xs[static_cast<std::size_t>(a)].second * ys[static_cast<std::size_t>(b)].second});
        }
      }
    }
  }
  return sparse::CsrMatrix::fromTriplets(static_cast<std::size_t>((nf - 1) * (nf - 1)),
                                         static_cast<std::size_t>((nc - 1) * (nc - 1)), std::move(t));
}

struct MgHierarchy::Level {
  sparse::CsrMatrix a;
  CVector inverseDiagonal;
  sparse::CsrMatrix p;  // from the next coarser level
  sparse::CsrMatrix r;
};

MgHierarchy::MgHierarchy(const discretize::Grid& fine, double kappa, MgOptions options) : options_(options) {
  fine.validate();
  if (options_.coarsestCells < 2) throw DomainError("MgHierarchy: coarsestCells must be >= 2");
  if (options_.preSmooth < 0 || options_.postSmooth < 0) throw DomainError("MgHierarchy: negative smoothing count");
  int n = fine.n;
  if ((n & (n - 1)) != 0) throw DomainError("MgHierarchy: cells per side must be a power of two");
  const double k2 = kappa * kappa;
  while (true) {
    const discretize::Grid grid{fine.lower, fine.upper, n};
    const auto fem = discretize::assembleQ1(grid);
    Level level;
    level.a = sparse::CsrMatrix::combine(1.0, fem.stiffness, -k2, fem.mass);
    const CVector d = level.a.diagonal();
    level.inverseDiagonal.resize(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
      if (d[i] == Complex(0.0, 0.0)) throw SingularError("MgHierarchy: zero diagonal in level operator");
      level.inverseDiagonal[i] = 1.0 / d[i];
    }
    const bool coarsest = n <= options_.coarsestCells || n < 4;
    if (!coarsest) {
      level.p = bilinearProlongation(n);
      level.r = level.p.transpose();
    }
    levels_.push_back(std::move(level));
    if (coarsest) break;
    n /= 2;
  }
  coarse_ = std::make_unique<dense::DenseLu>(levels_.back().a.toDense());
}

MgHierarchy::~MgHierarchy() = default;

std::size_t MgHierarchy::size() const { return levels_.front().a.rows(); }
std::size_t MgHierarchy::levels() const { return levels_.size(); }
const sparse::CsrMatrix& MgHierarchy::op(std::size_t level) const { return levels_.at(level).a; }
const sparse::CsrMatrix& MgHierarchy::prolongation(std::size_t level) const { return levels_.at(level).p; }
const MgOptions& MgHierarchy::options() const { return options_; }

void MgHierarchy::cycle(std::size_t l, std::span<const Complex> r, std::span<Complex> x) const {
  const Level& level = levels_[l];
  if (l + 1 == levels_.size()) {
    const CVector sol = coarse_->solve(r);
    std::copy(sol.begin(), sol.end(), x.begin());
    return;
  }
  const std::size_t n = r.size();
  CVector ax(n);
  auto smooth = [&](int sweeps) {
    for (int s = 0; s < sweeps; ++s) {
      level.a.multiply(x, ax);
      for (std::size_t i = 0; i < n; ++i) x[i] += options_.omega * level.inverseDiagonal[i] * (r[i] - ax[i]);
    }
  };
  std::fill(x.begin(), x.end(), Complex(0.0, 0.0));
  smooth(options_.preSmooth);
  level.a.multiply(x, ax);
  CVector residual(n);
  for (std::size_t i = 0; i < n; ++i) residual[i] = r[i] - ax[i];
  const CVector coarseR = level.r * residual;
  CVector coarseX(coarseR.size());
  cycle(l + 1, coarseR, coarseX);
  const CVector correction = level.p * coarseX;
  for (std::size_t i = 0; i < n; ++i) x[i] += correction[i];
  smooth(options_.postSmooth);
}

void MgHierarchy::apply(std::span<const Complex> r, std::span<Complex> z) const {
  if (r.size() != size() || z.size() != size()) throw SizeError("MgHierarchy::apply: length mismatch");
  cycle(0, r, z);
}

std::unique_ptr<krylov::Preconditioner> identityPrecond(std::size_t n) {
  return std::make_unique<krylov::IdentityPreconditioner>(n);
}

}  // namespace helmfmm::baselines
