#pragma once

#include <memory>

#include "helmfmm/dense.hpp"
#include "helmfmm/discretize.hpp"
#include "helmfmm/krylov.hpp"
#include "helmfmm/sparse.hpp"

namespace helmfmm::baselines {

/// Zero-fill incomplete factor A ≈ L Lᵀ (plain transpose, so complex-symmetric
/// matrices are handled without conjugation).
struct IcFactors {
  sparse::CsrMatrix lower;
  /// Diagonal shift that was added to A before factoring; 0 when none was needed.
  double shift = 0.0;
};

/// IC(0). When a pivot is not positive the factorization is retried on
/// A + αI with α ∈ {1e-3, 1e-2, 1e-1, 1}·max|a_ii|. Throws FactorizationError
/// when every shift fails.
IcFactors ic0(const sparse::CsrMatrix& a);

class IcPreconditioner final : public krylov::Preconditioner {
 public:
  explicit IcPreconditioner(IcFactors factors);
  std::size_t size() const override { return factors_.lower.rows(); }
  /// Solves L Lᵀ z = r.
  void apply(std::span<const Complex> r, std::span<Complex> z) const override;
  std::string name() const override { return "ic"; }
  const IcFactors& factors() const { return factors_; }

 private:
  IcFactors factors_;
  sparse::CsrMatrix upper_;
};

struct MgOptions {
  int preSmooth = 2;
  int postSmooth = 2;
  double omega = 2.0 / 3.0;
  /// Coarsening stops once the grid has this many cells per side or fewer.
  int coarsestCells = 2;
};

/// Geometric multigrid V-cycle for the Q1 Helmholtz operator K − κ²M on a
/// uniform grid with n a power of two. Coarse operators are re-discretized.
class MgHierarchy final : public krylov::Preconditioner {
 public:
  MgHierarchy(const discretize::Grid& fine, double kappa, MgOptions options = {});
  ~MgHierarchy() override;

  std::size_t size() const override;
  /// One V-cycle from a zero initial guess.
  void apply(std::span<const Complex> r, std::span<Complex> z) const override;
  std::string name() const override { return "gmg"; }

  std::size_t levels() const;
  const sparse::CsrMatrix& op(std::size_t level) const;
  const sparse::CsrMatrix& prolongation(std::size_t level) const;  // level+1 → level
  const MgOptions& options() const;

 private:
  struct Level;
  std::vector<Level> levels_;
  MgOptions options_;
  std::unique_ptr<dense::DenseLu> coarse_;

  void cycle(std::size_t level, std::span<const Complex> r, std::span<Complex> x) const;
};

/// Bilinear interpolation from the interior nodes of a grid with n/2 cells to
/// the interior nodes of a grid with n cells.
sparse::CsrMatrix bilinearProlongation(int fineCells);

std::unique_ptr<krylov::Preconditioner> identityPrecond(std::size_t n);

}  // namespace helmfmm::baselines
