#pragma once

#include <memory>
#include <optional>
#include <span>

#include "helmfmm/expansion.hpp"
#include "helmfmm/tree.hpp"

namespace helmfmm::fmm {

enum class Backend { Direct, Fmm };

std::string toString(Backend backend);

/// p = ceil(−log10 ε), at least 1. Requires ε ∈ [1e-12, 0.5].
int accuracyToOrder(double epsilon);

struct FmmConfig {
  KernelId kernel = KernelId::laplace2d();
  int p = 6;
  double theta = 0.4;
  int ncrit = tree::kDefaultNcrit;
  int maxLevel = tree::kDefaultMaxLevel;
  Backend backend = Backend::Fmm;
  std::optional<double> epsilon;
  /// Helmholtz far pairs additionally need κ·max(r_S, r_T) ≤ maxKappaRadius,
  /// which keeps coarse cells out of the truncated Graf series when the
  /// wavenumber is high. Zero disables the check.
  double maxKappaRadius = 2.0;
  /// Upper bound on the bytes spent caching near-field kernel blocks (or the
  /// whole kernel matrix for the Direct backend). Blocks beyond it are
  /// recomputed on every evaluation.
  std::size_t cacheBytes = std::size_t{512} << 20;

  /// Config with p derived from ε.
  static FmmConfig fromEpsilon(const KernelId& kernel, double epsilon);
  void validate() const;
};

struct PlanStats {
  std::size_t farPairs = 0;
  std::size_t nearPairs = 0;
  std::size_t sourceCells = 0;
  std::size_t targetCells = 0;
  std::size_t cachedBytes = 0;
};

/// Precomputed geometry for repeated evaluation of
///   u(y_j) = Σ_i w_i K(x_i, y_j)
/// with fixed sources, targets and kernel. When normals are supplied the
/// sources are dipoles, K = ∂G/∂n at the source. Coincident source/target
/// pairs are skipped. evaluate() is linear in the charges and deterministic.
class FmmPlan {
 public:
  FmmPlan(std::span<const Vec2> sources, std::span<const Vec2> targets, const FmmConfig& config,
          std::span<const Vec2> normals = {});
  ~FmmPlan();
  FmmPlan(FmmPlan&&) noexcept;
  FmmPlan& operator=(FmmPlan&&) noexcept;

  CVector evaluate(std::span<const Complex> charges) const;

  std::size_t sourceCount() const;
  std::size_t targetCount() const;
  const FmmConfig& config() const;
  PlanStats stats() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

CVector evaluate(std::span<const Vec2> sources, std::span<const Complex> charges,
                 std::span<const Vec2> targets, const FmmConfig& config);
CVector evaluateDipole(std::span<const Vec2> sources, std::span<const Vec2> normals,
                       std::span<const Complex> charges, std::span<const Vec2> targets,
                       const FmmConfig& config);
/// 3D kernels: direct summation only.
CVector evaluate(std::span<const Vec3> sources, std::span<const Complex> charges,
                 std::span<const Vec3> targets, const FmmConfig& config);

}  // namespace helmfmm::fmm
