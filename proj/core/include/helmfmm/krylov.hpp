#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>

#include "helmfmm/common.hpp"

namespace helmfmm::krylov {

class LinearOperator {
 public:
  virtual ~LinearOperator() = default;
  virtual std::size_t size() const = 0;
  /// y = A x
  virtual void apply(std::span<const Complex> x, std::span<Complex> y) const = 0;

  CVector operator()(std::span<const Complex> x) const;
};

class Preconditioner {
 public:
  virtual ~Preconditioner() = default;
  virtual std::size_t size() const = 0;
  /// z = M⁻¹ r
  virtual void apply(std::span<const Complex> r, std::span<Complex> z) const = 0;
  virtual std::string name() const = 0;

  CVector operator()(std::span<const Complex> r) const;
};

/// Wraps a callable y = f(x).
class FunctionOperator final : public LinearOperator {
 public:
  using Function = std::function<void(std::span<const Complex>, std::span<Complex>)>;
  FunctionOperator(std::size_t n, Function f) : n_(n), f_(std::move(f)) {}
  std::size_t size() const override { return n_; }
  void apply(std::span<const Complex> x, std::span<Complex> y) const override { f_(x, y); }

 private:
  std::size_t n_;
  Function f_;
};

class FunctionPreconditioner final : public Preconditioner {
 public:
  using Function = std::function<void(std::span<const Complex>, std::span<Complex>)>;
  FunctionPreconditioner(std::size_t n, Function f, std::string name = "function")
      : n_(n), f_(std::move(f)), name_(std::move(name)) {}
  std::size_t size() const override { return n_; }
  void apply(std::span<const Complex> r, std::span<Complex> z) const override { f_(r, z); }
  std::string name() const override { return name_; }

 private:
  std::size_t n_;
  Function f_;
  std::string name_;
};

class IdentityPreconditioner final : public Preconditioner {
 public:
  explicit IdentityPreconditioner(std::size_t n) : n_(n) {}
  std::size_t size() const override { return n_; }
  void apply(std::span<const Complex> r, std::span<Complex> z) const override;
  std::string name() const override { return "none"; }

 private:
  std::size_t n_;
};

struct SolveReport {
  /// GMRES: Arnoldi steps. BiCGSTAB: steps begun (a step that converges at
  /// its half-way check counts as one).
  int iterations = 0;
  /// Operator applications, each paired with one preconditioner apply.
  int matvecs = 0;
  /// Relative residual norms, entry 0 for the initial guess.
  std::vector<double> residualHistory;
  bool converged = false;
  CVector solution;
  /// ‖b − A x‖ / ‖b‖ recomputed from the returned solution.
  double finalResidual = 0.0;
  /// Largest |v_iᴴ v_j − δ_ij| seen in any Arnoldi basis (when requested).
  double orthogonalityError = 0.0;
};

class BreakdownError : public Error {
 public:
  BreakdownError(const std::string& what, SolveReport report) : Error(what), report_(std::move(report)) {}
  const SolveReport& report() const { return report_; }

 private:
  SolveReport report_;
};

struct GmresOptions {
  double tol = 1e-6;
  int restart = 20;
  int maxOuter = 20;
  /// Cap on total Arnoldi steps across restarts.
  int maxIterations = 20;
  std::optional<CVector> x0;
  bool checkOrthogonality = false;
};

/// Right-preconditioned restarted GMRES with modified Gram–Schmidt and Givens
/// rotations. Preconditioned basis vectors M⁻¹v_k are stored, so the reported
/// residuals stay true residuals even when M⁻¹ is applied inexactly.
SolveReport gmres(const LinearOperator& a, std::span<const Complex> b, const Preconditioner& m,
                  const GmresOptions& options = {});
SolveReport gmres(const LinearOperator& a, std::span<const Complex> b, const GmresOptions& options = {});

struct BicgstabOptions {
  double tol = 1e-6;
  int maxIterations = 20;
  std::optional<CVector> x0;
};

/// Right-preconditioned BiCGSTAB. Throws BreakdownError when ρ, (r̂₀, v) or ω vanish.
SolveReport bicgstab(const LinearOperator& a, std::span<const Complex> b, const Preconditioner& m,
                     const BicgstabOptions& options = {});

double norm2(std::span<const Complex> x);
Complex dotc(std::span<const Complex> x, std::span<const Complex> y);  // Σ conj(x_i) y_i

}  // namespace helmfmm::krylov
