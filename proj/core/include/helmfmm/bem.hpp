#pragma once

#include <atomic>
#include <optional>
#include <span>

#include "helmfmm/dense.hpp"
#include "helmfmm/discretize.hpp"
#include "helmfmm/fmm.hpp"
#include "helmfmm/krylov.hpp"

/// Constant-element collocation BEM on axis-aligned squares.
///
/// For (Δ + κ²)u = f in Ω the representation used throughout is
///   u(x) = ∫_Γ G ∂ₙu − ∫_Γ u ∂ₙG + ∫_Ω G s,   s = −f,
/// and on Γ (smooth points) the same identity with u(x) replaced by ½u(x).
/// Normals point out of Ω and ∂ₙG is taken at the source point.
namespace helmfmm::bem {

using special::KernelId;

struct Square {
  double lower = 0.0;
  double upper = 1.0;
};

struct Element {
  Vec2 a;
  Vec2 b;
  Vec2 midpoint;
  double width = 0.0;
  Vec2 normal;

  /// Point at local coordinate ξ ∈ [−1, 1].
  Vec2 at(double xi) const { return 0.5 * (1.0 - xi) * a + 0.5 * (1.0 + xi) * b; }
};

struct BoundaryMesh {
  std::vector<Element> elements;

  std::size_t size() const { return elements.size(); }
  std::vector<Vec2> midpoints() const;
  double perimeter() const;
};

/// 4·nPerSide equal elements, counterclockwise starting on the bottom edge.
BoundaryMesh discretizeBoundary(const Square& domain, int nPerSide);

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
  /// n-point Gauss–Legendre rule on [−1, 1].
  static QuadratureRule gaussLegendre(int n);
};

enum class Layer { Single, Double };

/// ∫_element K(x, point) dΓ_x with K = G (single) or ∂G/∂n_x (double).
/// At the element's own midpoint the single layer uses the analytic
/// self-integral and the double layer is zero.
Complex elementIntegral(const Element& element, Vec2 point, Layer layer, const KernelId& kernel,
                        const QuadratureRule& rule);

/// Matrix of element integrals, rows = points, columns = elements.
dense::DenseMatrix assembleLayer(const BoundaryMesh& mesh, std::span<const Vec2> points, Layer layer,
                                 const KernelId& kernel, const QuadratureRule& rule);

struct VolumeSources {
  std::vector<Vec2> points;
  std::vector<double> weights;
  CVector values;
  /// Kernel value used when a target coincides with a source point, so the
  /// pair contributes selfValue·weight·value. Coincident pairs are skipped
  /// when absent.
  std::optional<Complex> selfValue;

  void validate() const;
};

/// Mean of G over a square cell of side h centred on the singularity.
Complex cellAverageGreens(const KernelId& kernel, double h);
/// Self value d that makes one row of the Q1 operator K − κ²M, applied to the
/// lattice {d at the origin, G(h·m) elsewhere}, equal to one.
Complex stencilSelfValue(const KernelId& kernel, double h);
/// Per-unknown generalisation of stencilSelfValue: d_i solves
///   A_ii d_i + Σ_{j≠i} A_ij G(x_i, x_j) = 1
/// over the full FEM row, so it also covers the distinct Q2 node types.
CVector stencilSelfValues(const discretize::LinearSystem& system, const KernelId& kernel);

/// Σ_j weight_j value_j G(target_i, point_j) at the element midpoints.
CVector volumeToBoundary(const VolumeSources& sources, const BoundaryMesh& mesh, const fmm::FmmConfig& config);
/// Same sum at arbitrary targets.
CVector volumePotential(const VolumeSources& sources, std::span<const Vec2> targets, const fmm::FmmConfig& config);

struct InnerSolveSettings {
  enum class Method { Gmres, DenseLu };
  Method method = Method::Gmres;
  int restart = 30;
  /// Defaults to max(ε, 1e-6) with ε from the FMM config (1e-6 without one).
  std::optional<double> tol;
  int maxIterations = 200;

  double resolvedTol(const fmm::FmmConfig& config) const;
};

/// Raised when the inner boundary solve hits its iteration cap. Carries the
/// partial flux so the caller may still use it.
class InnerSolveError : public NoConvergence {
 public:
  InnerSolveError(const std::string& what, CVector flux, krylov::SolveReport report)
      : NoConvergence(what), flux_(std::move(flux)), report_(std::move(report)) {}
  const CVector& flux() const { return flux_; }
  const krylov::SolveReport& report() const { return report_; }

 private:
  CVector flux_;
  krylov::SolveReport report_;
};

/// Single- and double-layer potentials of constant densities, evaluated at a
/// fixed target set through FMM plans over the Gauss points of every element.
/// When a target is an element midpoint the own-element contribution is
/// replaced by the analytic self-integral.
class LayerPotential {
 public:
  LayerPotential(const BoundaryMesh& mesh, std::span<const Vec2> targets, Layer layer, const fmm::FmmConfig& config,
                 int quadraturePoints = 4);
  ~LayerPotential();
  LayerPotential(LayerPotential&&) noexcept;
  LayerPotential& operator=(LayerPotential&&) noexcept;

  CVector evaluate(std::span<const Complex> density) const;
  std::size_t elementCount() const;
  std::size_t targetCount() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Solves ∫G q = (½I + ∂ₙG) u_Γ − volumeTerm at the collocation points.
CVector solveBoundaryFlux(const BoundaryMesh& mesh, std::span<const Complex> dirichlet,
                          std::span<const Complex> volumeTerm, const fmm::FmmConfig& config,
                          const InnerSolveSettings& inner = {}, krylov::SolveReport* report = nullptr);

/// u = ∫G q − ∫u_Γ ∂ₙG + ∫_Ω G s at the targets.
CVector evaluateInterior(const BoundaryMesh& mesh, std::span<const Complex> flux, std::span<const Complex> dirichlet,
                         const VolumeSources& sources, std::span<const Vec2> targets, const fmm::FmmConfig& config);

struct BemSettings {
  fmm::FmmConfig fmm;
  InnerSolveSettings inner;
  int quadraturePoints = 4;
  /// Scale from an FEM residual entry to a volume density; the default is
  /// 1/weight, so each residual entry becomes a point charge of itself.
  std::optional<double> sigma;
  enum class SelfTerm { Stencil, CellAverage, None };
  SelfTerm selfTerm = SelfTerm::Stencil;
};

struct PreconditionerStats {
  std::size_t applies = 0;
  std::size_t innerIterations = 0;
  std::size_t innerFailures = 0;
};

/// z = M⁻¹r: the residual becomes a volume source on the FEM interior nodes,
/// the boundary flux with zero Dirichlet data is solved, and the resulting
/// field is evaluated back at the nodes.
class BemPreconditioner final : public krylov::Preconditioner {
 public:
  /// selfValues, when given, replace the constant self term chosen by
  /// settings.selfTerm (one value per volume point).
  BemPreconditioner(BoundaryMesh mesh, std::vector<Vec2> volumePoints, double volumeWeight, BemSettings settings,
                    CVector selfValues = {});
  /// Mesh with one element per boundary cell edge, the kernel from the
  /// system's κ and volume weight (physical spacing)². The stencil self term
  /// comes from the system's own rows.
  static BemPreconditioner forSystem(const discretize::LinearSystem& system, BemSettings settings);
  ~BemPreconditioner() override;
  BemPreconditioner(BemPreconditioner&&) noexcept;
  BemPreconditioner& operator=(BemPreconditioner&&) noexcept;

  std::size_t size() const override;
  void apply(std::span<const Complex> r, std::span<Complex> z) const override;
  std::string name() const override { return "fmm"; }

  PreconditionerStats stats() const;
  const BoundaryMesh& mesh() const;
  const BemSettings& settings() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Explicitly assembled dense version of BemPreconditioner::apply.
class DenseBemPipeline {
 public:
  DenseBemPipeline(const BoundaryMesh& mesh, std::span<const Vec2> volumePoints, double volumeWeight,
                   const BemSettings& settings, CVector selfValues = {});
  CVector apply(std::span<const Complex> r) const;

 private:
  double chargeScale_;
  dense::DenseMatrix volumeToBoundary_;
  dense::DenseMatrix volumeToInterior_;
  dense::DenseMatrix singleToInterior_;
  std::optional<dense::DenseLu> single_;
};

}  // namespace helmfmm::bem
