#include "helmfmm/bem.hpp"

#include <algorithm>
#include <map>

#include <Eigen/Eigenvalues>

namespace helmfmm::bem {

namespace {

using PointKey = std::pair<double, double>;

PointKey key(Vec2 p) { return {p.x, p.y}; }

CVector scaled(std::span<const Complex> x, double s) {
  CVector y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = s * x[i];
  return y;
}

bool allZero(std::span<const Complex> x) {
  return std::all_of(x.begin(), x.end(), [](Complex v) { return v == Complex(0.0, 0.0); });
}

void addInPlace(CVector& y, std::span<const Complex> x) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += x[i];
}

}  // namespace

std::vector<Vec2> BoundaryMesh::midpoints() const {
  std::vector<Vec2> m;
  m.reserve(elements.size());
  for (const Element& e : elements) m.push_back(e.midpoint);
  return m;
}

double BoundaryMesh::perimeter() const {
  double sum = 0.0;
  for (const Element& e : elements) sum += e.width;
  return sum;
}

BoundaryMesh discretizeBoundary(const Square& domain, int nPerSide) {
  if (nPerSide < 2) throw DomainError("discretizeBoundary: nPerSide must be >= 2");
  if (!(domain.upper > domain.lower)) throw DomainError("discretizeBoundary: empty square");
  const double lo = domain.lower;
  const double hi = domain.upper;
  const std::array<Vec2, 4> corners{Vec2{lo, lo}, Vec2{hi, lo}, Vec2{hi, hi}, Vec2{lo, hi}};
  const std::array<Vec2, 4> normals{Vec2{0.0, -1.0}, Vec2{1.0, 0.0}, Vec2{0.0, 1.0}, Vec2{-1.0, 0.0}};
  BoundaryMesh mesh;
  mesh.elements.reserve(4 * static_cast<std::size_t>(nPerSide));
  for (std::size_t side = 0; side < 4; ++side) {
    const Vec2 start = corners[side];
    const Vec2 end = corners[(side + 1) % 4];
    for (int k = 0; k < nPerSide; ++k) {
      Element e;
      e.a = start + (static_cast<double>(k) / nPerSide) * (end - start);
      e.b = k + 1 == nPerSide ? end : start + (static_cast<double>(k + 1) / nPerSide) * (end - start);
      e.midpoint = start + ((k + 0.5) / nPerSide) * (end - start);
      e.width = norm(e.b - e.a);
      e.normal = normals[side];
      mesh.elements.push_back(e);
    }
  }
  return mesh;
}

QuadratureRule QuadratureRule::gaussLegendre(int n) {
  if (n < 1 || n > 256) throw DomainError("gaussLegendre: n must lie in [1, 256]");
  // Golub–Welsch: nodes are the eigenvalues of the Jacobi matrix.
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double beta = k / std::sqrt(4.0 * k * k - 1.0);
    jacobi(k, k - 1) = beta;
    jacobi(k - 1, k) = beta;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
  QuadratureRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    rule.nodes[static_cast<std::size_t>(k)] = solver.eigenvalues()(k);
    const double v = solver.eigenvectors()(0, k);
    rule.weights[static_cast<std::size_t>(k)] = 2.0 * v * v;
  }
  // Symmetrize against rounding so that odd moments vanish exactly.
  for (int k = 0; k < n / 2; ++k) {
    const auto lo = static_cast<std::size_t>(k);
    const auto hi = static_cast<std::size_t>(n - 1 - k);
    const double x = 0.5 * (rule.nodes[hi] - rule.nodes[lo]);
    const double w = 0.5 * (rule.weights[hi] + rule.weights[lo]);
    rule.nodes[lo] = -x;
    rule.nodes[hi] = x;
    rule.weights[lo] = rule.weights[hi] = w;
  }
  if (n % 2 == 1) rule.nodes[static_cast<std::size_t>(n / 2)] = 0.0;
  return rule;
}

Complex elementIntegral(const Element& element, Vec2 point, Layer layer, const KernelId& kernel,
                        const QuadratureRule& rule) {
  if (!kernel.is2d()) throw DomainError("elementIntegral: needs a 2D kernel");
  if (point == element.midpoint) {
    return layer == Layer::Single ? special::singularSelfIntegral(kernel, element.width) : Complex(0.0, 0.0);
  }
  const Vec2 along = element.b - element.a;
  const double t = dot(point - element.a, along) / dot(along, along);
  const double offset = std::abs(dot(point - element.a, element.normal));
  if (t > 0.0 && t < 1.0 && offset <= 1e-14 * element.width) {
    throw SingularError("elementIntegral: point lies on the element interior");
  }
  const double jacobian = 0.5 * element.width;
  Complex sum(0.0, 0.0);
  for (std::size_t l = 0; l < rule.size(); ++l) {
    const Vec2 x = element.at(rule.nodes[l]);
    const Complex k = layer == Layer::Single ? special::greens(kernel, x, point)
                                             : special::greensNormalDeriv(kernel, x, point, element.normal);
    sum += rule.weights[l] * k;
  }
  return jacobian * sum;
}

dense::DenseMatrix assembleLayer(const BoundaryMesh& mesh, std::span<const Vec2> points, Layer layer,
                                 const KernelId& kernel, const QuadratureRule& rule) {
  dense::DenseMatrix m(static_cast<Eigen::Index>(points.size()), static_cast<Eigen::Index>(mesh.size()));
  for (std::size_t j = 0; j < mesh.size(); ++j) {
    for (std::size_t i = 0; i < points.size(); ++i) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          elementIntegral(mesh.elements[j], points[i], layer, kernel, rule);
    }
  }
  return m;
}

void VolumeSources::validate() const {
  if (weights.size() != points.size() || values.size() != points.size()) {
    throw SizeError("VolumeSources: points, weights and values differ in length");
  }
  for (double w : weights) {
    if (!(w > 0.0)) throw DomainError("VolumeSources: weights must be positive");
  }
}

Complex cellAverageGreens(const KernelId& kernel, double h) {
  if (!(h > 0.0)) throw DomainError("cellAverageGreens: h must be positive");
  if (!kernel.is2d()) throw DomainError("cellAverageGreens: needs a 2D kernel");
  // Eight congruent triangles; in each, r runs from 0 to (h/2)/cos θ, θ ∈ [0, π/4].
  static const QuadratureRule rule = QuadratureRule::gaussLegendre(24);
  const double kappa = kernel.kappa();
  Complex integral(0.0, 0.0);
  for (std::size_t l = 0; l < rule.size(); ++l) {
    const double theta = 0.125 * kPi * (rule.nodes[l] + 1.0);
    const double r = 0.5 * h / std::cos(theta);
    Complex radial;
    if (kernel.isHelmholtz()) {
      Complex h0;
      Complex h1;
      special::hankel01(kappa * r, h0, h1);
      radial = Complex(0.0, 0.25) * (r * h1 / kappa + Complex(0.0, 2.0 / (kPi * kappa * kappa)));
    } else {
      radial = -(0.5 * r * r * std::log(r) - 0.25 * r * r) / (2.0 * kPi);
    }
    integral += rule.weights[l] * 0.125 * kPi * radial;
  }
  return 8.0 * integral / (h * h);
}

Complex stencilSelfValue(const KernelId& kernel, double h) {
  if (!(h > 0.0)) throw DomainError("stencilSelfValue: h must be positive");
  const double k2h2 = kernel.kappa() * kernel.kappa() * h * h;
  const double centre = 8.0 / 3.0 - 4.0 * k2h2 / 9.0;
  if (std::abs(centre) < 1e-12) throw SingularError("stencilSelfValue: degenerate stencil centre");
  const Complex edge = special::greens(kernel, Vec2{0.0, 0.0}, Vec2{h, 0.0});
  const Complex corner = special::greens(kernel, Vec2{0.0, 0.0}, Vec2{h, h});
  return (1.0 + 4.0 * (1.0 / 3.0 + k2h2 / 9.0) * edge + 4.0 * (1.0 / 3.0 + k2h2 / 36.0) * corner) / centre;
}

CVector stencilSelfValues(const discretize::LinearSystem& system, const KernelId& kernel) {
  const sparse::CsrMatrix& a = system.aFull;
  if (a.rows() != system.nodeIds.size()) throw SizeError("stencilSelfValues: system rows and node ids differ");
  const std::size_t side = system.grid.nodesPerSide();
  auto coords = [&](std::size_t id) { return system.grid.node(id % side, id / side); };
  const auto& offsets = a.rowOffsets();
  CVector d(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const std::size_t self = system.nodeIds[i];
    const Vec2 xi = coords(self);
    Complex diag(0.0, 0.0);
    Complex sum(0.0, 0.0);
    for (std::size_t k = offsets[i]; k < offsets[i + 1]; ++k) {
      const std::size_t j = a.columns()[k];
      if (j == self) {
        diag = a.values()[k];
      } else {
        sum += a.values()[k] * special::greens(kernel, coords(j), xi);
      }
    }
    if (std::abs(diag) < 1e-14) throw SingularError("stencilSelfValues: vanishing diagonal");
    d[i] = (1.0 - sum) / diag;
  }
  return d;
}

CVector volumePotential(const VolumeSources& sources, std::span<const Vec2> targets, const fmm::FmmConfig& config) {
  sources.validate();
  CVector charges(sources.points.size());
  for (std::size_t j = 0; j < charges.size(); ++j) charges[j] = sources.weights[j] * sources.values[j];
  if (targets.empty()) return {};
  if (sources.points.empty()) return CVector(targets.size());
  CVector u = fmm::evaluate(sources.points, charges, targets, config);
  if (sources.selfValue) {
    std::map<PointKey, std::size_t> index;
    for (std::size_t j = 0; j < sources.points.size(); ++j) index.emplace(key(sources.points[j]), j);
    for (std::size_t i = 0; i < targets.size(); ++i) {
      const auto it = index.find(key(targets[i]));
      if (it != index.end()) u[i] += *sources.selfValue * charges[it->second];
    }
  }
  return u;
}

CVector volumeToBoundary(const VolumeSources& sources, const BoundaryMesh& mesh, const fmm::FmmConfig& config) {
  const std::vector<Vec2> targets = mesh.midpoints();
  return volumePotential(sources, targets, config);
}

double InnerSolveSettings::resolvedTol(const fmm::FmmConfig& config) const {
  if (tol) return *tol;
  return std::max(config.epsilon.value_or(1e-6), 1e-6);
}

struct LayerPotential::Impl {
  std::size_t elements = 0;
  std::size_t targets = 0;
  std::vector<double> factors;        // |J|·w_l per Gauss point
  std::vector<std::size_t> owner;     // element per Gauss point
  std::vector<std::pair<std::size_t, std::size_t>> selfPairs;  // (target, element)
  CVector selfCorrection;
  std::optional<fmm::FmmPlan> plan;
};

LayerPotential::LayerPotential(const BoundaryMesh& mesh, std::span<const Vec2> targets, Layer layer,
                               const fmm::FmmConfig& config, int quadraturePoints)
    : impl_(std::make_unique<Impl>()) {
  const QuadratureRule rule = QuadratureRule::gaussLegendre(quadraturePoints);
  impl_->elements = mesh.size();
  impl_->targets = targets.size();
  std::vector<Vec2> points;
  std::vector<Vec2> normals;
  for (std::size_t j = 0; j < mesh.size(); ++j) {
    const Element& e = mesh.elements[j];
    for (std::size_t l = 0; l < rule.size(); ++l) {
      points.push_back(e.at(rule.nodes[l]));
      normals.push_back(e.normal);
      impl_->factors.push_back(0.5 * e.width * rule.weights[l]);
      impl_->owner.push_back(j);
    }
  }

  std::map<PointKey, std::size_t> midpointIndex;
  for (std::size_t j = 0; j < mesh.size(); ++j) midpointIndex.emplace(key(mesh.elements[j].midpoint), j);
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const auto it = midpointIndex.find(key(targets[i]));
    if (it == midpointIndex.end()) continue;
    const std::size_t j = it->second;
    const Element& e = mesh.elements[j];
    // Replace the Gauss-point sum over the own element by the exact self term.
    Complex gauss(0.0, 0.0);
    for (std::size_t l = 0; l < rule.size(); ++l) {
      const Vec2 x = e.at(rule.nodes[l]);
      const Complex k = layer == Layer::Single ? special::greens(config.kernel, x, targets[i])
                                               : special::greensNormalDeriv(config.kernel, x, targets[i], e.normal);
      gauss += 0.5 * e.width * rule.weights[l] * k;
    }
    const Complex exact = layer == Layer::Single ? special::singularSelfIntegral(config.kernel, e.width) : Complex(0.0, 0.0);
    impl_->selfPairs.emplace_back(i, j);
    impl_->selfCorrection.push_back(exact - gauss);
  }
  if (!targets.empty() && !points.empty()) {
    impl_->plan.emplace(points, targets, config, layer == Layer::Double ? std::span<const Vec2>(normals) : std::span<const Vec2>());
  }
}

LayerPotential::~LayerPotential() = default;
LayerPotential::LayerPotential(LayerPotential&&) noexcept = default;
LayerPotential& LayerPotential::operator=(LayerPotential&&) noexcept = default;

std::size_t LayerPotential::elementCount() const { return impl_->elements; }
std::size_t LayerPotential::targetCount() const { return impl_->targets; }

CVector LayerPotential::evaluate(std::span<const Complex> density) const {
  if (density.size() != impl_->elements) throw SizeError("LayerPotential::evaluate: density has the wrong length");
  if (!impl_->plan) return CVector(impl_->targets);
  CVector charges(impl_->factors.size());
  for (std::size_t k = 0; k < charges.size(); ++k) charges[k] = impl_->factors[k] * density[impl_->owner[k]];
  CVector u = impl_->plan->evaluate(charges);
  for (std::size_t s = 0; s < impl_->selfPairs.size(); ++s) {
    const auto [i, j] = impl_->selfPairs[s];
    u[i] += impl_->selfCorrection[s] * density[j];
  }
  return u;
}

namespace {

dense::DenseMatrix materialize(const LayerPotential& op) {
  const std::size_t n = op.elementCount();
  dense::DenseMatrix m(static_cast<Eigen::Index>(op.targetCount()), static_cast<Eigen::Index>(n));
  CVector e(n);
  for (std::size_t j = 0; j < n; ++j) {
    e[j] = 1.0;
    const CVector col = op.evaluate(e);
    for (std::size_t i = 0; i < col.size(); ++i) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = col[i];
    e[j] = 0.0;
  }
  return m;
}

/// Solves S q = rhs for the single-layer operator at the collocation points.
CVector innerSolve(const LayerPotential& single, const dense::DenseLu* lu, std::span<const Complex> rhs,
                   const InnerSolveSettings& inner, const fmm::FmmConfig& config, krylov::SolveReport* out) {
  if (allZero(rhs)) {
    if (out != nullptr) *out = krylov::SolveReport{0, 0, {0.0}, true, CVector(rhs.size()), 0.0, 0.0};
    return CVector(rhs.size());
  }
  if (lu != nullptr) {
    CVector q = lu->solve(rhs);
    if (out != nullptr) *out = krylov::SolveReport{0, 0, {}, true, q, 0.0, 0.0};
    return q;
  }
  krylov::FunctionOperator op(rhs.size(), [&single](std::span<const Complex> x, std::span<Complex> y) {
    const CVector v = single.evaluate(x);
    std::copy(v.begin(), v.end(), y.begin());
  });
  krylov::GmresOptions options;
  options.tol = inner.resolvedTol(config);
  options.restart = inner.restart;
  options.maxIterations = inner.maxIterations;
  options.maxOuter = inner.maxIterations;
  krylov::SolveReport report = krylov::gmres(op, rhs, options);
  if (out != nullptr) *out = report;
  if (!report.converged) {
    CVector flux = report.solution;
    throw InnerSolveError("boundary flux solve did not reach its tolerance in " + std::to_string(report.iterations) +
                              " iterations",
                          std::move(flux), std::move(report));
  }
  return std::move(report.solution);
}

}  // namespace

CVector solveBoundaryFlux(const BoundaryMesh& mesh, std::span<const Complex> dirichlet,
                          std::span<const Complex> volumeTerm, const fmm::FmmConfig& config,
                          const InnerSolveSettings& inner, krylov::SolveReport* report) {
  const std::size_t n = mesh.size();
  if (dirichlet.size() != n || volumeTerm.size() != n) throw SizeError("solveBoundaryFlux: data length differs from the mesh");
  const std::vector<Vec2> mids = mesh.midpoints();
  CVector rhs(n);
  for (std::size_t i = 0; i < n; ++i) rhs[i] = 0.5 * dirichlet[i] - volumeTerm[i];
  if (!allZero(dirichlet)) {
    const LayerPotential dbl(mesh, mids, Layer::Double, config);
    addInPlace(rhs, dbl.evaluate(dirichlet));
  }
  const LayerPotential single(mesh, mids, Layer::Single, config);
  std::optional<dense::DenseLu> lu;
  if (inner.method == InnerSolveSettings::Method::DenseLu) lu.emplace(materialize(single));
  return innerSolve(single, lu ? &*lu : nullptr, rhs, inner, config, report);
}

CVector evaluateInterior(const BoundaryMesh& mesh, std::span<const Complex> flux, std::span<const Complex> dirichlet,
                         const VolumeSources& sources, std::span<const Vec2> targets, const fmm::FmmConfig& config) {
  if (flux.size() != mesh.size() || dirichlet.size() != mesh.size()) {
    throw SizeError("evaluateInterior: boundary data length differs from the mesh");
  }
  CVector u = volumePotential(sources, targets, config);
  if (u.empty()) u.assign(targets.size(), Complex(0.0, 0.0));
  if (!allZero(flux)) addInPlace(u, LayerPotential(mesh, targets, Layer::Single, config).evaluate(flux));
  if (!allZero(dirichlet)) {
    const CVector d = LayerPotential(mesh, targets, Layer::Double, config).evaluate(dirichlet);
    for (std::size_t i = 0; i < u.size(); ++i) u[i] -= d[i];
  }
  return u;
}

namespace {

Complex selfValueFor(const BemSettings& settings, double spacing) {
  switch (settings.selfTerm) {
    case BemSettings::SelfTerm::Stencil: return stencilSelfValue(settings.fmm.kernel, spacing);
    case BemSettings::SelfTerm::CellAverage: return cellAverageGreens(settings.fmm.kernel, spacing);
    case BemSettings::SelfTerm::None: break;
  }
  return {0.0, 0.0};
}

double chargeScaleFor(const BemSettings& settings, double weight) {
  if (!(weight > 0.0)) throw DomainError("volume weight must be positive");
  return weight * settings.sigma.value_or(1.0 / weight);
}

}  // namespace

struct BemPreconditioner::Impl {
  BoundaryMesh mesh;
  std::vector<Vec2> points;
  BemSettings settings;
  double chargeScale = 1.0;
  CVector selfValues;
  std::optional<LayerPotential> singleBoundary;
  std::optional<LayerPotential> singleInterior;
  std::optional<fmm::FmmPlan> volumeBoundary;
  std::optional<fmm::FmmPlan> volumeInterior;
  std::optional<dense::DenseLu> lu;
  mutable std::atomic<std::size_t> applies{0};
  mutable std::atomic<std::size_t> innerIterations{0};
  mutable std::atomic<std::size_t> innerFailures{0};
};

BemPreconditioner::BemPreconditioner(BoundaryMesh mesh, std::vector<Vec2> volumePoints, double volumeWeight,
                                     BemSettings settings, CVector selfValues)
    : impl_(std::make_unique<Impl>()) {
  settings.fmm.validate();
  if (volumePoints.empty()) throw DomainError("BemPreconditioner: no volume points");
  Impl& s = *impl_;
  s.mesh = std::move(mesh);
  s.points = std::move(volumePoints);
  s.settings = std::move(settings);
  s.chargeScale = chargeScaleFor(s.settings, volumeWeight);
  if (selfValues.empty()) {
    s.selfValues.assign(s.points.size(), selfValueFor(s.settings, std::sqrt(volumeWeight)));
  } else if (selfValues.size() != s.points.size()) {
    throw SizeError("BemPreconditioner: one self value per volume point is required");
  } else {
    s.selfValues = std::move(selfValues);
  }
  const std::vector<Vec2> mids = s.mesh.midpoints();
  s.singleBoundary.emplace(s.mesh, mids, Layer::Single, s.settings.fmm, s.settings.quadraturePoints);
  s.singleInterior.emplace(s.mesh, s.points, Layer::Single, s.settings.fmm, s.settings.quadraturePoints);
  s.volumeBoundary.emplace(s.points, mids, s.settings.fmm);
  s.volumeInterior.emplace(s.points, s.points, s.settings.fmm);
  if (s.settings.inner.method == InnerSolveSettings::Method::DenseLu) s.lu.emplace(materialize(*s.singleBoundary));
}

BemPreconditioner BemPreconditioner::forSystem(const discretize::LinearSystem& system, BemSettings settings) {
  const discretize::Grid& grid = system.grid;
  settings.fmm.kernel = KernelId::forWavenumber2d(system.kappa);
  const double spacing = grid.spacing();
  CVector self;
  if (settings.selfTerm == BemSettings::SelfTerm::Stencil) self = stencilSelfValues(system, settings.fmm.kernel);
  return BemPreconditioner(discretizeBoundary(Square{grid.lower, grid.upper}, grid.n), system.nodes, spacing * spacing,
                           std::move(settings), std::move(self));
}

BemPreconditioner::~BemPreconditioner() = default;
BemPreconditioner::BemPreconditioner(BemPreconditioner&&) noexcept = default;
BemPreconditioner& BemPreconditioner::operator=(BemPreconditioner&&) noexcept = default;

std::size_t BemPreconditioner::size() const { return impl_->points.size(); }
const BoundaryMesh& BemPreconditioner::mesh() const { return impl_->mesh; }
const BemSettings& BemPreconditioner::settings() const { return impl_->settings; }

PreconditionerStats BemPreconditioner::stats() const {
  return {impl_->applies.load(), impl_->innerIterations.load(), impl_->innerFailures.load()};
}

void BemPreconditioner::apply(std::span<const Complex> r, std::span<Complex> z) const {
  const Impl& s = *impl_;
  if (r.size() != size() || z.size() != size()) throw SizeError("BemPreconditioner::apply: length mismatch");
  ++s.applies;
  const CVector charges = scaled(r, s.chargeScale);
  CVector rhs = s.volumeBoundary->evaluate(charges);
  for (Complex& v : rhs) v = -v;

  CVector flux;
  krylov::SolveReport report;
  try {
    flux = innerSolve(*s.singleBoundary, s.lu ? &*s.lu : nullptr, rhs, s.settings.inner, s.settings.fmm, &report);
  } catch (const InnerSolveError& e) {
    ++s.innerFailures;
    flux = e.flux();
    report = e.report();
  }
  s.innerIterations += static_cast<std::size_t>(report.iterations);

  const CVector boundary = s.singleInterior->evaluate(flux);
  const CVector volume = s.volumeInterior->evaluate(charges);
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = boundary[i] + volume[i] + s.selfValues[i] * charges[i];
}

DenseBemPipeline::DenseBemPipeline(const BoundaryMesh& mesh, std::span<const Vec2> volumePoints, double volumeWeight,
                                   const BemSettings& settings, CVector selfValues)
    : chargeScale_(chargeScaleFor(settings, volumeWeight)) {
  const KernelId& kernel = settings.fmm.kernel;
  const QuadratureRule rule = QuadratureRule::gaussLegendre(settings.quadraturePoints);
  const std::vector<Vec2> mids = mesh.midpoints();
  if (selfValues.empty()) selfValues.assign(volumePoints.size(), selfValueFor(settings, std::sqrt(volumeWeight)));
  if (selfValues.size() != volumePoints.size()) throw SizeError("DenseBemPipeline: one self value per volume point is required");
  const auto nb = static_cast<Eigen::Index>(mids.size());
  const auto nv = static_cast<Eigen::Index>(volumePoints.size());
  volumeToBoundary_.resize(nb, nv);
  volumeToInterior_.resize(nv, nv);
  for (Eigen::Index j = 0; j < nv; ++j) {
    const Vec2 source = volumePoints[static_cast<std::size_t>(j)];
    for (Eigen::Index i = 0; i < nb; ++i) volumeToBoundary_(i, j) = special::greens(kernel, source, mids[static_cast<std::size_t>(i)]);
    for (Eigen::Index i = 0; i < nv; ++i) {
      volumeToInterior_(i, j) = i == j ? selfValues[static_cast<std::size_t>(i)] : special::greens(kernel, source, volumePoints[static_cast<std::size_t>(i)]);
    }
  }
  singleToInterior_ = assembleLayer(mesh, volumePoints, Layer::Single, kernel, rule);
  single_.emplace(assembleLayer(mesh, mids, Layer::Single, kernel, rule));
}

CVector DenseBemPipeline::apply(std::span<const Complex> r) const {
  const Eigen::VectorXcd charges = chargeScale_ * dense::view(r);
  const Eigen::VectorXcd rhs = -(volumeToBoundary_ * charges);
  const CVector q = single_->solve(std::span<const Complex>(rhs.data(), static_cast<std::size_t>(rhs.size())));
  const Eigen::VectorXcd z = singleToInterior_ * dense::view(q) + volumeToInterior_ * charges;
  return {z.data(), z.data() + z.size()};
}

}  // namespace helmfmm::bem
