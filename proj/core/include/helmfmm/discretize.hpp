#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>

#include "helmfmm/sparse.hpp"

namespace helmfmm::discretize {

/// Uniform grid of n × n square cells on [lower, upper]².
struct Grid {
  double lower = 0.0;
  double upper = 1.0;
  int n = 2;

  double spacing() const { return (upper - lower) / n; }
  std::size_t nodesPerSide() const { return static_cast<std::size_t>(n) + 1; }
  std::size_t nodeCount() const { return nodesPerSide() * nodesPerSide(); }
  std::size_t interiorCount() const { return static_cast<std::size_t>(n - 1) * static_cast<std::size_t>(n - 1); }
  std::size_t nodeId(std::size_t i, std::size_t j) const { return i + j * nodesPerSide(); }
  Vec2 node(std::size_t i, std::size_t j) const { return {lower + spacing() * static_cast<double>(i), lower + spacing() * static_cast<double>(j)}; }
  /// Interior node coordinates in interior-index order (x fastest).
  std::vector<Vec2> interiorNodes() const;
  void validate() const;
};

enum class ElementType { Q1, Q2 };

std::string toString(ElementType type);
ElementType parseElementType(const std::string& text);

/// Element matrices on the reference layout. Q1 nodes are ordered
/// counterclockwise from the lower-left corner; Q2 nodes row by row (x fastest).
std::array<double, 16> elementStiffnessQ1();
std::array<double, 16> elementMassQ1(double h);
std::array<double, 81> elementStiffnessQ2();
/// Q2 element of side 2h (node spacing h).
std::array<double, 81> elementMassQ2(double h);

struct FemMatrices {
  sparse::CsrMatrix stiffness;  // interior × interior
  sparse::CsrMatrix mass;
  sparse::CsrMatrix stiffnessFull;  // interior rows × all nodes
  sparse::CsrMatrix massFull;
  std::vector<std::ptrdiff_t> interiorIndex;  // per node, −1 on the boundary
  std::vector<std::size_t> interiorNodes;     // node id per interior unknown
};

FemMatrices assembleQ1(const Grid& grid);
/// Requires even n: each element spans 2 × 2 cells.
FemMatrices assembleQ2(const Grid& grid);
FemMatrices assemble(const Grid& grid, ElementType type);

enum class ProblemId { P1, P2, P3, P4 };

std::string toString(ProblemId id);
ProblemId parseProblemId(const std::string& text);

using Field = std::function<double(Vec2)>;

/// ∇²u + κ²u = f in Ω, u = g on ∂Ω, Ω = [lower, upper]².
struct ProblemSpec {
  ProblemId id = ProblemId::P1;
  std::string description;
  double lower = 0.0;
  double upper = 1.0;
  double kappa = 0.0;
  std::optional<double> mu;
  Field source;
  Field dirichlet;
  std::optional<Field> exact;

  /// Grid with n = 1/h cells per side on this problem's domain.
  Grid gridForH(double h) const;
};

/// Unit square, u = sin(πx) sin(2πy).
ProblemSpec problemP1(double kappa);
/// [−1, 1]², Gaussian source centered at (0.5, 1), zero Dirichlet data.
ProblemSpec problemP2(double kappa);
/// Unit square, f = 1, zero Dirichlet data.
ProblemSpec problemP3(double kappa = 0.0);
/// Unit square, κ = μ√2, u = x² sin(μx) cos(μy).
ProblemSpec problemP4(double mu);
/// P4 takes μ, the others κ.
ProblemSpec makeProblem(ProblemId id, double parameter);
/// One representative instance of each problem.
std::vector<ProblemSpec> builtinProblems();

struct LinearSystem {
  sparse::CsrMatrix a;
  /// Rows of K − κ²M for the interior nodes over all grid nodes.
  sparse::CsrMatrix aFull;
  /// Grid node id of each interior unknown.
  std::vector<std::size_t> nodeIds;
  CVector b;
  std::vector<Vec2> nodes;  // interior node coordinates
  Grid grid;
  ElementType element = ElementType::Q1;
  double kappa = 0.0;
};

/// A = K − κ²M over the interior nodes, b = −M f − A_IB g_B.
LinearSystem buildSystem(const ProblemSpec& problem, const Grid& grid, ElementType element);

/// Exact solution sampled at the interior nodes (throws when unknown).
CVector exactSolution(const ProblemSpec& problem, const LinearSystem& system);

}  // namespace helmfmm::discretize
