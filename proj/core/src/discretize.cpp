#include "helmfmm/discretize.hpp"

#include <algorithm>

namespace helmfmm::discretize {

std::vector<Vec2> Grid::interiorNodes() const {
  std::vector<Vec2> nodes;
  nodes.reserve(interiorCount());
  for (int j = 1; j < n; ++j) {
    for (int i = 1; i < n; ++i) nodes.push_back(node(static_cast<std::size_t>(i), static_cast<std::size_t>(j)));
  }
  return nodes;
}

void Grid::validate() const {
  if (n < 2) throw DomainError("Grid needs n >= 2 cells per side");
  if (!(upper > lower)) throw DomainError("Grid needs upper > lower");
}

std::string toString(ElementType type) { return type == ElementType::Q1 ? "Q1" : "Q2"; }

ElementType parseElementType(const std::string& text) {
  if (text == "Q1" || text == "q1") return ElementType::Q1;
  if (text == "Q2" || text == "q2") return ElementType::Q2;
  throw ConfigError("unknown element type '" + text + "'");
}

std::array<double, 16> elementStiffnessQ1() {
  std::array<double, 16> k{4, -1, -2, -1, -1, 4, -1, -2, -2, -1, 4, -1, -1, -2, -1, 4};
  for (double& v : k) v /= 6.0;
  return k;
}

std::array<double, 16> elementMassQ1(double h) {
  std::array<double, 16> m{4, 2, 1, 2, 2, 4, 2, 1, 1, 2, 4, 2, 2, 1, 2, 4};
  for (double& v : m) v *= h * h / 36.0;
  return m;
}

namespace {

struct Quadratic1d {
  static double value(int a, double x) {
    switch (a) {
      case 0: return 0.5 * x * (x - 1.0);
      case 1: return 1.0 - x * x;
      default: return 0.5 * x * (x + 1.0);
    }
  }
  static double derivative(int a, double x) {
    switch (a) {
      case 0: return x - 0.5;
      case 1: return -2.0 * x;
      default: return x + 0.5;
    }
  }
};

// 3-point Gauss–Legendre on [−1, 1].
constexpr std::array<double, 3> kGaussNodes{-0.7745966692414834, 0.0, 0.7745966692414834};
constexpr std::array<double, 3> kGaussWeights{5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};

template <std::size_t N>
std::array<double, N * N> q2Integral(bool stiffness) {
  std::array<double, N * N> result{};
  for (std::size_t qx = 0; qx < 3; ++qx) {
    for (std::size_t qy = 0; qy < 3; ++qy) {
      const double x = kGaussNodes[qx];
      const double y = kGaussNodes[qy];
      const double w = kGaussWeights[qx] * kGaussWeights[qy];
      for (std::size_t r = 0; r < N; ++r) {
        const int ra = static_cast<int>(r % 3);
        const int rb = static_cast<int>(r / 3);
        for (std::size_t c = r; c < N; ++c) {
          const int ca = static_cast<int>(c % 3);
          const int cb = static_cast<int>(c / 3);
          double v;
          if (stiffness) {
            v = Quadratic1d::derivative(ra, x) * Quadratic1d::value(rb, y) * Quadratic1d::derivative(ca, x) * Quadratic1d::value(cb, y) +
                Quadratic1d::value(ra, x) * Quadratic1d::derivative(rb, y) * Quadratic1d::value(ca, x) * Quadratic1d::derivative(cb, y);
          } else {
            v = Quadratic1d::value(ra, x) * Quadratic1d::value(rb, y) * Quadratic1d::value(ca, x) * Quadratic1d::value(cb, y);
          }
          result[r * N + c] += w * v;
        }
      }
    }
  }
  for (std::size_t r = 0; r < N; ++r) {
    for (std::size_t c = 0; c < r; ++c) result[r * N + c] = result[c * N + r];
  }
  return result;
}

struct Assembler {
  const Grid& grid;
  FemMatrices result;
  std::vector<sparse::Triplet> stiffness;
  std::vector<sparse::Triplet> mass;

  explicit Assembler(const Grid& g) : grid(g) {
    result.interiorIndex.assign(grid.nodeCount(), -1);
    const auto n = static_cast<std::size_t>(grid.n);
    for (std::size_t j = 1; j < n; ++j) {
      for (std::size_t i = 1; i < n; ++i) {
        const std::size_t id = grid.nodeId(i, j);
        result.interiorIndex[id] = static_cast<std::ptrdiff_t>(result.interiorNodes.size());
        result.interiorNodes.push_back(id);
      }
    }
  }

  template <std::size_t N>
  void add(const std::array<std::size_t, N>& nodes, const std::array<double, N * N>& k, const std::array<double, N * N>& m) {
    for (std::size_t r = 0; r < N; ++r) {
      const std::ptrdiff_t row = result.interiorIndex[nodes[r]];
      if (row < 0) continue;
      for (std::size_t c = 0; c < N; ++c) {
        stiffness.push_back({static_cast<std::size_t>(row), nodes[c], k[r * N + c]});
        mass.push_back({static_cast<std::size_t>(row), nodes[c], m[r * N + c]});
      }
    }
  }

  FemMatrices finish() {
    const std::size_t ni = result.interiorNodes.size();
    result.stiffnessFull = sparse::CsrMatrix::fromTriplets(ni, grid.nodeCount(), stiffness);
    result.massFull = sparse::CsrMatrix::fromTriplets(ni, grid.nodeCount(), mass);
    auto restrict = [&](std::vector<sparse::Triplet> triplets) {
      std::vector<sparse::Triplet> kept;
      kept.reserve(triplets.size());
      for (const auto& t : triplets) {
        const std::ptrdiff_t col = result.interiorIndex[t.col];
        if (col >= 0) kept.push_back({t.row, static_cast<std::size_t>(col), t.value});
      }
      return sparse::CsrMatrix::fromTriplets(ni, ni, std::move(kept));
    };
    result.stiffness = restrict(std::move(stiffness));
    result.mass = restrict(std::move(mass));
    return std::move(result);
  }
};

}  // namespace

std::array<double, 81> elementStiffnessQ2() { return q2Integral<9>(true); }

std::array<double, 81> elementMassQ2(double h) {
  auto m = q2Integral<9>(false);
  for (double& v : m) v *= h * h;
  return m;
}

FemMatrices assembleQ1(const Grid& grid) {
  grid.validate();
  Assembler assembler(grid);
  const auto k = elementStiffnessQ1();
  const auto m = elementMassQ1(grid.spacing());
  const auto n = static_cast<std::size_t>(grid.n);
  for (std::size_t ey = 0; ey < n; ++ey) {
    for (std::size_t ex = 0; ex < n; ++ex) {
      const std::array<std::size_t, 4> nodes{grid.nodeId(ex, ey), grid.nodeId(ex + 1, ey), grid.nodeId(ex + 1, ey + 1),
                                             grid.nodeId(ex, ey + 1)};
      assembler.add<4>(nodes, k, m);
    }
  }
  return assembler.finish();
}

FemMatrices assembleQ2(const Grid& grid) {
  grid.validate();
  if (grid.n % 2 != 0) throw DomainError("assembleQ2 needs an even number of cells per side");
  Assembler assembler(grid);
  const auto k = elementStiffnessQ2();
  const auto m = elementMassQ2(grid.spacing());
  const auto n = static_cast<std::size_t>(grid.n);
  for (std::size_t ey = 0; ey < n; ey += 2) {
    for (std::size_t ex = 0; ex < n; ex += 2) {
      std::array<std::size_t, 9> nodes{};
      for (std::size_t b = 0; b < 3; ++b) {
        for (std::size_t a = 0; a < 3; ++a) nodes[a + 3 * b] = grid.nodeId(ex + a, ey + b);
      }
      assembler.add<9>(nodes, k, m);
    }
  }
  return assembler.finish();
}

FemMatrices assemble(const Grid& grid, ElementType type) {
  return type == ElementType::Q1 ? assembleQ1(grid) : assembleQ2(grid);
}

std::string toString(ProblemId id) {
  switch (id) {
    case ProblemId::P1: return "P1";
    case ProblemId::P2: return "P2";
    case ProblemId::P3: return "P3";
    case ProblemId::P4: return "P4";
  }
  return "?";
}

ProblemId parseProblemId(const std::string& text) {
  if (text == "P1" || text == "p1") return ProblemId::P1;
  if (text == "P2" || text == "p2") return ProblemId::P2;
  if (text == "P3" || text == "p3") return ProblemId::P3;
  if (text == "P4" || text == "p4") return ProblemId::P4;
  throw ConfigError("unknown problem '" + text + "'");
}

Grid ProblemSpec::gridForH(double h) const {
  if (!(h > 0.0) || h > 0.5) throw DomainError("h must lie in (0, 0.5]");
  const int n = static_cast<int>(std::lround(1.0 / h));
  return Grid{lower, upper, n};
}

ProblemSpec problemP1(double kappa) {
  if (kappa < 0.0) throw DomainError("kappa must be >= 0");
  ProblemSpec p;
  p.id = ProblemId::P1;
  p.description = "unit square, u = sin(pi x) sin(2 pi y)";
  p.kappa = kappa;
  p.source = [kappa](Vec2 x) { return (kappa * kappa - 5.0 * kPi * kPi) * std::sin(kPi * x.x) * std::sin(2.0 * kPi * x.y); };
  p.dirichlet = [](Vec2) { return 0.0; };
  p.exact = Field([](Vec2 x) { return std::sin(kPi * x.x) * std::sin(2.0 * kPi * x.y); });
  return p;
}

ProblemSpec problemP2(double kappa) {
  if (kappa < 0.0) throw DomainError("kappa must be >= 0");
  ProblemSpec p;
  p.id = ProblemId::P2;
  p.description = "[-1,1]^2, Gaussian source at (0.5, 1)";
  p.lower = -1.0;
  p.upper = 1.0;
  p.kappa = kappa;
  p.source = [](Vec2 x) { return std::exp(-10.0 * ((x.y - 1.0) * (x.y - 1.0) + (x.x - 0.5) * (x.x - 0.5))); };
  p.dirichlet = [](Vec2) { return 0.0; };
  return p;
}

ProblemSpec problemP3(double kappa) {
  if (kappa < 0.0) throw DomainError("kappa must be >= 0");
  ProblemSpec p;
  p.id = ProblemId::P3;
  p.description = "unit square, f = 1";
  p.kappa = kappa;
  p.source = [](Vec2) { return 1.0; };
  p.dirichlet = [](Vec2) { return 0.0; };
  return p;
}

ProblemSpec problemP4(double mu) {
  if (mu < 0.0) throw DomainError("mu must be >= 0");
  ProblemSpec p;
  p.id = ProblemId::P4;
  p.description = "unit square, u = x^2 sin(mu x) cos(mu y)";
  p.kappa = mu * std::sqrt(2.0);
  p.mu = mu;
  p.source = [mu](Vec2 x) {
    return 2.0 * std::sin(mu * x.x) * std::cos(mu * x.y) + 4.0 * mu * x.x * std::cos(mu * x.x) * std::cos(mu * x.y);
  };
  p.exact = Field([mu](Vec2 x) { return x.x * x.x * std::sin(mu * x.x) * std::cos(mu * x.y); });
  p.dirichlet = *p.exact;
  return p;
}

ProblemSpec makeProblem(ProblemId id, double parameter) {
  switch (id) {
    case ProblemId::P1: return problemP1(parameter);
    case ProblemId::P2: return problemP2(parameter);
    case ProblemId::P3: return problemP3(parameter);
    case ProblemId::P4: return problemP4(parameter);
  }
  throw DomainError("unknown problem id");
}

std::vector<ProblemSpec> builtinProblems() {
  return {problemP1(15.0), problemP2(5.0), problemP3(0.0), problemP4(1.0)};
}

LinearSystem buildSystem(const ProblemSpec& problem, const Grid& grid, ElementType element) {
  grid.validate();
  if (grid.lower != problem.lower || grid.upper != problem.upper) throw DomainError("buildSystem: grid and problem domains differ");
  const FemMatrices fem = assemble(grid, element);
  const double k2 = problem.kappa * problem.kappa;

  LinearSystem system;
  system.grid = grid;
  system.element = element;
  system.kappa = problem.kappa;
  system.a = sparse::CsrMatrix::combine(1.0, fem.stiffness, -k2, fem.mass);
  system.aFull = sparse::CsrMatrix::combine(1.0, fem.stiffnessFull, -k2, fem.massFull);
  system.nodeIds = fem.interiorNodes;
  system.nodes = grid.interiorNodes();

  // Nodal source values everywhere, Dirichlet data on boundary nodes only.
  const std::size_t nodes = grid.nodeCount();
  CVector f(nodes);
  CVector g(nodes);
  for (std::size_t j = 0; j < grid.nodesPerSide(); ++j) {
    for (std::size_t i = 0; i < grid.nodesPerSide(); ++i) {
      const std::size_t id = grid.nodeId(i, j);
      const Vec2 x = grid.node(i, j);
      f[id] = problem.source(x);
      if (fem.interiorIndex[id] < 0) g[id] = problem.dirichlet(x);
    }
  }
  const CVector mf = fem.massFull * f;
  const CVector ag = system.aFull * g;
  system.b.resize(fem.interiorNodes.size());
  for (std::size_t i = 0; i < system.b.size(); ++i) system.b[i] = -mf[i] - ag[i];
  return system;
}

CVector exactSolution(const ProblemSpec& problem, const LinearSystem& system) {
  if (!problem.exact) throw DomainError("problem " + toString(problem.id) + " has no exact solution");
  CVector u(system.nodes.size());
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = (*problem.exact)(system.nodes[i]);
  return u;
}

}  // namespace helmfmm::discretize
