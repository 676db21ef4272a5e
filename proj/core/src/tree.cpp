#include "helmfmm/tree.hpp"

#include <algorithm>
#include <limits>

namespace helmfmm::tree {

namespace {

constexpr double kRootMargin = 1e-6;

int quadrant(Vec2 p, Vec2 center) {
  return (p.x >= center.x ? 1 : 0) + (p.y >= center.y ? 2 : 0);
}

}  // namespace

Tree Tree::build(std::span<const Vec2> points, std::span<const Complex> charges, int ncrit,
                 int maxLevel) {
  if (points.empty()) throw DomainError("Tree::build needs at least one point");
  if (charges.size() != points.size()) throw SizeError("Tree::build: charges and points differ in length");
  if (ncrit < 1) throw DomainError("ncrit must be >= 1");
  if (maxLevel < 0) throw DomainError("maxLevel must be >= 0");

  Tree tree;
  const std::size_t n = points.size();
  tree.bodies_.resize(n);
  double xmin = std::numeric_limits<double>::infinity();
  double ymin = xmin;
  double xmax = -xmin;
  double ymax = -xmin;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 p = points[i];
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw DomainError("Tree::build: non-finite coordinate");
    tree.bodies_[i] = Body{p, charges[i], i};
    xmin = std::min(xmin, p.x);
    xmax = std::max(xmax, p.x);
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }

  Cell root;
  root.center = {0.5 * (xmin + xmax), 0.5 * (ymin + ymax)};
  double half = 0.5 * std::max(xmax - xmin, ymax - ymin);
  if (half == 0.0) half = 0.5 * std::max(1.0, std::max(std::abs(root.center.x), std::abs(root.center.y)));
  root.halfWidth = half * (1.0 + kRootMargin);
  root.begin = 0;
  root.end = n;
  tree.cells_.push_back(root);

  std::vector<Body> scratch(n);
  // The cell vector doubles as the breadth-first work queue.
  for (std::size_t c = 0; c < tree.cells_.size(); ++c) {
    const Cell cell = tree.cells_[c];
    if (cell.size() <= static_cast<std::size_t>(ncrit)) continue;
    if (cell.level >= maxLevel) {
      throw DegenerateError("Tree::build: " + std::to_string(cell.size()) + " bodies remain in a cell at maxLevel " +
                            std::to_string(maxLevel) + " (coincident points?)");
    }
    std::array<std::size_t, 4> counts{};
    for (std::size_t i = cell.begin; i < cell.end; ++i) ++counts[static_cast<std::size_t>(quadrant(tree.bodies_[i].position, cell.center))];
    std::array<std::size_t, 4> offsets{};
    offsets[0] = cell.begin;
    for (std::size_t q = 1; q < 4; ++q) offsets[q] = offsets[q - 1] + counts[q - 1];
    std::array<std::size_t, 4> cursor = offsets;
    for (std::size_t i = cell.begin; i < cell.end; ++i) {
      const auto q = static_cast<std::size_t>(quadrant(tree.bodies_[i].position, cell.center));
      scratch[cursor[q]++] = tree.bodies_[i];
    }
    std::copy(scratch.begin() + static_cast<std::ptrdiff_t>(cell.begin), scratch.begin() + static_cast<std::ptrdiff_t>(cell.end),
              tree.bodies_.begin() + static_cast<std::ptrdiff_t>(cell.begin));

    const double childHalf = 0.5 * cell.halfWidth;
    int childCount = 0;
    for (std::size_t q = 0; q < 4; ++q) {
      if (counts[q] == 0) continue;
      Cell child;
      child.center = {cell.center.x + ((q & 1U) ? childHalf : -childHalf),
                      cell.center.y + ((q & 2U) ? childHalf : -childHalf)};
      child.halfWidth = childHalf;
      child.level = cell.level + 1;
      child.begin = offsets[q];
      child.end = offsets[q] + counts[q];
      child.parent = static_cast<int>(c);
      tree.cells_[c].children[q] = static_cast<int>(tree.cells_.size());
      tree.cells_.push_back(child);
      ++childCount;
    }
    tree.cells_[c].childCount = childCount;
  }

  tree.permutation_.resize(n);
  for (std::size_t i = 0; i < n; ++i) tree.permutation_[i] = tree.bodies_[i].index;
  return tree;
}

Tree Tree::build(std::span<const Vec2> points, int ncrit, int maxLevel) {
  const CVector zeros(points.size());
  return build(points, zeros, ncrit, maxLevel);
}

std::vector<int> Tree::leaves() const {
  std::vector<int> result;
  for (std::size_t c = 0; c < cells_.size(); ++c) {
    if (cells_[c].isLeaf()) result.push_back(static_cast<int>(c));
  }
  return result;
}

int Tree::depth() const { return cells_.back().level; }

CVector Tree::toTreeOrder(std::span<const Complex> values) const {
  if (values.size() != permutation_.size()) throw SizeError("toTreeOrder: length mismatch");
  CVector out(values.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = values[permutation_[i]];
  return out;
}

CVector Tree::fromTreeOrder(std::span<const Complex> values) const {
  if (values.size() != permutation_.size()) throw SizeError("fromTreeOrder: length mismatch");
  CVector out(values.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[permutation_[i]] = values[i];
  return out;
}

bool wellSeparated(const Cell& source, const Cell& target, double theta) {
  const double dist = norm(source.center - target.center);
  return dist * theta > source.radius() + target.radius();
}

InteractionLists dualTraversal(const Tree& source, const Tree& target, double theta) {
  return dualTraversal(source, target, theta, [](const Cell&, const Cell&) { return true; });
}

}  // namespace helmfmm::tree
