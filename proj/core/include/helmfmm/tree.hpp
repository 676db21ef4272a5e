#pragma once

#include <array>
#include <span>
#include <utility>
#include <vector>

#include "helmfmm/common.hpp"

namespace helmfmm::tree {

struct Body {
  Vec2 position;
  Complex charge;
  std::size_t index = 0;  // position in the caller's original ordering
};

struct Cell {
  Vec2 center;
  double halfWidth = 0.0;
  int level = 0;
  std::size_t begin = 0;  // body range [begin, end) in tree order
  std::size_t end = 0;
  int parent = -1;
  std::array<int, 4> children{-1, -1, -1, -1};  // quadrant order, -1 when empty
  int childCount = 0;

  bool isLeaf() const { return childCount == 0; }
  std::size_t size() const { return end - begin; }
  /// Radius of the circumscribed circle.
  double radius() const { return halfWidth * std::sqrt(2.0); }
};

inline constexpr int kDefaultNcrit = 64;
inline constexpr int kDefaultMaxLevel = 24;

/// Quadtree over a 2D point cloud. Cells are stored in breadth-first level
/// order with the root at index 0; bodies are stored permuted so that every
/// cell owns a contiguous range.
class Tree {
 public:
  /// Throws DegenerateError when a cell at maxLevel still holds more than
  /// ncrit bodies (coincident points).
  static Tree build(std::span<const Vec2> points, std::span<const Complex> charges,
                    int ncrit = kDefaultNcrit, int maxLevel = kDefaultMaxLevel);
  /// Charges default to zero.
  static Tree build(std::span<const Vec2> points, int ncrit = kDefaultNcrit,
                    int maxLevel = kDefaultMaxLevel);

  const std::vector<Cell>& cells() const { return cells_; }
  const std::vector<Body>& bodies() const { return bodies_; }
  /// permutation()[i] is the original index of the body stored at tree slot i.
  const std::vector<std::size_t>& permutation() const { return permutation_; }
  const Cell& root() const { return cells_.front(); }
  std::vector<int> leaves() const;
  int depth() const;

  /// Reorders caller-indexed values into tree order.
  CVector toTreeOrder(std::span<const Complex> values) const;
  /// Scatters tree-ordered values back to the caller's ordering.
  CVector fromTreeOrder(std::span<const Complex> values) const;

 private:
  std::vector<Cell> cells_;
  std::vector<Body> bodies_;
  std::vector<std::size_t> permutation_;
};

/// Cell index pairs (source, target).
struct InteractionLists {
  std::vector<std::pair<int, int>> farPairs;
  std::vector<std::pair<int, int>> nearPairs;
};

/// Multipole acceptance: dist(centers) > (r_S + r_T) / theta.
bool wellSeparated(const Cell& source, const Cell& target, double theta);

/// Dual-tree traversal splitting the larger cell first. The optional
/// admissible predicate can veto far pairs that pass the MAC (used to bound
/// the cell size relative to the wavelength); vetoed pairs are refined like
/// MAC failures.
InteractionLists dualTraversal(const Tree& source, const Tree& target, double theta);

template <typename Admissible>
InteractionLists dualTraversal(const Tree& source, const Tree& target, double theta,
                               Admissible&& admissible) {
  if (!(theta > 0.0) || theta > 1.0) throw DomainError("theta must lie in (0, 1]");
  InteractionLists lists;
  const auto& sc = source.cells();
  const auto& tc = target.cells();
  std::vector<std::pair<int, int>> stack{{0, 0}};
  while (!stack.empty()) {
    const auto [s, t] = stack.back();
    stack.pop_back();
    const Cell& cs = sc[static_cast<std::size_t>(s)];
    const Cell& ct = tc[static_cast<std::size_t>(t)];
    if (wellSeparated(cs, ct, theta) && admissible(cs, ct)) {
      lists.farPairs.emplace_back(s, t);
      continue;
    }
    if (cs.isLeaf() && ct.isLeaf()) {
      lists.nearPairs.emplace_back(s, t);
      continue;
    }
    const bool splitSource = ct.isLeaf() || (!cs.isLeaf() && cs.halfWidth >= ct.halfWidth);
    // Children are pushed in reverse so they pop in quadrant order.
    if (splitSource) {
      for (int q = 3; q >= 0; --q) {
        if (cs.children[static_cast<std::size_t>(q)] >= 0) stack.emplace_back(cs.children[static_cast<std::size_t>(q)], t);
      }
    } else {
      for (int q = 3; q >= 0; --q) {
        if (ct.children[static_cast<std::size_t>(q)] >= 0) stack.emplace_back(s, ct.children[static_cast<std::size_t>(q)]);
      }
    }
  }
  return lists;
}

}  // namespace helmfmm::tree
