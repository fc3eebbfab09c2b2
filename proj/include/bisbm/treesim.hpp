#pragma once

#include <cstdint>
#include <vector>

#include "bisbm/rng.hpp"

namespace bisbm {

struct TreeParams {
  double d = 1.0;       // type-1 nodes have Poisson(d^2) type-2 children
  double delta = 1.0;   // a child copies its parent's label w.p. delta / 2
  int depth = 1;        // R, counted in type-1 -> type-1 generations
  std::uint64_t trials = 1;

  void validate() const;
};

/// Largest expected boundary size d^(2R) sample_tree accepts.
inline constexpr double kTreeSizeGuard = 1e7;

struct TreeNode {
  std::uint8_t type;     // 1 or 2
  std::int8_t label;     // +1 or -1
  std::uint32_t parent;  // root points to itself
  std::uint16_t generation;
};

/// Two-type broadcast tree, nodes in breadth-first order with the root at 0.
/// Type-2 nodes have exactly one child; type-1 nodes at generation R are the
/// observed boundary.
struct BroadcastTree {
  std::vector<TreeNode> nodes;
  int depth = 0;

  bool observed(std::size_t i) const {
    return nodes[i].type == 1 && nodes[i].generation == depth;
  }
};

/// Throws SizeGuard when d^(2R) exceeds kTreeSizeGuard.
BroadcastTree sample_tree(const TreeParams& tp, Seed seed);

/// P(root = +1 | labels of the generation-R type-1 nodes), exact message
/// passing with the flip channel of agreement delta / 2. Messages are
/// normalised likelihood pairs so deep trees do not underflow.
double root_posterior(const BroadcastTree& tree, double delta);

struct VarianceEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::uint64_t trials = 0;
};

/// Monte Carlo mean of 4 q (1 - q), q the root posterior, over tp.trials trees
/// drawn from derive(seed, {trial}).
VarianceEstimate reconstruction_variance(const TreeParams& tp, Seed seed);

}  // namespace bisbm
