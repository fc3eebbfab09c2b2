#include "bisbm/treesim.hpp"

#include <cmath>
#include <random>
#include <string>

#include "bisbm/error.hpp"

namespace bisbm {

void TreeParams::validate() const {
  if (!(d > 0.0)) throw InvalidParameter("tree branching parameter d must be > 0");
  if (!(delta >= 0.0 && delta <= 2.0)) throw InvalidParameter("delta must lie in [0, 2]");
  if (depth < 1) throw InvalidParameter("tree depth R must be >= 1");
  if (depth > 60000) throw InvalidParameter("tree depth R is too large");
}

BroadcastTree sample_tree(const TreeParams& tp, Seed seed) {
  tp.validate();
  const double mean_children = tp.d * tp.d;
  if (std::pow(mean_children, tp.depth) > kTreeSizeGuard)
    throw SizeGuard("expected tree size d^(2R) = " +
                    std::to_string(std::pow(mean_children, tp.depth)) + " exceeds the guard");

  Stream rng(seed);
  std::poisson_distribution<std::uint32_t> children(mean_children);
  const double agree = tp.delta / 2.0;
  auto inherit = [&](int parent_label) -> std::int8_t {
    return static_cast<std::int8_t>(rng.bernoulli(agree) ? parent_label : -parent_label);
  };

  BroadcastTree tree;
  tree.depth = tp.depth;
  tree.nodes.push_back({1, static_cast<std::int8_t>(rng.bernoulli(0.5) ? 1 : -1), 0, 0});
  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    const TreeNode node = tree.nodes[i];
    const auto self = static_cast<std::uint32_t>(i);
    if (node.type == 2) {
      tree.nodes.push_back(
          {1, inherit(node.label), self, static_cast<std::uint16_t>(node.generation + 1)});
    } else if (node.generation < tp.depth) {
      const std::uint32_t k = children(rng);
      for (std::uint32_t c = 0; c < k; ++c)
        tree.nodes.push_back({2, inherit(node.label), self, node.generation});
    }
  }
  return tree;
}

double root_posterior(const BroadcastTree& tree, double delta) {
  const double agree = delta / 2.0;
  const std::size_t n = tree.nodes.size();
  // Likelihood of the subtree's observations given the node is + / -.
  std::vector<double> plus(n, 1.0), minus(n, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (tree.observed(i)) {
      plus[i] = tree.nodes[i].label > 0 ? 1.0 : 0.0;
      minus[i] = 1.0 - plus[i];
    }
  }
  // Breadth-first order puts every child after its parent.
  for (std::size_t i = n; i-- > 1;) {
    const std::uint32_t par = tree.nodes[i].parent;
    const double up_plus = agree * plus[i] + (1.0 - agree) * minus[i];
    const double up_minus = (1.0 - agree) * plus[i] + agree * minus[i];
    double a = plus[par] * up_plus;
    double b = minus[par] * up_minus;
    const double s = a + b;
    if (s > 0.0) {
      a /= s;
      b /= s;
    }
    plus[par] = a;
    minus[par] = b;
  }
  const double s = plus[0] + minus[0];
  return s > 0.0 ? plus[0] / s : 0.5;
}

VarianceEstimate reconstruction_variance(const TreeParams& tp, Seed seed) {
  tp.validate();
  if (tp.trials < 1) throw InvalidParameter("trials must be >= 1");
  double sum = 0.0, sum_sq = 0.0;
  for (std::uint64_t t = 0; t < tp.trials; ++t) {
    const BroadcastTree tree = sample_tree(tp, derive(seed, {t}));
    const double q = root_posterior(tree, tp.delta);
    const double v = 4.0 * q * (1.0 - q);
    sum += v;
    sum_sq += v * v;
  }
  VarianceEstimate est;
  est.trials = tp.trials;
  const auto n = static_cast<double>(tp.trials);
  est.mean = sum / n;
  if (tp.trials > 1) {
    const double var = std::max(0.0, (sum_sq - n * est.mean * est.mean) / (n - 1.0));
    est.std_error = std::sqrt(var / n);
  }
  return est;
}

}  // namespace bisbm
