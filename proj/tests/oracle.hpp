#pragma once

// Dense brute-force counterparts of the matrix-free code, plus small helpers
// shared by the test files.

#include <Eigen/Dense>
#include <cmath>
#include <span>
#include <vector>

#include "bisbm/model.hpp"
#include "bisbm/spectral.hpp"
#include "bisbm/treesim.hpp"

namespace oracle {

inline Eigen::MatrixXd biadjacency(const bisbm::BipartiteGraph& g) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(g.n1(), g.n2());
  for (const auto& e : g.edges()) m(e.u, static_cast<Eigen::Index>(e.v)) = 1.0;
  return m;
}

inline Eigen::MatrixXd deleted_gram(const bisbm::BipartiteGraph& g) {
  const Eigen::MatrixXd m = biadjacency(g);
  Eigen::MatrixXd b = m * m.transpose();
  b.diagonal().setZero();
  return b;
}

inline Eigen::VectorXd as_eigen(std::span<const double> x) {
  return Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
}

inline bisbm::LinearOperator wrap(const Eigen::MatrixXd& a) {
  return bisbm::LinearOperator(static_cast<std::size_t>(a.rows()), true,
                               [a](std::span<const double> x, std::span<double> y) {
                                 Eigen::Map<Eigen::VectorXd>(y.data(), a.rows()) =
                                     a * as_eigen(x);
                               });
}

inline Eigen::MatrixXd materialize(const bisbm::LinearOperator& op) {
  const auto n = static_cast<Eigen::Index>(op.dim());
  Eigen::MatrixXd a(n, n);
  bisbm::Vec e(op.dim(), 0.0);
  for (Eigen::Index j = 0; j < n; ++j) {
    e[j] = 1.0;
    a.col(j) = as_eigen(op(e));
    e[j] = 0.0;
  }
  return a;
}

// Distance between two unit vectors up to a global sign.
inline double sign_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return std::min((a - b).norm(), (a + b).norm());
}

// Non-backtracking matrix on the directed edges of an undirected edge list,
// built entry by entry from the definition.
inline Eigen::MatrixXd nonbacktracking(const std::vector<std::pair<bisbm::Vertex, bisbm::Vertex>>& edges) {
  std::vector<std::pair<bisbm::Vertex, bisbm::Vertex>> dir;
  for (auto [a, b] : edges) {
    dir.emplace_back(a, b);
    dir.emplace_back(b, a);
  }
  const auto m = static_cast<Eigen::Index>(dir.size());
  Eigen::MatrixXd nb = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j)
      if (dir[i].second == dir[j].first && dir[j].second != dir[i].first) nb(i, j) = 1.0;
  return nb;
}

inline bisbm::BipartiteGraph random_graph(std::uint64_t n1, std::uint64_t n2, double p,
                                          std::uint64_t seed, double delta = 1.0) {
  const bisbm::ModelParams mp{n1, n2, p, delta};
  const auto sigma = bisbm::gen_labeling(n1, bisbm::Seed{seed});
  const auto tau = bisbm::gen_labeling(n2, bisbm::Seed{seed + 1000003});
  return bisbm::gen_bipartite_sbm(mp, sigma, tau, bisbm::Seed{seed + 2000003});
}

inline double mean(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

inline double std_error(const std::vector<double>& x) {
  const double m = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  const auto n = static_cast<double>(x.size());
  return std::sqrt(s / (n - 1.0) / n);
}

// Upper quantile of chi-square with k degrees of freedom (Wilson-Hilferty);
// z is the standard normal quantile of the same tail.
inline double chi_square_critical(double k, double z) {
  const double a = 2.0 / (9.0 * k);
  return k * std::pow(1.0 - a + z * std::sqrt(a), 3.0);
}

}  // namespace oracle

namespace oracle {

// Distance from unit vector v to the span of the dense eigenvectors whose
// eigenvalue lies within cluster of value. For a simple eigenvalue this is
// the sign-aligned distance; for a repeated one it allows any rotation.
inline double distance_to_eigenspace(const Eigen::VectorXd& v, const Eigen::VectorXd& values,
                                     const Eigen::MatrixXd& vectors, double value,
                                     double cluster) {
  Eigen::VectorXd proj = Eigen::VectorXd::Zero(v.size());
  for (Eigen::Index j = 0; j < values.size(); ++j)
    if (std::abs(values(j) - value) <= cluster) proj += vectors.col(j).dot(v) * vectors.col(j);
  return (v - proj).norm();
}

}  // namespace oracle

namespace oracle {

// Root with c type-2 children, each carrying one observed type-1 leaf.
inline bisbm::BroadcastTree star(const std::vector<int>& leaves) {
  bisbm::BroadcastTree t;
  t.depth = 1;
  const auto c = static_cast<std::uint32_t>(leaves.size());
  t.nodes.push_back({1, 1, 0, 0});
  for (std::uint32_t i = 0; i < c; ++i) t.nodes.push_back({2, 1, 0, 0});
  for (std::uint32_t i = 0; i < c; ++i)
    t.nodes.push_back({1, static_cast<std::int8_t>(leaves[i]), 1 + i, 1});
  return t;
}

// Sum over the root and every middle labelling.
inline double star_brute_force(const std::vector<int>& leaves, double delta) {
  const double a = delta / 2;
  auto ch = [a](int x, int y) { return x == y ? a : 1 - a; };
  const std::size_t c = leaves.size();
  double post[2] = {0, 0};
  for (int r = 0; r < 2; ++r) {
    const int root = r == 0 ? 1 : -1;
    for (std::uint32_t mids = 0; mids < (1u << c); ++mids) {
      double pr = 0.5;
      for (std::size_t i = 0; i < c; ++i) {
        const int m = (mids >> i) & 1u ? -1 : 1;
        pr *= ch(root, m) * ch(m, leaves[i]);
      }
      post[r] += pr;
    }
  }
  // Impossible observations carry no information.
  return post[0] + post[1] > 0 ? post[0] / (post[0] + post[1]) : 0.5;
}


}  // namespace oracle
