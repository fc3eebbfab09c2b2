#include "bisbm/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "bisbm/error.hpp"

namespace bisbm {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

void scale(std::span<double> x, double a) {
  for (double& v : x) v *= a;
}

// Two passes of classical Gram-Schmidt against each basis.
void orthogonalize(std::span<double> w, const std::vector<Vec>& a, const std::vector<Vec>& b) {
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& q : a) axpy(-dot(q, w), q, w);
    for (const auto& q : b) axpy(-dot(q, w), q, w);
  }
}

Vec gaussian_vector(std::size_t n, Stream& rng) {
  Vec v(n);
  for (double& x : v) x = rng.gaussian();
  return v;
}

struct PowerResult {
  double value = 0.0;
  Vec vector;
  std::size_t iterations = 0;
  double residual = 0.0;
};

// Plain power iteration with Rayleigh-quotient stopping, for operators that
// need not be symmetric. A negative dominant eigenvalue is handled because the
// quotient carries the sign.
PowerResult power_iterate(const LinearOperator& op, Vec x, const SpectralOptions& opts,
                          const char* what) {
  const double nx = norm(x);
  if (nx == 0.0) throw Degenerate(std::string(what) + ": zero start vector");
  scale(x, 1.0 / nx);
  Vec y(x.size());
  double best = std::numeric_limits<double>::infinity();
  double best_value = 0.0;
  for (std::size_t it = 1; it <= opts.max_iter; ++it) {
    op.apply(x, y);
    const double lambda = dot(x, y);
    double res = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) res += (y[i] - lambda * x[i]) * (y[i] - lambda * x[i]);
    res = std::sqrt(res);
    if (res < best) {
      best = res;
      best_value = lambda;
    }
    if (res <= opts.tol * std::max(1.0, std::abs(lambda))) return {lambda, x, it, res};
    const double ny = norm(y);
    if (ny == 0.0) return {0.0, x, it, 0.0};
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = y[i] / ny;
  }
  throw ConvergenceError(std::string(what) + ": power iteration did not converge",
                         {best_value}, {best});
}

}  // namespace

LinearOperator gram_operator(const BipartiteGraph& g) {
  return LinearOperator(g.n1(), true, [&g](std::span<const double> x, std::span<double> y) {
    std::fill(y.begin(), y.end(), 0.0);
    for (std::size_t c = 0; c < g.num_active_columns(); ++c) {
      const auto col = g.active_column(c);
      double s = 0.0;
      for (Vertex u : col) s += x[u];
      for (Vertex u : col) y[u] += s;
    }
  });
}

LinearOperator deleted_gram_operator(const BipartiteGraph& g) {
  return LinearOperator(g.n1(), true, [&g](std::span<const double> x, std::span<double> y) {
    std::fill(y.begin(), y.end(), 0.0);
    for (std::size_t c = 0; c < g.num_active_columns(); ++c) {
      const auto col = g.active_column(c);
      if (col.size() < 2) continue;
      double s = 0.0;
      for (Vertex u : col) s += x[u];
      for (Vertex u : col) y[u] += s - x[u];
    }
  });
}

LinearOperator deflated(const LinearOperator& op, std::vector<Vec> basis) {
  auto project = [basis](std::span<double> v) {
    for (const auto& q : basis) axpy(-dot(q, v), q, v);
  };
  return LinearOperator(op.dim(), op.symmetric(),
                        [op, project](std::span<const double> x, std::span<double> y) {
                          Vec px(x.begin(), x.end());
                          project(px);
                          op.apply(px, y);
                          project(y);
                        });
}

SpectralResult top_eigs(const LinearOperator& op, std::size_t t, const SpectralOptions& opts) {
  if (!op.symmetric()) throw InvalidParameter("top_eigs needs a symmetric operator");
  const std::size_t n = op.dim();
  if (t < 1 || t > n) throw InvalidParameter("top_eigs needs 1 <= t <= dim");

  Stream rng(opts.seed);
  SpectralResult out;
  std::vector<Vec> locked;
  Vec start = gaussian_vector(n, rng);
  std::size_t applications = 0;
  double best_residual = std::numeric_limits<double>::infinity();
  double best_value = 0.0;
  Vec w(n);

  while (locked.size() < t) {
    const std::size_t m_max = std::max<std::size_t>(1, std::min(opts.krylov_dim, n - locked.size()));
    std::vector<Vec> basis;
    std::vector<double> alpha, beta;

    Vec q = start;
    orthogonalize(q, locked, {});
    double nq = norm(q);
    while (nq < 1e-10) {
      q = gaussian_vector(n, rng);
      orthogonalize(q, locked, {});
      nq = norm(q);
    }
    scale(q, 1.0 / nq);
    basis.push_back(std::move(q));

    double anorm = 0.0;
    bool invariant = false;
    for (std::size_t j = 0; j < m_max; ++j) {
      op.apply(basis[j], w);
      ++applications;
      const double a = dot(basis[j], w);
      alpha.push_back(a);
      orthogonalize(w, locked, basis);
      const double b = norm(w);
      anorm = std::max(anorm, std::abs(a) + b);
      beta.push_back(b);
      if (b <= 1e-12 * std::max(anorm, 1e-300) || b == 0.0) {
        invariant = true;
        break;
      }
      if (j + 1 == m_max) break;
      Vec next(w);
      scale(next, 1.0 / b);
      basis.push_back(std::move(next));
    }

    const auto m = static_cast<Eigen::Index>(alpha.size());
    Eigen::VectorXd diag = Eigen::Map<Eigen::VectorXd>(alpha.data(), m);
    Eigen::VectorXd sub(std::max<Eigen::Index>(m - 1, 0));
    for (Eigen::Index i = 0; i + 1 < m; ++i) sub[i] = beta[static_cast<std::size_t>(i)];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
    tri.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    std::vector<Eigen::Index> order(static_cast<std::size_t>(m));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
      const double ta = tri.eigenvalues()[a], tb = tri.eigenvalues()[b];
      if (std::abs(ta) != std::abs(tb)) return std::abs(ta) > std::abs(tb);
      return ta > tb;
    });

    auto ritz_vector = [&](Eigen::Index idx) {
      Vec y(n, 0.0);
      for (Eigen::Index i = 0; i < m; ++i)
        axpy(tri.eigenvectors()(i, idx), basis[static_cast<std::size_t>(i)], y);
      return y;
    };

    Vec y = ritz_vector(order[0]);
    orthogonalize(y, locked, {});
    scale(y, 1.0 / norm(y));
    op.apply(y, w);
    ++applications;
    const double theta = dot(y, w);
    double res = 0.0;
    for (std::size_t i = 0; i < n; ++i) res += (w[i] - theta * y[i]) * (w[i] - theta * y[i]);
    res = std::sqrt(res);
    if (res < best_residual) {
      best_residual = res;
      best_value = theta;
    }

    const std::size_t needed = t - locked.size();
    if (res <= opts.tol * std::max(1.0, std::abs(theta))) {
      out.values.push_back(theta);
      out.vectors.push_back(y);
      out.iterations.push_back(applications);
      out.residuals.push_back(res);
      locked.push_back(std::move(y));
      applications = 0;
      best_residual = std::numeric_limits<double>::infinity();
      // Continue from the next Ritz directions plus a small fresh component so
      // further copies of a repeated eigenvalue can surface.
      start = gaussian_vector(n, rng);
      scale(start, 1e-3 / std::sqrt(static_cast<double>(n)));
      for (std::size_t i = 1; i < std::min<std::size_t>(needed, order.size()); ++i)
        axpy(1.0, ritz_vector(order[i]), start);
      continue;
    }
    if (applications >= opts.max_iter) {
      std::vector<double> vals(out.values), ress(out.residuals);
      vals.push_back(best_value);
      ress.push_back(best_residual);
      throw ConvergenceError("top_eigs: pair " + std::to_string(locked.size() + 1) +
                                 " did not converge within max_iter applications",
                             std::move(vals), std::move(ress));
    }
    if (invariant) {
      // Exact invariant subspace but the Ritz pair failed the residual test:
      // only round-off can cause this, so perturb and retry.
      start = y;
      Vec noise = gaussian_vector(n, rng);
      axpy(1e-6, noise, start);
      continue;
    }
    start = y;
    for (std::size_t i = 1; i < std::min<std::size_t>(needed, order.size()); ++i)
      axpy(1.0, ritz_vector(order[i]), start);
  }

  // A late cycle can surface a second copy larger than an earlier lock.
  std::vector<std::size_t> idx(out.values.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(out.values[a]) > std::abs(out.values[b]);
  });
  SpectralResult sorted;
  for (std::size_t i : idx) {
    sorted.values.push_back(out.values[i]);
    sorted.vectors.push_back(std::move(out.vectors[i]));
    sorted.iterations.push_back(out.iterations[i]);
    sorted.residuals.push_back(out.residuals[i]);
  }
  return sorted;
}

SpectralResult top_singulars(const BipartiteGraph& g, std::size_t t, const SpectralOptions& opts) {
  SpectralResult r = top_eigs(gram_operator(g), t, opts);
  for (double& v : r.values) v = std::sqrt(std::max(v, 0.0));
  return r;
}

SimpleGraph::SimpleGraph(std::size_t n, std::span<const std::pair<Vertex, Vertex>> edges) {
  std::vector<std::pair<Vertex, Vertex>> arcs;
  arcs.reserve(2 * edges.size());
  for (auto [a, b] : edges) {
    if (a >= n || b >= n) throw InvalidParameter("edge endpoint out of range");
    if (a == b) throw InvalidParameter("self-loop in simple graph");
    arcs.emplace_back(a, b);
    arcs.emplace_back(b, a);
  }
  std::sort(arcs.begin(), arcs.end());
  arcs.erase(std::unique(arcs.begin(), arcs.end()), arcs.end());
  offsets_.assign(n + 1, 0);
  nbrs_.reserve(arcs.size());
  for (auto [a, b] : arcs) {
    ++offsets_[a + 1];
    nbrs_.push_back(b);
  }
  std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
  rev_.resize(nbrs_.size());
  for (Vertex a = 0; a < n; ++a) {
    for (std::size_t s = offsets_[a]; s < offsets_[a + 1]; ++s) {
      const Vertex b = nbrs_[s];
      const auto first = nbrs_.begin() + static_cast<std::ptrdiff_t>(offsets_[b]);
      const auto last = nbrs_.begin() + static_cast<std::ptrdiff_t>(offsets_[b + 1]);
      rev_[s] = static_cast<std::size_t>(std::lower_bound(first, last, a) - nbrs_.begin());
    }
  }
}

LinearOperator nonbacktracking_operator(const SimpleGraph& g) {
  return LinearOperator(g.num_directed(), false,
                        [&g](std::span<const double> x, std::span<double> y) {
                          const auto n = static_cast<Vertex>(g.num_vertices());
                          for (Vertex v = 0; v < n; ++v) {
                            double out_sum = 0.0;
                            for (std::size_t s = g.slot_begin(v); s < g.slot_end(v); ++s)
                              out_sum += x[s];
                            // Every edge u -> v is the reverse of a slot v -> u.
                            for (std::size_t s = g.slot_begin(v); s < g.slot_end(v); ++s)
                              y[g.reverse(s)] = out_sum - x[s];
                          }
                        });
}

NbPartition nb_partition(const SimpleGraph& g, const SpectralOptions& opts) {
  const std::size_t n = g.num_vertices();
  NbPartition out;
  if (g.num_edges() == 0) {
    out.labels = Labeling(std::vector<std::int8_t>(n, 1));
    return out;
  }
  const LinearOperator nb = nonbacktracking_operator(g);
  const std::size_t dim = nb.dim();
  Stream rng(opts.seed);

  Vec start(dim);
  for (double& v : start) v = 0.5 + rng.uniform();
  const PowerResult lead = power_iterate(nb, start, opts, "nb_partition (leading pair)");
  if (std::abs(lead.value) <= 1e-12)
    throw Degenerate("non-backtracking operator has no cycles (leading eigenvalue 0)");

  const Vec& right = lead.vector;
  Vec left(dim);
  for (std::size_t s = 0; s < dim; ++s) left[s] = right[g.reverse(s)];
  const double lr = dot(left, right);
  if (std::abs(lr) <= 1e-12) throw Degenerate("left and right Perron vectors are orthogonal");

  const double lambda1 = lead.value;
  auto remove_lead = [&](std::span<double> v) { axpy(-dot(left, v) / lr, right, v); };
  const LinearOperator rest(dim, false, [&](std::span<const double> x, std::span<double> y) {
    nb.apply(x, y);
    axpy(-lambda1 * dot(left, x) / lr, right, y);
  });

  Vec x = gaussian_vector(dim, rng);
  remove_lead(x);
  const PowerResult second = power_iterate(rest, std::move(x), opts, "nb_partition (second pair)");

  Vec score(n, 0.0);
  for (Vertex v = 0; v < n; ++v)
    for (std::size_t s = g.slot_begin(v); s < g.slot_end(v); ++s)
      score[v] += second.vector[g.reverse(s)];
  std::vector<std::int8_t> lab(n);
  for (std::size_t v = 0; v < n; ++v) lab[v] = score[v] < 0.0 ? -1 : 1;

  out.labels = Labeling(std::move(lab));
  out.lambda1 = lambda1;
  out.lambda2 = second.value;
  out.iterations = lead.iterations + second.iterations;
  return out;
}

}  // namespace bisbm
