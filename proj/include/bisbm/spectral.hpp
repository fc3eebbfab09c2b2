#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "bisbm/model.hpp"
#include "bisbm/rng.hpp"

namespace bisbm {

using Vec = std::vector<double>;

/// A matrix known only through its action x -> Ax.
class LinearOperator {
 public:
  using Apply = std::function<void(std::span<const double> x, std::span<double> y)>;

  LinearOperator(std::size_t dim, bool symmetric, Apply apply)
      : dim_(dim), symmetric_(symmetric), apply_(std::move(apply)) {}

  std::size_t dim() const { return dim_; }
  bool symmetric() const { return symmetric_; }

  /// y = A x. y is overwritten.
  void apply(std::span<const double> x, std::span<double> y) const { apply_(x, y); }
  Vec operator()(std::span<const double> x) const {
    Vec y(dim_);
    apply_(x, y);
    return y;
  }

 private:
  std::size_t dim_;
  bool symmetric_;
  Apply apply_;
};

struct SpectralOptions {
  double tol = 1e-8;
  /// Operator applications allowed per requested pair.
  std::size_t max_iter = 10000;
  Seed seed{0};
  std::size_t krylov_dim = 64;
};

/// Leading eigenpairs ordered by descending |value|. For top_singulars the
/// values are singular values and the vectors are left singular vectors.
struct SpectralResult {
  std::vector<double> values;
  std::vector<Vec> vectors;
  std::vector<std::size_t> iterations;
  std::vector<double> residuals;
};

/// x -> M M^T x in O(|E|) using the active columns only. The operator refers
/// to g, which must outlive it.
LinearOperator gram_operator(const BipartiteGraph& g);

/// x -> (M M^T - diag(M M^T)) x, the diagonal being the V1 degrees.
LinearOperator deleted_gram_operator(const BipartiteGraph& g);

/// x -> P A P x with P the orthogonal projector off span(basis). basis must be
/// orthonormal and is copied.
LinearOperator deflated(const LinearOperator& op, std::vector<Vec> basis);

/// t leading eigenpairs of a symmetric operator by |lambda|.
///
/// Restarted Lanczos with full reorthogonalisation. One pair is locked per
/// restart cycle and later cycles run orthogonal to the locked vectors, so an
/// eigenvalue of multiplicity > 1 is found once per copy. A pair is accepted
/// when ||Av - lambda v|| <= tol * max(1, |lambda|). Vector signs are arbitrary.
/// Throws ConvergenceError when a pair exceeds opts.max_iter applications.
SpectralResult top_eigs(const LinearOperator& op, std::size_t t, const SpectralOptions& opts);

/// top_eigs on gram_operator(g); values are square roots of the eigenvalues.
SpectralResult top_singulars(const BipartiteGraph& g, std::size_t t, const SpectralOptions& opts);

/// Simple undirected graph in CSR form. Slot i of the adjacency array is the
/// directed edge owner(i) -> nbrs[i]; reverse(i) is the slot of its reversal.
class SimpleGraph {
 public:
  SimpleGraph() = default;
  /// Self-loops throw InvalidParameter; repeated pairs are merged.
  SimpleGraph(std::size_t n, std::span<const std::pair<Vertex, Vertex>> edges);

  std::size_t num_vertices() const { return offsets_.size() - 1; }
  std::size_t num_edges() const { return nbrs_.size() / 2; }
  std::size_t num_directed() const { return nbrs_.size(); }
  std::span<const Vertex> neighbors(Vertex v) const {
    return {nbrs_.data() + offsets_[v], nbrs_.data() + offsets_[v + 1]};
  }
  std::size_t slot_begin(Vertex v) const { return offsets_[v]; }
  std::size_t slot_end(Vertex v) const { return offsets_[v + 1]; }
  Vertex target(std::size_t slot) const { return nbrs_[slot]; }
  std::size_t reverse(std::size_t slot) const { return rev_[slot]; }

 private:
  std::vector<std::size_t> offsets_{0};
  std::vector<Vertex> nbrs_;
  std::vector<std::size_t> rev_;
};

/// The non-backtracking operator on the 2|E| directed edges:
/// (Bx)_{u->v} = sum_{w ~ v, w != u} x_{v->w}. Refers to g.
LinearOperator nonbacktracking_operator(const SimpleGraph& g);

struct NbPartition {
  Labeling labels;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  std::size_t iterations = 0;
};

/// Second eigenvector of the non-backtracking operator, aggregated to
/// vertices by summing incoming-edge entries, then sign-rounded (0 -> +1).
///
/// lambda1 comes from power iteration; B is then deflated with the right
/// Perron vector r and the left one, which is P r for the edge-reversal
/// involution P. A graph without edges yields all +1. Throws Degenerate when
/// lambda1 = 0 and ConvergenceError when the deflated iteration does not
/// settle on a real eigenvalue (the below-threshold case).
NbPartition nb_partition(const SimpleGraph& g, const SpectralOptions& opts);

}  // namespace bisbm
