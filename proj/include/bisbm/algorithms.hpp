#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bisbm/model.hpp"
#include "bisbm/spectral.hpp"

namespace bisbm {

struct PartitionOptions {
  SpectralOptions spectral;
  /// An outcome counts as detected when overlap >= 1/2 + detect_margin.
  double detect_margin = 0.05;
};

struct PartitionOutcome {
  Labeling labels;
  std::optional<double> overlap;  // set when ground truth was supplied
  bool detected = false;
  std::map<std::string, double> diagnostics;
};

/// max over s in {+-1} of (1/n) #{i : s x_i = sigma_i}.
double overlap(const Labeling& x, const Labeling& sigma);

std::size_t hamming(const Labeling& x, const Labeling& y);

/// Entrywise sign with 0 -> +1. y must be a unit vector (within 1e-6).
Labeling round_signs(std::span<const double> y);

/// Second left singular vector of M, sign-rounded, with the same delta in
/// {0, 2} handling as dd_svd_partition. Throws Degenerate when the second
/// singular value vanishes.
PartitionOutcome svd_partition(const BipartiteGraph& g, const PartitionOptions& opts,
                               const Labeling* truth = nullptr);

/// Second eigenvector of M M^T - diag(M M^T), sign-rounded. For delta in {0, 2}
/// the top two eigenvalues coincide in expectation, so the vector used is the
/// part of the top-2 eigenspace orthogonal to the all-ones vector.
PartitionOutcome dd_svd_partition(const BipartiteGraph& g, const PartitionOptions& opts,
                                  const Labeling* truth = nullptr);

using VertexPair = std::pair<Vertex, Vertex>;

/// One pair (u, w), u < w, per V2 vertex of degree exactly 2, in column order.
std::vector<VertexPair> project_degree2(const BipartiteGraph& g);

struct SparsifyResult {
  bool failure = false;  // N exceeded the multiset size
  std::uint64_t drawn = 0;
  SimpleGraph graph;
};

/// Draws N ~ Poisson(mean); fails when N > |multiset|, otherwise keeps N
/// uniformly chosen elements and merges repeated pairs. with_replacement
/// selects the alternative reading of "select N edges uniformly".
SparsifyResult sparsify(std::span<const VertexPair> multiset, std::size_t num_vertices,
                        double mean, Seed seed, bool with_replacement = false);

struct DetectionParams {
  double epsilon = 1.0;
  double delta_hat = 0.0;
  std::optional<double> subsample_rate_override;
  bool with_replacement = false;

  void validate() const;
  /// (1 + eps) (delta - 1)^-4 n1 / 2 unless overridden.
  double subsample_mean(std::uint64_t n1) const;
};

/// Degree-2 projection, Poisson sparsification, non-backtracking partition.
/// Sparsification failure and solver non-convergence are reported as
/// detected = false with the labels all +1; diagnostics carry the reason.
PartitionOutcome sbm_reduction_detect(const BipartiteGraph& g, const DetectionParams& dp,
                                      const PartitionOptions& opts,
                                      const Labeling* truth = nullptr);

}  // namespace bisbm
