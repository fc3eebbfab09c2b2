#pragma once

#include <cstdint>
#include <vector>

#include "bisbm/model.hpp"
#include "bisbm/spectral.hpp"

namespace bisbm {

/// Closed forms for E B, B = M M^T - diag(M M^T), with balanced labels:
/// E B = lambda1 J / n1 + lambda2 sigma sigma^T / n1 off the diagonal.
struct ExpectedSpectrum {
  double lambda1 = 0.0;            // n1 n2 p^2
  double lambda2 = 0.0;            // (delta - 1)^2 n1 n2 p^2
  double same_label_entry = 0.0;   // n2 p^2 (delta^2 - 2 delta + 2)
  double cross_label_entry = 0.0;  // n2 p^2 (2 delta - delta^2)
};

ExpectedSpectrum expected_spectrum(const ModelParams& params);

/// lambda1 J / n1 + lambda2 sigma sigma^T / n1 as an operator (diagonal
/// included). sigma is copied.
LinearOperator expected_operator(const ExpectedSpectrum& es, const Labeling& sigma);

/// ||B - (lambda1 J + lambda2 sigma sigma^T) / n1|| with the rank-2 part applied
/// analytically, estimated as the leading |eigenvalue|.
double deviation_norm(const BipartiteGraph& g, const Labeling& sigma,
                      const SpectralOptions& opts);

/// max_u |deg(u) - n2 p|, the exact norm of the diagonal D_V - E D_V.
double degree_deviation_norm(const BipartiteGraph& g);

struct NoiseNormSample {
  std::uint64_t trial = 0;
  double b_norm = 0.0;
  double dv_norm = 0.0;
};

/// Per-trial ||B - E B|| and ||D_V - E D_V|| on freshly sampled graphs with
/// balanced labels. opts.tol and opts.max_iter govern the norm estimate.
std::vector<NoiseNormSample> noise_norm_probe(const ModelParams& params, std::uint64_t trials,
                                              Seed seed, const SpectralOptions& opts);

struct LocalizationReport {
  std::uint64_t r = 0;
  std::vector<Vertex> support_set;       // r highest-degree V1 vertices
  std::vector<double> singular_values;
  std::vector<double> mass_fraction;     // ||v_i restricted to S||^2
  std::vector<double> sigma_correlation; // |sigma/sqrt(n1) . v_i|
};

/// floor(n1 / ln n1), at least 1.
std::uint64_t default_cut(std::uint64_t n1);

/// Top-t left singular vectors and their mass on the r largest-degree rows
/// (ties to the lower index).
LocalizationReport localization_report(const BipartiteGraph& g, const Labeling& sigma,
                                       std::size_t t, std::uint64_t r,
                                       const SpectralOptions& opts);

struct DegreeStats {
  std::uint64_t max_degree = 0;
  double mean_degree = 0.0;
  double threshold_log = 0.0;     // n2 p + c sqrt(n2 p ln n1)
  double threshold_loglog = 0.0;  // n2 p + c sqrt(n2 p ln ln n1)
  std::uint64_t above_log = 0;
  std::uint64_t above_loglog = 0;
};

/// Counts use >= against the thresholds. ln ln n1 is floored at 0.
DegreeStats degree_stats(const BipartiteGraph& g, double c = 1.0);

}  // namespace bisbm
