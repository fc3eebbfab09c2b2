#include "bisbm/algorithms.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "bisbm/error.hpp"

namespace bisbm {

namespace {

void finish(PartitionOutcome& out, const Labeling* truth, double margin) {
  if (!truth) return;
  out.overlap = overlap(out.labels, *truth);
  out.detected = *out.overlap >= 0.5 + margin;
}

double sigma_correlation(std::span<const double> v, const Labeling& truth) {
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) s += truth[i] * v[i];
  return std::abs(s) / std::sqrt(static_cast<double>(v.size()));
}

void check_second_pair(const SpectralResult& r) {
  const double scale = std::max(1.0, std::abs(r.values[0]));
  if (r.values.size() < 2 || std::abs(r.values[1]) <= 1e-12 * scale)
    throw Degenerate("second leading value vanishes; no partition direction");
}

// For delta in {0, 2} the top two expected eigenvalues coincide, so the
// partition direction is the part of the top-2 eigenspace orthogonal to 1.
Vec partition_direction(const SpectralResult& r, double delta) {
  Vec v = r.vectors[1];
  if (delta != 0.0 && delta != 2.0) return v;
  double a1 = 0.0, a2 = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    a1 += r.vectors[0][i];
    a2 += r.vectors[1][i];
  }
  const double h = std::hypot(a1, a2);
  if (h > 1e-12) {
    for (std::size_t i = 0; i < v.size(); ++i)
      v[i] = (a2 * r.vectors[0][i] - a1 * r.vectors[1][i]) / h;
  }
  return v;
}

}  // namespace

double overlap(const Labeling& x, const Labeling& sigma) {
  if (x.size() != sigma.size()) throw InvalidParameter("overlap: length mismatch");
  if (x.size() == 0) throw InvalidParameter("overlap: empty labelings");
  const std::size_t agree = x.size() - hamming(x, sigma);
  const auto n = static_cast<double>(x.size());
  return std::max(agree, x.size() - agree) / n;
}

std::size_t hamming(const Labeling& x, const Labeling& y) {
  if (x.size() != y.size()) throw InvalidParameter("hamming: length mismatch");
  std::size_t d = 0;
  for (std::size_t i = 0; i < x.size(); ++i) d += x[i] != y[i];
  return d;
}

Labeling round_signs(std::span<const double> y) {
  double nn = 0.0;
  for (double v : y) nn += v * v;
  if (std::abs(std::sqrt(nn) - 1.0) > 1e-6) throw InvalidParameter("round_signs expects a unit vector");
  std::vector<std::int8_t> out(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) out[i] = y[i] < 0.0 ? -1 : 1;
  return Labeling(std::move(out));
}

PartitionOutcome svd_partition(const BipartiteGraph& g, const PartitionOptions& opts,
                               const Labeling* truth) {
  if (g.n1() < 2) throw Degenerate("svd_partition needs n1 >= 2");
  const std::size_t t = std::min<std::size_t>(3, g.n1());
  const SpectralResult r = top_singulars(g, t, opts.spectral);
  check_second_pair(r);

  const Vec v = partition_direction(r, g.params().delta);

  PartitionOutcome out;
  out.labels = round_signs(v);
  for (std::size_t i = 0; i < t; ++i)
    out.diagnostics["sv" + std::to_string(i + 1)] = r.values[i];
  out.diagnostics["residual2"] = r.residuals[1];
  if (truth) out.diagnostics["corr_v2"] = sigma_correlation(v, *truth);
  finish(out, truth, opts.detect_margin);
  return out;
}

PartitionOutcome dd_svd_partition(const BipartiteGraph& g, const PartitionOptions& opts,
                                  const Labeling* truth) {
  if (g.n1() < 2) throw Degenerate("dd_svd_partition needs n1 >= 2");
  const std::size_t t = std::min<std::size_t>(3, g.n1());
  const SpectralResult r = top_eigs(deleted_gram_operator(g), t, opts.spectral);
  check_second_pair(r);

  const Vec v = partition_direction(r, g.params().delta);

  PartitionOutcome out;
  out.labels = round_signs(v);
  for (std::size_t i = 0; i < t; ++i)
    out.diagnostics["ev" + std::to_string(i + 1)] = r.values[i];
  out.diagnostics["residual2"] = r.residuals[1];
  if (truth) out.diagnostics["corr_v2"] = sigma_correlation(v, *truth);
  finish(out, truth, opts.detect_margin);
  return out;
}

std::vector<VertexPair> project_degree2(const BipartiteGraph& g) {
  std::vector<VertexPair> out;
  for (std::size_t c = 0; c < g.num_active_columns(); ++c) {
    const auto col = g.active_column(c);
    if (col.size() == 2) out.emplace_back(std::min(col[0], col[1]), std::max(col[0], col[1]));
  }
  return out;
}

SparsifyResult sparsify(std::span<const VertexPair> multiset, std::size_t num_vertices,
                        double mean, Seed seed, bool with_replacement) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) throw InvalidParameter("sparsify: mean must be >= 0");
  Stream rng(seed);
  SparsifyResult out;
  if (mean > 0.0) {
    std::poisson_distribution<std::uint64_t> poisson(mean);
    out.drawn = poisson(rng);
  }
  if (out.drawn > multiset.size()) {
    out.failure = true;
    out.graph = SimpleGraph(num_vertices, std::span<const VertexPair>{});
    return out;
  }
  std::vector<VertexPair> chosen;
  chosen.reserve(out.drawn);
  if (with_replacement) {
    for (std::uint64_t i = 0; i < out.drawn; ++i) chosen.push_back(multiset[rng.below(multiset.size())]);
  } else {
    std::vector<std::size_t> idx(multiset.size());
    std::iota(idx.begin(), idx.end(), 0);
    for (std::uint64_t i = 0; i < out.drawn; ++i) {
      const auto j = i + rng.below(idx.size() - i);
      std::swap(idx[i], idx[j]);
      chosen.push_back(multiset[idx[i]]);
    }
  }
  out.graph = SimpleGraph(num_vertices, chosen);
  return out;
}

void DetectionParams::validate() const {
  if (!(epsilon > 0.0)) throw InvalidParameter("epsilon must be > 0");
  if (!(delta_hat >= 0.0 && delta_hat <= 2.0) || delta_hat == 1.0)
    throw InvalidParameter("delta_hat must lie in [0, 2] and differ from 1");
  if (subsample_rate_override && !(*subsample_rate_override >= 0.0))
    throw InvalidParameter("subsample mean override must be >= 0");
}

double DetectionParams::subsample_mean(std::uint64_t n1) const {
  if (subsample_rate_override) return *subsample_rate_override;
  return (1.0 + epsilon) * std::pow(delta_hat - 1.0, -4.0) * static_cast<double>(n1) / 2.0;
}

PartitionOutcome sbm_reduction_detect(const BipartiteGraph& g, const DetectionParams& dp,
                                      const PartitionOptions& opts, const Labeling* truth) {
  dp.validate();
  PartitionOutcome out;
  const double d = dp.delta_hat;
  const double q4 = std::pow(d - 1.0, 4.0);
  out.diagnostics["a_est"] = (1.0 + dp.epsilon) * (2.0 - 2.0 * d + d * d) / q4;
  out.diagnostics["b_est"] = (1.0 + dp.epsilon) * (2.0 * d - d * d) / q4;

  const auto pairs = project_degree2(g);
  const double mean = dp.subsample_mean(g.n1());
  out.diagnostics["projection_edges"] = static_cast<double>(pairs.size());
  out.diagnostics["subsample_mean"] = mean;

  const SparsifyResult sp = sparsify(pairs, g.n1(), mean, derive(opts.spectral.seed, {0x5a}),
                                     dp.with_replacement);
  out.diagnostics["N"] = static_cast<double>(sp.drawn);
  out.diagnostics["failure"] = sp.failure ? 1.0 : 0.0;
  out.diagnostics["converged"] = 0.0;
  out.labels = Labeling(std::vector<std::int8_t>(g.n1(), 1));
  if (sp.failure) {
    finish(out, truth, opts.detect_margin);
    out.detected = false;
    return out;
  }
  out.diagnostics["graph_edges"] = static_cast<double>(sp.graph.num_edges());

  try {
    const NbPartition nb = nb_partition(sp.graph, opts.spectral);
    out.labels = nb.labels;
    out.diagnostics["lambda1"] = nb.lambda1;
    out.diagnostics["lambda2"] = nb.lambda2;
    out.diagnostics["nb_iterations"] = static_cast<double>(nb.iterations);
    out.diagnostics["converged"] = 1.0;
    finish(out, truth, opts.detect_margin);
  } catch (const ConvergenceError&) {
    finish(out, truth, opts.detect_margin);
    out.detected = false;
  } catch (const Degenerate&) {
    finish(out, truth, opts.detect_margin);
    out.detected = false;
  }
  return out;
}

}  // namespace bisbm
