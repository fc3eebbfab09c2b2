#include "bisbm/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bisbm/error.hpp"

namespace bisbm {

ExpectedSpectrum expected_spectrum(const ModelParams& params) {
  params.validate();
  const double n1 = static_cast<double>(params.n1);
  const double n2 = static_cast<double>(params.n2);
  const double p2 = params.p * params.p;
  const double d = params.delta;
  ExpectedSpectrum es;
  es.lambda1 = n1 * n2 * p2;
  es.lambda2 = (d - 1.0) * (d - 1.0) * n1 * n2 * p2;
  es.same_label_entry = n2 * p2 * (d * d - 2.0 * d + 2.0);
  es.cross_label_entry = n2 * p2 * (2.0 * d - d * d);
  return es;
}

LinearOperator expected_operator(const ExpectedSpectrum& es, const Labeling& sigma) {
  const std::size_t n = sigma.size();
  const double c1 = es.lambda1 / static_cast<double>(n);
  const double c2 = es.lambda2 / static_cast<double>(n);
  return LinearOperator(n, true, [sigma, c1, c2](std::span<const double> x, std::span<double> y) {
    double ones = 0.0, sig = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      ones += x[i];
      sig += sigma[i] * x[i];
    }
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = c1 * ones + c2 * sig * sigma[i];
  });
}

double deviation_norm(const BipartiteGraph& g, const Labeling& sigma, const SpectralOptions& opts) {
  if (sigma.size() != g.n1()) throw InvalidParameter("sigma must have length n1");
  const LinearOperator b = deleted_gram_operator(g);
  const LinearOperator mean = expected_operator(expected_spectrum(g.params()), sigma);
  const LinearOperator dev(g.n1(), true, [&](std::span<const double> x, std::span<double> y) {
    b.apply(x, y);
    Vec m(y.size());
    mean.apply(x, m);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] -= m[i];
  });
  return std::abs(top_eigs(dev, 1, opts).values[0]);
}

double degree_deviation_norm(const BipartiteGraph& g) {
  const double mean = static_cast<double>(g.n2()) * g.params().p;
  double worst = 0.0;
  for (std::uint64_t u = 0; u < g.n1(); ++u)
    worst = std::max(worst, std::abs(static_cast<double>(g.row_degree(static_cast<Vertex>(u))) - mean));
  return worst;
}

std::vector<NoiseNormSample> noise_norm_probe(const ModelParams& params, std::uint64_t trials,
                                              Seed seed, const SpectralOptions& opts) {
  params.validate();
  std::vector<NoiseNormSample> out;
  for (std::uint64_t t = 0; t < trials; ++t) {
    const Labeling sigma = gen_labeling(params.n1, derive(seed, {t, 0}), true);
    const Labeling tau = gen_labeling(params.n2, derive(seed, {t, 1}), true);
    const BipartiteGraph g = gen_bipartite_sbm(params, sigma, tau, derive(seed, {t, 2}));
    SpectralOptions so = opts;
    so.seed = derive(seed, {t, 3});
    out.push_back({t, deviation_norm(g, sigma, so), degree_deviation_norm(g)});
  }
  return out;
}

std::uint64_t default_cut(std::uint64_t n1) {
  if (n1 < 3) return 1;
  return std::max<std::uint64_t>(
      1, static_cast<std::uint64_t>(std::floor(static_cast<double>(n1) / std::log(static_cast<double>(n1)))));
}

LocalizationReport localization_report(const BipartiteGraph& g, const Labeling& sigma,
                                       std::size_t t, std::uint64_t r,
                                       const SpectralOptions& opts) {
  if (sigma.size() != g.n1()) throw InvalidParameter("sigma must have length n1");
  if (r < 1 || r > g.n1()) throw InvalidParameter("cut size r must lie in [1, n1]");
  const SpectralResult sr = top_singulars(g, t, opts);

  std::vector<Vertex> order(g.n1());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](Vertex a, Vertex b) { return g.row_degree(a) > g.row_degree(b); });
  order.resize(r);

  LocalizationReport rep;
  rep.r = r;
  rep.support_set = order;
  rep.singular_values = sr.values;
  const double root_n = std::sqrt(static_cast<double>(g.n1()));
  for (const Vec& v : sr.vectors) {
    double mass = 0.0;
    for (Vertex u : order) mass += v[u] * v[u];
    double corr = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) corr += sigma[i] * v[i];
    rep.mass_fraction.push_back(std::min(1.0, mass));
    rep.sigma_correlation.push_back(std::abs(corr) / root_n);
  }
  return rep;
}

DegreeStats degree_stats(const BipartiteGraph& g, double c) {
  DegreeStats s;
  const double mean = static_cast<double>(g.n2()) * g.params().p;
  const double ln_n1 = std::log(static_cast<double>(g.n1()));
  const double lnln = ln_n1 > 1.0 ? std::log(ln_n1) : 0.0;
  s.threshold_log = mean + c * std::sqrt(mean * std::max(0.0, ln_n1));
  s.threshold_loglog = mean + c * std::sqrt(mean * lnln);
  double total = 0.0;
  for (std::uint64_t u = 0; u < g.n1(); ++u) {
    const auto d = g.row_degree(static_cast<Vertex>(u));
    s.max_degree = std::max<std::uint64_t>(s.max_degree, d);
    total += static_cast<double>(d);
    if (static_cast<double>(d) >= s.threshold_log) ++s.above_log;
    if (static_cast<double>(d) >= s.threshold_loglog) ++s.above_loglog;
  }
  s.mean_degree = total / static_cast<double>(g.n1());
  return s;
}

}  // namespace bisbm
