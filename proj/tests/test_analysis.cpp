#include <Eigen/Eigenvalues>
#include <cmath>

#include "bisbm/analysis.hpp"
#include "bisbm/error.hpp"
#include "doctest.h"
#include "oracle.hpp"

using namespace bisbm;

TEST_CASE("expected_spectrum closed forms") {
  const auto a = expected_spectrum(ModelParams{4, 10, 0.1, 2.0});
  CHECK(a.same_label_entry == doctest::Approx(0.2));
  CHECK(a.cross_label_entry == doctest::Approx(0.0));
  CHECK(a.lambda2 == doctest::Approx(0.4));
  CHECK(a.lambda1 == doctest::Approx(0.4));

  const auto one = expected_spectrum(ModelParams{50, 300, 0.02, 1.0});
  CHECK(one.lambda2 == 0.0);
  CHECK(one.same_label_entry == doctest::Approx(300 * 0.0004));
  CHECK(one.cross_label_entry == doctest::Approx(300 * 0.0004));

  const auto z = expected_spectrum(ModelParams{50, 300, 0.02, 0.0});
  const auto t = expected_spectrum(ModelParams{50, 300, 0.02, 2.0});
  CHECK(z.lambda1 == t.lambda1);
  CHECK(z.lambda2 == t.lambda2);
  CHECK(z.same_label_entry == doctest::Approx(t.same_label_entry));
  CHECK(z.cross_label_entry == doctest::Approx(t.cross_label_entry));

  for (double d : {0.0, 0.3, 1.0, 1.7}) {
    const auto e = expected_spectrum(ModelParams{20, 80, 0.05, d});
    const double n2p2 = 80 * 0.0025;
    CHECK(e.same_label_entry + e.cross_label_entry == doctest::Approx(2 * n2p2));
    CHECK(e.same_label_entry - e.cross_label_entry == doctest::Approx(2 * (d - 1) * (d - 1) * n2p2));
  }
}

TEST_CASE("expected_operator eigensystem") {
  const auto sigma = gen_labeling(60, Seed{2}, true);
  const auto es = expected_spectrum(ModelParams{60, 5000, 0.01, 0.3});
  SpectralOptions opts;
  const auto r = top_eigs(expected_operator(es, sigma), 2, opts);
  CHECK(std::abs(r.values[0] - es.lambda1) <= 1e-8 * es.lambda1);
  CHECK(std::abs(r.values[1] - es.lambda2) <= 1e-8 * es.lambda1);
  Eigen::VectorXd ones = Eigen::VectorXd::Constant(60, 1 / std::sqrt(60.0));
  Eigen::VectorXd s(60);
  for (int i = 0; i < 60; ++i) s(i) = sigma[i] / std::sqrt(60.0);
  CHECK(oracle::sign_distance(oracle::as_eigen(r.vectors[0]), ones) <= 1e-8);
  CHECK(oracle::sign_distance(oracle::as_eigen(r.vectors[1]), s) <= 1e-8);
}

TEST_CASE("deviation norm against a dense oracle") {
  SpectralOptions opts;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    for (double delta : {1.0, 0.4}) {
      const ModelParams mp{8, 30, 0.2, delta};
      const auto sigma = gen_labeling(8, Seed{seed}, true);
      const auto tau = gen_labeling(30, Seed{seed + 50}, true);
      const auto g = gen_bipartite_sbm(mp, sigma, tau, Seed{seed + 90});
      const auto es = expected_spectrum(mp);
      Eigen::MatrixXd dev = oracle::deleted_gram(g);
      for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j) dev(i, j) -= (es.lambda1 + es.lambda2 * sigma[i] * sigma[j]) / 8.0;
      const double ref = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(dev).eigenvalues().cwiseAbs().maxCoeff();
      CHECK(std::abs(deviation_norm(g, sigma, opts) - ref) <= 1e-6);
      double worst = 0;
      for (Vertex u = 0; u < 8; ++u) worst = std::max(worst, std::abs(double(g.row_degree(u)) - 30 * 0.2));
      CHECK(degree_deviation_norm(g) == worst);
    }
  }
}

TEST_CASE("noise_norm_probe") {
  SpectralOptions opts;
  SUBCASE("p = 0 gives zero norms") {
    for (const auto& s : noise_norm_probe(ModelParams{20, 50, 0.0, 0.5}, 3, Seed{1}, opts)) {
      CHECK(s.b_norm == 0.0);
      CHECK(s.dv_norm == 0.0);
    }
  }
  SUBCASE("||B - EB|| / (sqrt(n1 n2) p) is stable across sizes") {
    std::vector<double> ratios;
    for (std::uint64_t n1 : {150, 300, 600}) {
      const std::uint64_t n2 = n1 * 256;
      const double p = std::log(double(n1)) / std::sqrt(double(n1) * n2);
      const auto samples = noise_norm_probe(ModelParams{n1, n2, p, 0.2}, 3, Seed{n1}, opts);
      double m = 0;
      for (const auto& s : samples) m += s.b_norm / (std::sqrt(double(n1) * n2) * p);
      ratios.push_back(m / 3);
    }
    const double lo = *std::min_element(ratios.begin(), ratios.end());
    const double hi = *std::max_element(ratios.begin(), ratios.end());
    CHECK(hi <= 2 * lo);
  }
}

TEST_CASE("localization_report") {
  SpectralOptions opts;
  SUBCASE("a vector on one coordinate inside S has mass 1") {
    // Row 0 has ten private columns, every other row one, so v1 = e_0.
    std::vector<BipartiteEdge> e;
    for (Column c = 0; c < 10; ++c) e.push_back({0, c});
    for (Vertex u = 1; u < 6; ++u) e.push_back({u, 9 + u});
    const BipartiteGraph g(ModelParams{6, 20, 0.1, 1.0}, e);
    const auto rep = localization_report(g, gen_labeling(6, Seed{1}), 1, 1, opts);
    CHECK(rep.support_set == std::vector<Vertex>{0});
    CHECK(rep.mass_fraction[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rep.singular_values[0] == doctest::Approx(std::sqrt(10.0)));
  }
  SUBCASE("bounds and cut") {
    CHECK(default_cut(400) == 66);
    CHECK(default_cut(2) == 1);
    const auto g = oracle::random_graph(50, 500, 0.05, 7, 0.5);
    const auto s = gen_labeling(50, Seed{7});
    CHECK_THROWS_AS(localization_report(g, s, 3, 0, opts), InvalidParameter);
    CHECK_THROWS_AS(localization_report(g, s, 3, 51, opts), InvalidParameter);
    const auto rep = localization_report(g, s, 3, 10, opts);
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(rep.mass_fraction[i] >= 0.0);
      CHECK(rep.mass_fraction[i] <= 1.0);
      CHECK(rep.sigma_correlation[i] <= 1.0);
    }
    for (std::size_t i = 1; i < rep.support_set.size(); ++i)
      CHECK(g.row_degree(rep.support_set[i - 1]) >= g.row_degree(rep.support_set[i]));
  }
  SUBCASE("no planted signal means no correlation") {
    const std::uint64_t n1 = 300, n2 = 300 * 256;
    const double p = std::pow(double(n1), -2.0 / 3) * std::pow(double(n2), -1.0 / 3);
    for (std::uint64_t t = 0; t < 3; ++t) {
      const auto s = gen_labeling(n1, Seed{t});
      const auto g = gen_bipartite_sbm(ModelParams{n1, n2, p, 1.0}, s, gen_labeling(n2, Seed{t + 9}), Seed{t + 19});
      const auto rep = localization_report(g, s, 3, default_cut(n1), opts);
      for (double c : rep.sigma_correlation) CHECK(c <= 0.2);
    }
  }
}

TEST_CASE("degree_stats") {
  const BipartiteGraph empty(ModelParams{10, 10, 0.1, 1.0}, {});
  CHECK(degree_stats(empty).max_degree == 0);

  SUBCASE("dense tiny instance equals a recount") {
    const auto g = oracle::random_graph(12, 40, 0.3, 3);
    const auto st = degree_stats(g, 1.5);
    const double mean = 40 * 0.3;
    const double t1 = mean + 1.5 * std::sqrt(mean * std::log(12.0));
    const double t2 = mean + 1.5 * std::sqrt(mean * std::log(std::log(12.0)));
    std::uint64_t mx = 0, a1 = 0, a2 = 0;
    for (auto d : graph_degrees(g, Side::V1)) {
      mx = std::max(mx, d);
      a1 += d >= t1;
      a2 += d >= t2;
    }
    CHECK(st.max_degree == mx);
    CHECK(st.above_log == a1);
    CHECK(st.above_loglog == a2);
    CHECK(st.threshold_log == doctest::Approx(t1));
  }

  SUBCASE("a few rows exceed mean + sqrt(mean ln n1)") {
    // c = 1: about 2.6 standard deviations above the mean degree, so a few
    // rows out of 1000 exceed it.
    int ok = 0;
    for (std::uint64_t t = 0; t < 20; ++t) {
      const auto g = oracle::random_graph(1000, 100000, 1e-3, 40 + t, 0.5);
      const auto st = degree_stats(g, 1.0);
      ok += st.above_log >= 1 && st.above_log <= default_cut(1000);
    }
    CHECK(ok >= 18);
  }
}
