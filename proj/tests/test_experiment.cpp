#include <cmath>
#include <fstream>
#include <sstream>

#include "bisbm/error.hpp"
#include "bisbm/experiment.hpp"
#include "bisbm/io.hpp"
#include "doctest.h"
#include "json.hpp"
#include "oracle.hpp"

using namespace bisbm;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("bisbm_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

// Parses a result CSV: manifest line, header, then rows of the right width in
// which every column not listed in text_cols is a number.
std::vector<std::vector<std::string>> check_csv(const fs::path& path, const RunManifest& m,
                                                const std::string& header,
                                                const std::vector<std::string>& text_cols = {}) {
  std::ifstream is(path);
  REQUIRE(is.good());
  std::string line;
  std::getline(is, line);
  CHECK(line == "# manifest " + m.hash());
  std::getline(is, line);
  CHECK(line == header);
  const auto cols = split(header, ',');
  std::vector<std::vector<std::string>> rows;
  while (std::getline(is, line)) {
    const auto f = split(line, ',');
    REQUIRE(f.size() == cols.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
      if (std::find(text_cols.begin(), text_cols.end(), cols[i]) != text_cols.end()) continue;
      std::size_t used = 0;
      CHECK_NOTHROW((void)std::stod(f[i], &used));
      CHECK(used == f[i].size());
    }
    rows.push_back(f);
  }
  return rows;
}

RunManifest small_sweep(const fs::path& out) {
  RunManifest m;
  m.kind = ExperimentKind::Sweep;
  m.n1 = 120;
  m.n2 = 3000;
  m.delta = 0.2;
  m.threshold = "detection";
  m.multiples = {1.0, 3.0};
  m.trials = 3;
  m.seed = 11;
  m.out = out.string();
  return m;
}

}  // namespace

TEST_CASE("manifest text round-trip") {
  RunManifest m = small_sweep("x");
  m.algorithms = {"svd"};
  m.balanced = true;
  m.tol = 1e-9;
  m.planting = "q.txt";
  m.multiples = {0.1, 1.0 / 3.0, 2.5};
  const auto back = RunManifest::from_text(m.to_text());
  CHECK(back.to_text() == m.to_text());
  CHECK(back.multiples == m.multiples);
  CHECK(back.hash() == m.hash());

  RunManifest other = m;
  other.jobs = 8;
  other.out = "elsewhere";
  CHECK(other.hash() == m.hash());
  other.seed = 12;
  CHECK(other.hash() != m.hash());
  CHECK(m.hash().size() == 16);

  CHECK_THROWS_AS(RunManifest::from_text("{\"colour\": 1}"), InvalidParameter);
  CHECK_THROWS_AS(RunManifest::from_text("{\"n1\": \"ten\"}"), InvalidParameter);
  CHECK_THROWS_AS(RunManifest::from_text("not json"), InvalidParameter);
  CHECK_THROWS_AS(RunManifest::from_text("{\"kind\": \"dance\"}"), InvalidParameter);
  CHECK(RunManifest::from_text("{}").to_text() == RunManifest{}.to_text());
}

TEST_CASE("threshold formulas") {
  CHECK(threshold_value("absolute", 10, 10, 0.5) == 1.0);
  CHECK(threshold_value("detection", 2000, 200000, 0.2) ==
        doctest::Approx(1 / (0.64 * std::sqrt(4e8))));
  CHECK(threshold_value("dd", 200, 51200, 0.2) == doctest::Approx(std::log(200.0) / std::sqrt(200.0 * 51200)));
  CHECK(threshold_value("svd", 400, 64000000, 0.2) ==
        doctest::Approx(std::log(400.0) / (std::pow(400.0, 2.0 / 3) * std::pow(6.4e7, 1.0 / 3))));
  CHECK_THROWS_AS(threshold_value("detection", 10, 10, 1.0), InvalidParameter);
  CHECK_THROWS_AS(threshold_value("psychic", 10, 10, 0.5), InvalidParameter);
  RunManifest m;
  m.multiples = {};
  CHECK_THROWS_AS(m.grid(), InvalidParameter);
  m.multiples = {-1.0};
  CHECK_THROWS_AS(m.grid(), InvalidParameter);
}

TEST_CASE("sweep files, schemas and determinism") {
  const auto dir = scratch("sweep");
  RunManifest m = small_sweep(dir);
  const auto res = run_sweep(m);
  CHECK(res.rows.size() == 2 * 3 * 3);
  CHECK(res.summary.size() == 2 * 3);

  const auto rows = check_csv(dir / "sweep.csv", m, "p,multiple,algorithm,trial,overlap,detected,status,diagnostics",
                              {"algorithm", "status", "diagnostics"});
  CHECK(rows.size() == res.rows.size());
  check_csv(dir / "sweep_summary.csv", m,
            "p,multiple,algorithm,trials,overlap_mean,overlap_stderr,detected_frac", {"algorithm"});
  for (const auto& alg : m.algorithms) {
    const auto text = slurp(dir / ("plot_" + alg + ".dat"));
    CHECK(text.rfind("# manifest " + m.hash() + "\n", 0) == 0);
    std::istringstream is(text.substr(text.find('\n') + 1));
    double p, o;
    int n = 0;
    while (is >> p >> o) ++n;
    CHECK(n == 2);
  }
  CHECK(RunManifest::load(dir / "manifest.json").to_text() == m.to_text());

  SUBCASE("rows match a direct call with the same seeds") {
    for (std::size_t cell = 0; cell < 2; ++cell)
      for (std::uint64_t trial = 0; trial < 3; ++trial) {
        const auto inst = make_trial(m, cell, trial);
        const auto direct = svd_partition(inst.graph, m.partition_options(inst.spectral_seed), &inst.sigma);
        const auto& row = res.rows[(cell * 3 + trial) * 3 + 1];
        CHECK(row.algorithm == "svd");
        CHECK(row.overlap == *direct.overlap);
      }
  }

  SUBCASE("bit-identical across runs and job counts") {
    const auto dir2 = scratch("sweep_jobs");
    RunManifest m2 = m;
    m2.out = dir2.string();
    m2.jobs = 3;
    run_sweep(m2);
    for (const char* f : {"sweep.csv", "sweep_summary.csv", "plot_svd.dat"})
      CHECK(slurp(dir / f) == slurp(dir2 / f));
  }
}

TEST_CASE("sweep errors") {
  RunManifest m = small_sweep(scratch("bad"));
  m.multiples = {};
  CHECK_THROWS_AS(run_sweep(m), InvalidParameter);
  m = small_sweep(scratch("bad"));
  m.algorithms = {"magic"};
  CHECK_THROWS_AS(run_sweep(m), InvalidParameter);

  const auto blocker = scratch("blocker");
  { std::ofstream(blocker) << "file"; }
  m = small_sweep(blocker / "sub");
  CHECK_THROWS(run_sweep(m));
}

TEST_CASE("overlap is nondecreasing in p across the detection threshold") {
  RunManifest m;
  m.kind = ExperimentKind::Sweep;
  m.n1 = 2000;
  m.n2 = 200000;
  m.delta = 0.2;
  m.multiples = {0.5, 0.75, 1.0, 1.5, 2.0};
  m.trials = 20;
  m.seed = 5;
  m.out = scratch("monotone").string();
  const auto res = run_sweep(m);
  for (const auto& alg : m.algorithms) {
    std::vector<SweepSummaryRow> cells;
    for (const auto& s : res.summary)
      if (s.algorithm == alg) cells.push_back(s);
    REQUIRE(cells.size() == 5);
    for (std::size_t i = 1; i < cells.size(); ++i) {
      INFO(alg << " cell " << i);
      CHECK(cells[i].overlap_mean >=
            cells[i - 1].overlap_mean - 3 * std::hypot(cells[i].overlap_stderr, cells[i - 1].overlap_stderr));
    }
  }
}

TEST_CASE("treesim, probe and localize drivers") {
  SUBCASE("treesim at delta = 1") {
    RunManifest m;
    m.kind = ExperimentKind::Treesim;
    m.delta = 1.0;
    m.threshold = "absolute";
    m.multiples = {0.8, 1.5};
    m.depth = 3;
    m.trials = 20;
    m.out = scratch("treesim").string();
    run_manifest(m);
    const auto rows = check_csv(fs::path(m.out) / "treesim.csv", m, "d,delta,R,trials,var_mean,var_stderr");
    REQUIRE(rows.size() == 2);
    for (const auto& r : rows) CHECK(r[4] == "1");
  }
  SUBCASE("probe at p = 0") {
    RunManifest m;
    m.kind = ExperimentKind::Probe;
    m.n1 = 20;
    m.n2 = 50;
    m.threshold = "absolute";
    m.multiples = {0.0};
    m.trials = 2;
    m.out = scratch("probe").string();
    run_manifest(m);
    const auto rows = check_csv(fs::path(m.out) / "probe.csv", m, "p,trial,b_norm,b_scaled,dv_norm,dv_scaled");
    REQUIRE(rows.size() == 2);
    for (const auto& r : rows) {
      CHECK(r[2] == "0");
      CHECK(r[4] == "0");
    }
  }
  SUBCASE("localize matches a direct report") {
    RunManifest m;
    m.kind = ExperimentKind::Localize;
    m.n1 = 100;
    m.n2 = 20000;
    m.delta = 0.2;
    m.threshold = "localization";
    m.multiples = {0.5};
    m.trials = 2;
    m.out = scratch("localize").string();
    const auto rows = run_localize(m);
    check_csv(fs::path(m.out) / "localize.csv", m,
              "p,trial,vector,singular_value,mass_fraction,sigma_correlation,r");
    REQUIRE(rows.size() == 6);
    const auto inst = make_trial(m, 0, 1);
    const auto rep = localization_report(inst.graph, inst.sigma, 3, default_cut(100),
                                         m.partition_options(inst.spectral_seed).spectral);
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(rows[3 + i].mass_fraction == rep.mass_fraction[i]);
      CHECK(rows[3 + i].sigma_correlation == rep.sigma_correlation[i]);
    }
  }
}

TEST_CASE("generate then partition") {
  const auto dir = scratch("gen");
  RunManifest g;
  g.kind = ExperimentKind::Generate;
  g.n1 = 200;
  g.n2 = 20000;
  g.delta = 0.2;
  g.threshold = "dd";
  g.multiples = {6.0};
  g.out = dir.string();
  const auto files = run_generate(g);
  CHECK(files.size() == 3);
  const auto graph = load_graph(dir / "graph.txt");
  const auto inst = make_trial(g, 0, 0);
  CHECK(std::equal(graph.edges().begin(), graph.edges().end(), inst.graph.edges().begin(), inst.graph.edges().end()));
  CHECK(load_labeling(dir / "sigma.txt") == inst.sigma);

  RunManifest p = g;
  p.kind = ExperimentKind::Partition;
  p.graph = (dir / "graph.txt").string();
  p.truth = (dir / "sigma.txt").string();
  p.out = (dir / "part").string();
  const auto runs = run_partition(p);
  REQUIRE(runs.size() == 3);
  for (const auto& alg : p.algorithms) {
    const auto j = nlohmann::json::parse(slurp(fs::path(p.out) / ("outcome_" + alg + ".json")));
    CHECK(j.contains("overlap"));
    CHECK(j.contains("detected"));
    CHECK(j["labels_file"] == "labels_" + alg + ".txt");
    CHECK(j["manifest"] == p.hash());
    bool has_diag = false;
    for (const auto& [k, v] : j.items()) has_diag |= k.rfind("diagnostics.", 0) == 0;
    CHECK(has_diag);
    CHECK(load_labeling(fs::path(p.out) / ("labels_" + alg + ".txt")).size() == 200);
  }
  CHECK(*runs[2].outcome.overlap >= 0.9);

  SUBCASE("planted model files") {
    RunManifest h;
    h.kind = ExperimentKind::Generate;
    h.model = "planted";
    h.n1 = 30;
    h.k = 3;
    h.delta = 1.5;
    h.threshold = "absolute";
    h.multiples = {0.05};
    h.out = scratch("gen_planted").string();
    const auto out = run_generate(h);
    CHECK(out.size() == 4);
    const auto red = load_graph(fs::path(h.out) / "graph.txt");
    CHECK(red.n2() == 900);
    CHECK(red.params().delta == doctest::Approx(1.5));
    std::ifstream hs(fs::path(h.out) / "hypergraph.phyp");
    const auto hyp = read_hypergraph(hs);
    CHECK(hyp.k == 3);
    CHECK(hyp.hyperedges.size() >= red.num_edges());
  }
}
