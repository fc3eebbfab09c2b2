#include "bisbm/experiment.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "bisbm/error.hpp"
#include "bisbm/io.hpp"
#include "bisbm/planting.hpp"
#include "json.hpp"

namespace bisbm {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

const std::map<std::string, ExperimentKind>& kind_names() {
  static const std::map<std::string, ExperimentKind> names{
      {"generate", ExperimentKind::Generate}, {"partition", ExperimentKind::Partition},
      {"sweep", ExperimentKind::Sweep},       {"localize", ExperimentKind::Localize},
      {"treesim", ExperimentKind::Treesim},   {"probe", ExperimentKind::Probe}};
  return names;
}

std::string fmt(double x) { return format_double(x); }

std::ofstream open_result(const RunManifest& m, const std::string& name) {
  fs::create_directories(m.out);
  const fs::path path = fs::path(m.out) / name;
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write '" + path.string() + "'");
  os << "# manifest " << m.hash() << '\n';
  return os;
}

void write_manifest_copy(const RunManifest& m) {
  fs::create_directories(m.out);
  std::ofstream os(fs::path(m.out) / "manifest.json");
  os << m.to_text();
}

std::string join_diagnostics(const std::map<std::string, double>& d) {
  std::string out;
  for (const auto& [k, v] : d) {
    if (!out.empty()) out += ';';
    out += k + '=' + fmt(v);
  }
  return out;
}

std::vector<std::uint8_t> predicate_from_planting(const PlantingFunction& q) {
  std::vector<std::uint8_t> out(q.size());
  for (SubsetMask x = 0; x < q.size(); ++x) out[x] = q(x) > 0.0 ? 1 : 0;
  return out;
}

}  // namespace

std::string to_string(ExperimentKind k) {
  for (const auto& [name, kind] : kind_names())
    if (kind == k) return name;
  return "unknown";
}

ExperimentKind parse_kind(const std::string& s) {
  const auto it = kind_names().find(s);
  if (it == kind_names().end()) throw InvalidParameter("unknown experiment kind '" + s + "'");
  return it->second;
}

double threshold_value(const std::string& name, std::uint64_t n1, std::uint64_t n2, double delta) {
  const double a = static_cast<double>(n1), b = static_cast<double>(n2);
  if (name == "absolute") return 1.0;
  if (name == "detection") {
    if (delta == 1.0) throw InvalidParameter("detection threshold is undefined at delta = 1");
    return 1.0 / ((delta - 1.0) * (delta - 1.0) * std::sqrt(a * b));
  }
  if (name == "dd") return std::log(a) / std::sqrt(a * b);
  if (name == "svd") return std::pow(a, -2.0 / 3.0) * std::pow(b, -1.0 / 3.0) * std::log(a);
  if (name == "localization") return std::pow(a, -2.0 / 3.0) * std::pow(b, -1.0 / 3.0);
  if (name == "tree") {
    if (delta == 1.0) throw InvalidParameter("tree threshold is undefined at delta = 1");
    return 1.0 / ((delta - 1.0) * (delta - 1.0));
  }
  throw InvalidParameter("unknown threshold '" + name + "'");
}

std::string RunManifest::to_text() const {
  json j;
  j["kind"] = to_string(kind);
  j["n1"] = n1;
  j["n2"] = n2;
  j["delta"] = delta;
  j["threshold"] = threshold;
  j["multiples"] = multiples;
  j["algorithms"] = algorithms;
  j["balanced"] = balanced;
  j["epsilon"] = epsilon;
  j["detect_margin"] = detect_margin;
  j["with_replacement"] = with_replacement;
  j["tol"] = tol;
  j["max_iter"] = max_iter;
  j["t"] = t;
  j["r"] = r;
  j["depth"] = depth;
  j["seed"] = seed;
  j["trials"] = trials;
  j["jobs"] = jobs;
  j["out"] = out;
  j["graph"] = graph;
  j["truth"] = truth;
  j["model"] = model;
  j["k"] = k;
  j["planting"] = planting;
  j["subset"] = subset;
  j["m"] = m;
  return j.dump(2) + "\n";
}

RunManifest RunManifest::from_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidParameter(std::string("manifest is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw InvalidParameter("manifest must be a flat JSON object");
  RunManifest mf;
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "kind") mf.kind = parse_kind(v.get<std::string>());
      else if (key == "n1") mf.n1 = v.get<std::uint64_t>();
      else if (key == "n2") mf.n2 = v.get<std::uint64_t>();
      else if (key == "delta") mf.delta = v.get<double>();
      else if (key == "threshold") mf.threshold = v.get<std::string>();
      else if (key == "multiples") mf.multiples = v.get<std::vector<double>>();
      else if (key == "algorithms") mf.algorithms = v.get<std::vector<std::string>>();
      else if (key == "balanced") mf.balanced = v.get<bool>();
      else if (key == "epsilon") mf.epsilon = v.get<double>();
      else if (key == "detect_margin") mf.detect_margin = v.get<double>();
      else if (key == "with_replacement") mf.with_replacement = v.get<bool>();
      else if (key == "tol") mf.tol = v.get<double>();
      else if (key == "max_iter") mf.max_iter = v.get<std::uint64_t>();
      else if (key == "t") mf.t = v.get<std::uint64_t>();
      else if (key == "r") mf.r = v.get<std::uint64_t>();
      else if (key == "depth") mf.depth = v.get<int>();
      else if (key == "seed") mf.seed = v.get<std::uint64_t>();
      else if (key == "trials") mf.trials = v.get<std::uint64_t>();
      else if (key == "jobs") mf.jobs = v.get<std::uint64_t>();
      else if (key == "out") mf.out = v.get<std::string>();
      else if (key == "graph") mf.graph = v.get<std::string>();
      else if (key == "truth") mf.truth = v.get<std::string>();
      else if (key == "model") mf.model = v.get<std::string>();
      else if (key == "k") mf.k = v.get<int>();
      else if (key == "planting") mf.planting = v.get<std::string>();
      else if (key == "subset") mf.subset = v.get<std::uint64_t>();
      else if (key == "m") mf.m = v.get<std::uint64_t>();
      else throw InvalidParameter("unknown manifest key '" + key + "'");
    }
  } catch (const json::type_error& e) {
    throw InvalidParameter(std::string("manifest value has the wrong type: ") + e.what());
  }
  return mf;
}

RunManifest RunManifest::load(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw InvalidParameter("cannot open manifest '" + path.string() + "'");
  std::stringstream ss;
  ss << is.rdbuf();
  return from_text(ss.str());
}

std::string RunManifest::hash() const {
  RunManifest canon = *this;
  canon.jobs = 1;
  canon.out.clear();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canon.to_text()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

std::vector<double> RunManifest::grid() const {
  if (multiples.empty()) throw InvalidParameter("empty grid: 'multiples' has no entries");
  const double base = threshold_value(threshold, n1, n2, delta);
  std::vector<double> out;
  for (double x : multiples) {
    if (!(x >= 0.0) || !std::isfinite(x)) throw InvalidParameter("grid multiples must be finite and >= 0");
    out.push_back(x * base);
  }
  return out;
}

ModelParams RunManifest::params_at(double p) const {
  ModelParams mp{n1, n2, p, delta};
  mp.validate();
  return mp;
}

PartitionOptions RunManifest::partition_options(Seed spectral_seed) const {
  PartitionOptions o;
  o.spectral.tol = tol;
  o.spectral.max_iter = max_iter;
  o.spectral.seed = spectral_seed;
  o.detect_margin = detect_margin;
  return o;
}

TrialInstance make_trial(const RunManifest& m, std::size_t cell, std::uint64_t trial) {
  const auto grid = m.grid();
  if (cell >= grid.size()) throw InvalidParameter("cell index outside the grid");
  const ModelParams mp = m.params_at(grid[cell]);
  const Seed base{m.seed};
  const std::uint64_t c = cell;
  Labeling sigma = gen_labeling(mp.n1, derive(base, {c, trial, 0}), m.balanced);
  BipartiteGraph g;
  {
    const Labeling tau = gen_labeling(mp.n2, derive(base, {c, trial, 1}), m.balanced);
    g = gen_bipartite_sbm(mp, sigma, tau, derive(base, {c, trial, 2}));
  }
  return {std::move(sigma), std::move(g), derive(base, {c, trial, 3})};
}

AlgorithmRun run_algorithm(const std::string& name, const BipartiteGraph& g, const RunManifest& m,
                           Seed spectral_seed, const Labeling* truth) {
  const PartitionOptions opts = m.partition_options(spectral_seed);
  AlgorithmRun run;
  auto fallback = [&](const std::string& status) {
    run.status = status;
    run.outcome = PartitionOutcome{};
    run.outcome.labels = Labeling(std::vector<std::int8_t>(g.n1(), 1));
    if (truth) run.outcome.overlap = overlap(run.outcome.labels, *truth);
    run.outcome.detected = false;
  };
  try {
    if (name == "svd") {
      run.outcome = svd_partition(g, opts, truth);
    } else if (name == "dd_svd") {
      run.outcome = dd_svd_partition(g, opts, truth);
    } else if (name == "sbm_reduction") {
      DetectionParams dp;
      dp.epsilon = m.epsilon;
      dp.delta_hat = m.delta;
      dp.with_replacement = m.with_replacement;
      run.outcome = sbm_reduction_detect(g, dp, opts, truth);
      if (run.outcome.diagnostics["failure"] != 0.0) run.status = "sparsify_failure";
      else if (run.outcome.diagnostics["converged"] == 0.0) run.status = "no_convergence";
    } else {
      throw InvalidParameter("unknown algorithm '" + name + "'");
    }
  } catch (const ConvergenceError&) {
    fallback("no_convergence");
  } catch (const Degenerate&) {
    fallback("degenerate");
  }
  return run;
}

void parallel_for(std::size_t count, std::size_t jobs, const std::function<void(std::size_t)>& f) {
  jobs = std::max<std::size_t>(1, std::min(jobs, count));
  if (jobs == 1) {
    for (std::size_t i = 0; i < count; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < jobs; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          f(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

SweepResult run_sweep(const RunManifest& m) {
  const auto grid = m.grid();
  if (m.algorithms.empty()) throw InvalidParameter("sweep needs at least one algorithm");
  if (m.trials < 1) throw InvalidParameter("trials must be >= 1");
  for (const auto& a : m.algorithms)
    if (a != "svd" && a != "dd_svd" && a != "sbm_reduction")
      throw InvalidParameter("unknown algorithm '" + a + "'");
  write_manifest_copy(m);
  auto rows_os = open_result(m, "sweep.csv");

  const std::size_t per_cell = m.trials;
  const std::size_t na = m.algorithms.size();
  std::vector<SweepRow> rows(grid.size() * per_cell * na);
  parallel_for(grid.size() * per_cell, m.jobs, [&](std::size_t task) {
    const std::size_t cell = task / per_cell;
    const std::uint64_t trial = task % per_cell;
    const TrialInstance inst = make_trial(m, cell, trial);
    for (std::size_t a = 0; a < na; ++a) {
      const AlgorithmRun run = run_algorithm(m.algorithms[a], inst.graph, m,
                                             inst.spectral_seed, &inst.sigma);
      SweepRow& row = rows[task * na + a];
      row.p = grid[cell];
      row.multiple = m.multiples[cell];
      row.algorithm = m.algorithms[a];
      row.trial = trial;
      row.overlap = run.outcome.overlap.value_or(0.0);
      row.detected = run.outcome.detected;
      row.status = run.status;
      row.diagnostics = join_diagnostics(run.outcome.diagnostics);
    }
  });

  rows_os << "p,multiple,algorithm,trial,overlap,detected,status,diagnostics\n";
  for (const auto& r : rows)
    rows_os << fmt(r.p) << ',' << fmt(r.multiple) << ',' << r.algorithm << ',' << r.trial << ','
            << fmt(r.overlap) << ',' << (r.detected ? 1 : 0) << ',' << r.status << ','
            << r.diagnostics << '\n';

  SweepResult result;
  for (std::size_t cell = 0; cell < grid.size(); ++cell) {
    for (std::size_t a = 0; a < na; ++a) {
      double sum = 0.0, sum_sq = 0.0, det = 0.0;
      for (std::size_t tr = 0; tr < per_cell; ++tr) {
        const auto& r = rows[(cell * per_cell + tr) * na + a];
        sum += r.overlap;
        sum_sq += r.overlap * r.overlap;
        det += r.detected ? 1.0 : 0.0;
      }
      const auto n = static_cast<double>(per_cell);
      SweepSummaryRow s;
      s.p = grid[cell];
      s.multiple = m.multiples[cell];
      s.algorithm = m.algorithms[a];
      s.trials = per_cell;
      s.overlap_mean = sum / n;
      s.overlap_stderr =
          per_cell > 1 ? std::sqrt(std::max(0.0, (sum_sq - n * s.overlap_mean * s.overlap_mean) / (n - 1)) / n)
                       : 0.0;
      s.detected_frac = det / n;
      result.summary.push_back(s);
    }
  }

  auto sum_os = open_result(m, "sweep_summary.csv");
  sum_os << "p,multiple,algorithm,trials,overlap_mean,overlap_stderr,detected_frac\n";
  for (const auto& s : result.summary)
    sum_os << fmt(s.p) << ',' << fmt(s.multiple) << ',' << s.algorithm << ',' << s.trials << ','
           << fmt(s.overlap_mean) << ',' << fmt(s.overlap_stderr) << ',' << fmt(s.detected_frac)
           << '\n';
  for (const auto& alg : m.algorithms) {
    auto plot = open_result(m, "plot_" + alg + ".dat");
    for (const auto& s : result.summary)
      if (s.algorithm == alg) plot << fmt(s.p) << ' ' << fmt(s.overlap_mean) << '\n';
  }
  result.rows = std::move(rows);
  return result;
}

std::vector<LocalizeRow> run_localize(const RunManifest& m) {
  const auto grid = m.grid();
  if (m.trials < 1) throw InvalidParameter("trials must be >= 1");
  write_manifest_copy(m);
  const std::uint64_t r = m.r ? m.r : default_cut(m.n1);
  std::vector<std::vector<LocalizeRow>> per_task(grid.size() * m.trials);
  parallel_for(per_task.size(), m.jobs, [&](std::size_t task) {
    const std::size_t cell = task / m.trials;
    const std::uint64_t trial = task % m.trials;
    const TrialInstance inst = make_trial(m, cell, trial);
    SpectralOptions so = m.partition_options(inst.spectral_seed).spectral;
    const auto rep = localization_report(inst.graph, inst.sigma, m.t, r, so);
    for (std::size_t i = 0; i < rep.mass_fraction.size(); ++i)
      per_task[task].push_back({grid[cell], trial, i + 1, rep.singular_values[i],
                                rep.mass_fraction[i], rep.sigma_correlation[i], r});
  });
  std::vector<LocalizeRow> rows;
  for (auto& v : per_task) rows.insert(rows.end(), v.begin(), v.end());

  auto os = open_result(m, "localize.csv");
  os << "p,trial,vector,singular_value,mass_fraction,sigma_correlation,r\n";
  for (const auto& x : rows)
    os << fmt(x.p) << ',' << x.trial << ',' << x.vector << ',' << fmt(x.singular_value) << ','
       << fmt(x.mass_fraction) << ',' << fmt(x.sigma_correlation) << ',' << x.r << '\n';
  return rows;
}

std::vector<TreesimRow> run_treesim(const RunManifest& m) {
  if (m.multiples.empty()) throw InvalidParameter("empty grid: 'multiples' has no entries");
  const double base = threshold_value(m.threshold, m.n1, m.n2, m.delta);
  write_manifest_copy(m);
  std::vector<TreesimRow> rows(m.multiples.size());
  parallel_for(rows.size(), m.jobs, [&](std::size_t cell) {
    TreeParams tp;
    tp.d = m.multiples[cell] * base;
    tp.delta = m.delta;
    tp.depth = m.depth;
    tp.trials = m.trials;
    const auto est = reconstruction_variance(tp, derive(Seed{m.seed}, {cell}));
    rows[cell] = {tp.d, tp.delta, tp.depth, tp.trials, est.mean, est.std_error};
  });
  auto os = open_result(m, "treesim.csv");
  os << "d,delta,R,trials,var_mean,var_stderr\n";
  for (const auto& x : rows)
    os << fmt(x.d) << ',' << fmt(x.delta) << ',' << x.depth << ',' << x.trials << ','
       << fmt(x.var_mean) << ',' << fmt(x.var_stderr) << '\n';
  return rows;
}

std::vector<ProbeRow> run_probe(const RunManifest& m) {
  const auto grid = m.grid();
  write_manifest_copy(m);
  SpectralOptions so;
  so.tol = m.tol;
  so.max_iter = m.max_iter;
  std::vector<std::vector<ProbeRow>> per_cell(grid.size());
  parallel_for(grid.size(), m.jobs, [&](std::size_t cell) {
    const ModelParams mp = m.params_at(grid[cell]);
    const auto samples = noise_norm_probe(mp, m.trials, derive(Seed{m.seed}, {cell}), so);
    const double bscale = std::sqrt(static_cast<double>(mp.n1) * static_cast<double>(mp.n2)) * mp.p;
    const double dscale =
        std::sqrt(static_cast<double>(mp.n2) * mp.p * std::log(static_cast<double>(mp.n1)));
    for (const auto& s : samples)
      per_cell[cell].push_back({mp.p, s.trial, s.b_norm, bscale > 0 ? s.b_norm / bscale : 0.0,
                                s.dv_norm, dscale > 0 ? s.dv_norm / dscale : 0.0});
  });
  std::vector<ProbeRow> rows;
  for (auto& v : per_cell) rows.insert(rows.end(), v.begin(), v.end());
  auto os = open_result(m, "probe.csv");
  os << "p,trial,b_norm,b_scaled,dv_norm,dv_scaled\n";
  for (const auto& x : rows)
    os << fmt(x.p) << ',' << x.trial << ',' << fmt(x.b_norm) << ',' << fmt(x.b_scaled) << ','
       << fmt(x.dv_norm) << ',' << fmt(x.dv_scaled) << '\n';
  return rows;
}

std::vector<fs::path> run_generate(const RunManifest& m) {
  write_manifest_copy(m);
  const fs::path dir(m.out);
  std::vector<fs::path> written;
  auto emit = [&](const std::string& name, const std::function<void(std::ostream&)>& body) {
    auto os = open_result(m, name);
    body(os);
    written.push_back(dir / name);
  };

  if (m.model == "bisbm") {
    const TrialInstance inst = make_trial(m, 0, 0);
    emit("graph.txt", [&](std::ostream& os) { write_graph(os, inst.graph); });
    emit("sigma.txt", [&](std::ostream& os) { write_labeling(os, inst.sigma); });
    if (m.n2 <= 1000000) {
      const Labeling tau = gen_labeling(m.n2, derive(Seed{m.seed}, {0, 0, 1}), m.balanced);
      emit("tau.txt", [&](std::ostream& os) { write_labeling(os, tau); });
    }
    return written;
  }

  PlantingFunction q = PlantingFunction::parity(m.k, m.delta);
  if (m.planting != "parity") {
    std::ifstream is(m.planting);
    if (!is) throw InvalidParameter("cannot open planting file '" + m.planting + "'");
    q = read_planting(is);
  }
  const Seed base{m.seed};
  const double p = m.grid().front();
  PlantedHypergraph h;
  if (m.model == "planted") h = gen_planted_hypergraph(m.n1, q, p, base);
  else if (m.model == "sat") h = gen_planted_sat(m.n1, q, p, base);
  else if (m.model == "goldreich") h = filter_positive(gen_goldreich(m.n1, q.k(), predicate_from_planting(q), m.m, base));
  else throw InvalidParameter("unknown model '" + m.model + "'");

  const SubsetMask s = m.subset ? static_cast<SubsetMask>(m.subset) : (SubsetMask{1} << q.k()) - 1;
  std::optional<double> model_delta;
  const FourierReport rep = fourier(q);
  model_delta = reduction_delta(rep, q.k(), s);
  emit("fourier.csv", [&](std::ostream& os) {
    os << "subset,size,coefficient\n";
    for (SubsetMask x = 0; x < rep.coefficients.size(); ++x)
      os << x << ',' << __builtin_popcount(x) << ',' << fmt(rep.coefficients[x]) << '\n';
  });
  emit("hypergraph.phyp", [&](std::ostream& os) { write_hypergraph(os, h); });
  emit("sigma.txt", [&](std::ostream& os) { write_labeling(os, h.sigma); });
  const ReducedInstance red = reduce_to_bipartite(h, s, derive(base, {2}), model_delta);
  emit("graph.txt", [&](std::ostream& os) { write_graph(os, red.graph); });
  return written;
}

std::vector<AlgorithmRun> run_partition(const RunManifest& m) {
  if (m.graph.empty()) throw InvalidParameter("partition needs 'graph'");
  const BipartiteGraph g = load_graph(m.graph);
  std::optional<Labeling> truth;
  if (!m.truth.empty()) truth = load_labeling(m.truth);
  if (truth && truth->size() != g.n1()) throw InvalidParameter("truth length must equal n1");
  write_manifest_copy(m);

  std::vector<AlgorithmRun> runs;
  for (std::size_t a = 0; a < m.algorithms.size(); ++a) {
    const std::string& alg = m.algorithms[a];
    AlgorithmRun run = run_algorithm(alg, g, m, derive(Seed{m.seed}, {a}), truth ? &*truth : nullptr);
    const std::string labels_file = "labels_" + alg + ".txt";
    {
      auto os = open_result(m, labels_file);
      write_labeling(os, run.outcome.labels);
    }
    json rec;
    rec["overlap"] = run.outcome.overlap ? json(*run.outcome.overlap) : json(nullptr);
    rec["detected"] = run.outcome.detected;
    rec["labels_file"] = labels_file;
    rec["status"] = run.status;
    rec["manifest"] = m.hash();
    for (const auto& [k, v] : run.outcome.diagnostics) rec["diagnostics." + k] = v;
    std::ofstream os(fs::path(m.out) / ("outcome_" + alg + ".json"));
    os << rec.dump(2) << '\n';
    runs.push_back(std::move(run));
  }
  return runs;
}

void run_manifest(const RunManifest& m) {
  switch (m.kind) {
    case ExperimentKind::Generate: run_generate(m); break;
    case ExperimentKind::Partition: run_partition(m); break;
    case ExperimentKind::Sweep: run_sweep(m); break;
    case ExperimentKind::Localize: run_localize(m); break;
    case ExperimentKind::Treesim: run_treesim(m); break;
    case ExperimentKind::Probe: run_probe(m); break;
  }
}

}  // namespace bisbm
