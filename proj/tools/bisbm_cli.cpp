#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bisbm/error.hpp"
#include "bisbm/experiment.hpp"

namespace {

const char* kSchemas = R"(Output files (every file starts with "# manifest <hash>"):
  sweep.csv          p,multiple,algorithm,trial,overlap,detected,status,diagnostics
  sweep_summary.csv  p,multiple,algorithm,trials,overlap_mean,overlap_stderr,detected_frac
  plot_<alg>.dat     p overlap_mean
  localize.csv       p,trial,vector,singular_value,mass_fraction,sigma_correlation,r
  treesim.csv        d,delta,R,trials,var_mean,var_stderr
  probe.csv          p,trial,b_norm,b_scaled,dv_norm,dv_scaled
  outcome_<alg>.json overlap, detected, labels_file, status, manifest, diagnostics.*
)";

// Values given on the command line; unset ones keep the manifest value.
struct Overrides {
  std::optional<std::uint64_t> n1, n2, seed, trials, jobs, t, r, max_iter, subset, m;
  std::optional<double> delta, epsilon, detect_margin, tol;
  std::optional<int> depth, k;
  std::optional<std::string> threshold, out, graph, truth, model, planting;
  std::optional<std::vector<double>> multiples;
  std::optional<std::vector<std::string>> algorithms;
  bool balanced = false, with_replacement = false;
};

template <class T>
void put(std::optional<T>& src, T& dst) {
  if (src) dst = *src;
}

void apply(const Overrides& o, bisbm::RunManifest& mf) {
  auto c = o;
  put(c.n1, mf.n1);
  put(c.n2, mf.n2);
  put(c.seed, mf.seed);
  put(c.trials, mf.trials);
  put(c.jobs, mf.jobs);
  put(c.t, mf.t);
  put(c.r, mf.r);
  put(c.max_iter, mf.max_iter);
  put(c.subset, mf.subset);
  put(c.m, mf.m);
  put(c.delta, mf.delta);
  put(c.epsilon, mf.epsilon);
  put(c.detect_margin, mf.detect_margin);
  put(c.tol, mf.tol);
  put(c.depth, mf.depth);
  put(c.k, mf.k);
  put(c.threshold, mf.threshold);
  put(c.out, mf.out);
  put(c.graph, mf.graph);
  put(c.truth, mf.truth);
  put(c.model, mf.model);
  put(c.planting, mf.planting);
  put(c.multiples, mf.multiples);
  put(c.algorithms, mf.algorithms);
  if (o.balanced) mf.balanced = true;
  if (o.with_replacement) mf.with_replacement = true;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bipartite stochastic block model experiments"};
  app.footer(kSchemas);
  app.require_subcommand(1);

  std::string manifest_path;
  bool print_only = false;
  Overrides o;

  const std::vector<std::pair<const char*, bisbm::ExperimentKind>> kinds{
      {"generate", bisbm::ExperimentKind::Generate}, {"partition", bisbm::ExperimentKind::Partition},
      {"sweep", bisbm::ExperimentKind::Sweep},       {"localize", bisbm::ExperimentKind::Localize},
      {"treesim", bisbm::ExperimentKind::Treesim},   {"probe", bisbm::ExperimentKind::Probe}};
  std::vector<CLI::App*> subs;
  for (const auto& [name, kind] : kinds) {
    CLI::App* sub = app.add_subcommand(name, "run a " + std::string(name) + " experiment");
    sub->footer(kSchemas);
    sub->add_option("--manifest", manifest_path, "manifest file (flat JSON object)");
    sub->add_option("--seed", o.seed, "master seed");
    sub->add_option("--trials", o.trials, "trials per grid cell");
    sub->add_option("--jobs", o.jobs, "worker threads");
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--n1", o.n1);
    sub->add_option("--n2", o.n2);
    sub->add_option("--delta", o.delta);
    sub->add_option("--threshold", o.threshold,
                    "absolute | detection | dd | svd | localization | tree");
    sub->add_option("--multiples", o.multiples, "grid points as multiples of the threshold");
    sub->add_option("--algorithms", o.algorithms, "sbm_reduction | svd | dd_svd");
    sub->add_flag("--balanced", o.balanced, "exactly balanced labels");
    sub->add_option("--epsilon", o.epsilon, "sparsification slack");
    sub->add_option("--detect-margin", o.detect_margin);
    sub->add_flag("--with-replacement", o.with_replacement, "sparsify with replacement");
    sub->add_option("--tol", o.tol);
    sub->add_option("--max-iter", o.max_iter);
    sub->add_option("--t", o.t, "localize: singular vectors");
    sub->add_option("--r", o.r, "localize: cut size (0 = n1 / ln n1)");
    sub->add_option("--depth", o.depth, "treesim: observed generation R");
    sub->add_option("--graph", o.graph, "partition: graph file");
    sub->add_option("--truth", o.truth, "partition: labeling file");
    sub->add_option("--model", o.model, "generate: bisbm | planted | sat | goldreich");
    sub->add_option("--k", o.k, "generate: arity");
    sub->add_option("--planting", o.planting, "generate: 'parity' or a planting file");
    sub->add_option("--subset", o.subset, "generate: projection set as a bitmask (0 = all)");
    sub->add_option("--m", o.m, "generate: goldreich tuple count");
    sub->add_flag("--print-manifest", print_only, "print the resolved manifest and exit");
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    bisbm::RunManifest mf;
    if (!manifest_path.empty()) mf = bisbm::RunManifest::load(manifest_path);
    for (std::size_t i = 0; i < subs.size(); ++i)
      if (subs[i]->parsed()) mf.kind = kinds[i].second;
    apply(o, mf);
    if (print_only) {
      std::cout << mf.to_text();
      return 0;
    }
    bisbm::run_manifest(mf);
    std::cerr << "manifest " << mf.hash() << " -> " << mf.out << '\n';
  } catch (const bisbm::InvalidParameter& e) {
    std::cerr << "invalid parameter: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
