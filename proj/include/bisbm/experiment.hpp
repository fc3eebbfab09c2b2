#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "bisbm/algorithms.hpp"
#include "bisbm/analysis.hpp"
#include "bisbm/model.hpp"
#include "bisbm/treesim.hpp"

namespace bisbm {

enum class ExperimentKind { Generate, Partition, Sweep, Localize, Treesim, Probe };

std::string to_string(ExperimentKind k);
ExperimentKind parse_kind(const std::string& s);

/// Density scalings that grid points are expressed against.
///   absolute      1
///   detection     (delta - 1)^-2 (n1 n2)^-1/2
///   dd            (n1 n2)^-1/2 ln n1
///   svd           n1^-2/3 n2^-1/3 ln n1
///   localization  n1^-2/3 n2^-1/3
///   tree          (delta - 1)^-2, for treesim grids over d
double threshold_value(const std::string& name, std::uint64_t n1, std::uint64_t n2, double delta);

/// Everything needed to reproduce one experiment. Serialised as a flat JSON
/// object; see README for the keys.
struct RunManifest {
  ExperimentKind kind = ExperimentKind::Sweep;
  std::uint64_t n1 = 100;
  std::uint64_t n2 = 1000;
  double delta = 0.2;
  std::string threshold = "detection";
  std::vector<double> multiples{1.0};
  std::vector<std::string> algorithms{"sbm_reduction", "svd", "dd_svd"};
  bool balanced = false;
  double epsilon = 1.0;
  double detect_margin = 0.05;
  bool with_replacement = false;
  double tol = 1e-8;
  std::uint64_t max_iter = 10000;
  std::uint64_t t = 3;   // localize: singular vectors
  std::uint64_t r = 0;   // localize: cut size, 0 = floor(n1 / ln n1)
  int depth = 6;         // treesim: R
  std::uint64_t seed = 1;
  std::uint64_t trials = 1;
  std::uint64_t jobs = 1;
  std::string out = "out";
  // partition
  std::string graph;
  std::string truth;
  // generate
  std::string model = "bisbm";  // bisbm | planted | sat | goldreich
  int k = 3;
  std::string planting = "parity";  // "parity" or a planting file path
  std::uint64_t subset = 0;          // 0 = all of [k]
  std::uint64_t m = 0;               // goldreich tuple count

  std::string to_text() const;
  static RunManifest from_text(const std::string& text);
  static RunManifest load(const std::filesystem::path& path);

  /// FNV-1a over to_text() with jobs and out removed, as 16 hex digits.
  std::string hash() const;

  /// multiples scaled by the named threshold.
  std::vector<double> grid() const;
  ModelParams params_at(double p) const;
  PartitionOptions partition_options(Seed spectral_seed) const;
};

/// One sampled instance of a sweep cell.
struct TrialInstance {
  Labeling sigma;
  BipartiteGraph graph;
  Seed spectral_seed;
};

/// Instance for (cell, trial): sigma from derive(seed, {cell, trial, 0}), tau
/// from {.., 1}, the graph from {.., 2}, spectral seed {.., 3}.
TrialInstance make_trial(const RunManifest& m, std::size_t cell, std::uint64_t trial);

/// Runs one named algorithm. Solver failures are returned as a non-empty
/// status with labels all +1, never thrown.
struct AlgorithmRun {
  PartitionOutcome outcome;
  std::string status = "ok";
};
AlgorithmRun run_algorithm(const std::string& name, const BipartiteGraph& g, const RunManifest& m,
                           Seed spectral_seed, const Labeling* truth);

struct SweepRow {
  double p = 0.0;
  double multiple = 0.0;
  std::string algorithm;
  std::uint64_t trial = 0;
  double overlap = 0.0;
  bool detected = false;
  std::string status;
  std::string diagnostics;  // "key=value;..." in key order
};

struct SweepSummaryRow {
  double p = 0.0;
  double multiple = 0.0;
  std::string algorithm;
  std::uint64_t trials = 0;
  double overlap_mean = 0.0;
  double overlap_stderr = 0.0;
  double detected_frac = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<SweepSummaryRow> summary;
};

/// Runs f(i) for i in [0, count) on up to jobs threads. Each index writes its
/// own slot, so output order never depends on scheduling.
void parallel_for(std::size_t count, std::size_t jobs, const std::function<void(std::size_t)>& f);

// Each run_* writes its files under m.out (created if needed); every file
// starts with "# manifest <hash>". Empty grids throw InvalidParameter.
SweepResult run_sweep(const RunManifest& m);

struct LocalizeRow {
  double p = 0.0;
  std::uint64_t trial = 0;
  std::uint64_t vector = 0;
  double singular_value = 0.0;
  double mass_fraction = 0.0;
  double sigma_correlation = 0.0;
  std::uint64_t r = 0;
};
std::vector<LocalizeRow> run_localize(const RunManifest& m);

struct TreesimRow {
  double d = 0.0;
  double delta = 0.0;
  int depth = 0;
  std::uint64_t trials = 0;
  double var_mean = 0.0;
  double var_stderr = 0.0;
};
std::vector<TreesimRow> run_treesim(const RunManifest& m);

struct ProbeRow {
  double p = 0.0;
  std::uint64_t trial = 0;
  double b_norm = 0.0;
  double b_scaled = 0.0;   // / (sqrt(n1 n2) p)
  double dv_norm = 0.0;
  double dv_scaled = 0.0;  // / sqrt(n2 p ln n1)
};
std::vector<ProbeRow> run_probe(const RunManifest& m);

/// Writes one instance (graph.txt, sigma.txt, tau.txt when n2 <= 10^6, or the
/// planted-model files) and returns the list of files written.
std::vector<std::filesystem::path> run_generate(const RunManifest& m);

/// Loads m.graph (and m.truth if set), runs m.algorithms, writes
/// outcome_<alg>.json and labels_<alg>.txt.
std::vector<AlgorithmRun> run_partition(const RunManifest& m);

/// Dispatch on m.kind.
void run_manifest(const RunManifest& m);

}  // namespace bisbm
