#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "bisbm/model.hpp"
#include "bisbm/rng.hpp"

namespace bisbm {

/// Bitmask over [k]: bit i set means coordinate i. Also used as the index of a
/// point x in {+-1}^k, where bit i set means x_i = -1.
using SubsetMask = std::uint32_t;

inline constexpr int sign_at(SubsetMask point, int i) { return (point >> i) & 1U ? -1 : 1; }

/// chi_S(x) = prod_{i in S} x_i.
inline constexpr int character(SubsetMask subset, SubsetMask point) {
  return __builtin_popcount(subset & point) & 1 ? -1 : 1;
}

/// Probability mass Q over {+-1}^k.
class PlantingFunction {
 public:
  static constexpr int kMaxArity = 16;

  /// table[x] = Q(x) with x encoded as a SubsetMask point. Throws
  /// InvalidParameter unless entries are >= 0 and sum to 1 within 1e-12.
  PlantingFunction(int k, std::vector<double> table);

  static PlantingFunction uniform(int k);
  /// Q(x) = 2^-k (1 + (delta - 1) prod x_i); the k = 2 case is the ordinary SBM.
  static PlantingFunction parity(int k, double delta);
  /// Q proportional to a 0/1 predicate. Throws if the predicate is identically 0.
  static PlantingFunction from_predicate(int k, const std::vector<std::uint8_t>& predicate);

  int k() const { return k_; }
  std::size_t size() const { return table_.size(); }
  double operator()(SubsetMask x) const { return table_[x]; }
  const std::vector<double>& table() const { return table_; }
  double max_mass() const;

 private:
  int k_;
  std::vector<double> table_;
};

struct FourierReport {
  /// coefficients[S] = hat Q(S) = 2^-k sum_x Q(x) chi_S(x), for every S.
  std::vector<double> coefficients;
  int distribution_complexity = 0;
  std::vector<SubsetMask> argmin_sets;

  double operator[](SubsetMask s) const { return coefficients[s]; }
};

inline constexpr double kFourierZero = 1e-12;

/// Throws NoSignal when every nonempty coefficient vanishes.
FourierReport fourier(const PlantingFunction& q);

/// The block-model parameter induced by projecting onto S: 1 + 2^k hat Q(S).
double reduction_delta(const FourierReport& report, int k, SubsetMask s);

struct PlantedHypergraph {
  std::uint64_t n = 0;   // vertices, or 2 * variables in SAT mode
  int k = 0;
  bool sat_mode = false;
  Labeling sigma;        // over the n vertices (literals in SAT mode)
  std::vector<std::vector<Vertex>> hyperedges;
  std::vector<std::uint8_t> labels;  // Goldreich mode only; empty otherwise
};

/// Every ordered k-tuple e appears independently with probability
/// 2^k p Q(sigma(e)). sigma is drawn from derive(seed, {0}).
PlantedHypergraph gen_planted_hypergraph(std::uint64_t n, const PlantingFunction& q,
                                         double p, Seed seed);

/// Planted k-SAT: the hypergraph model over the 2n literals, literal 2i being
/// variable i and 2i+1 its negation, with sigma(not x) = -sigma(x).
PlantedHypergraph gen_planted_sat(std::uint64_t num_vars, const PlantingFunction& q,
                                  double p, Seed seed);

/// m uniform k-tuples, each labelled with predicate(sigma(e)) in {0, 1}.
/// predicate is indexed like a PlantingFunction table.
PlantedHypergraph gen_goldreich(std::uint64_t n, int k,
                                const std::vector<std::uint8_t>& predicate,
                                std::uint64_t m, Seed seed);

/// Drops hyperedges labelled 0 and clears the labels.
PlantedHypergraph filter_positive(const PlantedHypergraph& h);

/// Bipartite instance produced from a planted hypergraph.
struct ReducedInstance {
  BipartiteGraph graph;
  /// One entry per hyperedge, before duplicate (u, v) pairs are merged.
  std::vector<BipartiteEdge> raw_edges;
  std::uint64_t n = 0;     // radix of the V2 tuple code
  int tuple_len = 0;       // r - 1
  Labeling sigma;          // labels of V1

  std::vector<Vertex> decode(Column code) const;
  /// tau(T) = product of sigma over the tuple's entries.
  int column_label(Column code) const;
};

/// Projects every hyperedge onto the coordinates in s, sends one uniformly
/// chosen entry to V1 and the remaining r-1 (in order) to V2 as a mixed-radix
/// tuple code. Throws Unsupported when |s| < 2. model_delta only fills the
/// graph's ModelParams; pass reduction_delta(...) when Q is known.
ReducedInstance reduce_to_bipartite(const PlantedHypergraph& h, SubsetMask s, Seed seed,
                                    std::optional<double> model_delta = std::nullopt);

}  // namespace bisbm
