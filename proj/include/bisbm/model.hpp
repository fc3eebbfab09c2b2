#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "bisbm/rng.hpp"

namespace bisbm {

using Vertex = std::uint32_t;   // index into V1
using Column = std::uint64_t;   // index into V2 (may be a mixed-radix tuple code)

struct ModelParams {
  std::uint64_t n1 = 1;
  std::uint64_t n2 = 1;
  double p = 0.0;
  double delta = 1.0;

  double same_prob() const { return delta * p; }
  double cross_prob() const { return (2.0 - delta) * p; }

  /// Throws InvalidParameter when any invariant fails. Values are rejected,
  /// never clamped.
  void validate() const;

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

/// A +-1 community assignment.
class Labeling {
 public:
  Labeling() = default;
  /// Throws InvalidParameter if any entry is not exactly +1 or -1.
  explicit Labeling(std::vector<std::int8_t> values);

  std::size_t size() const { return values_.size(); }
  int operator[](std::size_t i) const { return values_[i]; }
  std::span<const std::int8_t> values() const { return values_; }

  /// Mean of the entries. Only a diagnostic; nothing consumes it.
  double bias() const;

  Labeling flipped() const;

  friend bool operator==(const Labeling&, const Labeling&) = default;

 private:
  std::vector<std::int8_t> values_;
};

struct BipartiteEdge {
  Vertex u;
  Column v;
  friend auto operator<=>(const BipartiteEdge&, const BipartiteEdge&) = default;
};

/// Sparse bipartite graph between V1 = [0, n1) and V2 = [0, n2).
///
/// Only columns with at least one edge are stored. Rows are CSR with sorted
/// neighbour lists; the active columns are a second CSR keyed by sorted column
/// id. Immutable after construction.
class BipartiteGraph {
 public:
  BipartiteGraph() = default;
  /// Edges may arrive in any order; duplicates throw InvalidParameter, as do
  /// out-of-range endpoints.
  BipartiteGraph(ModelParams params, std::vector<BipartiteEdge> edges);

  const ModelParams& params() const { return params_; }
  std::uint64_t n1() const { return params_.n1; }
  std::uint64_t n2() const { return params_.n2; }

  /// Sorted by (u, v).
  std::span<const BipartiteEdge> edges() const { return edges_; }
  std::size_t num_edges() const { return edges_.size(); }

  std::span<const Column> row(Vertex u) const {
    return {row_nbrs_.data() + row_offsets_[u],
            row_nbrs_.data() + row_offsets_[u + 1]};
  }
  std::size_t row_degree(Vertex u) const {
    return row_offsets_[u + 1] - row_offsets_[u];
  }

  std::size_t num_active_columns() const { return col_ids_.size(); }
  Column active_column_id(std::size_t i) const { return col_ids_[i]; }
  std::span<const Vertex> active_column(std::size_t i) const {
    return {col_nbrs_.data() + col_offsets_[i],
            col_nbrs_.data() + col_offsets_[i + 1]};
  }

 private:
  ModelParams params_;
  std::vector<BipartiteEdge> edges_;
  std::vector<std::size_t> row_offsets_{0};
  std::vector<Column> row_nbrs_;
  std::vector<Column> col_ids_;
  std::vector<std::size_t> col_offsets_{0};
  std::vector<Vertex> col_nbrs_;
};

enum class Side { V1, V2 };

/// i.i.d. uniform +-1 labels. With balanced = true, exactly floor(n/2) entries
/// are +1 at uniformly random positions.
Labeling gen_labeling(std::uint64_t n, Seed seed, bool balanced = false);

/// Samples the bipartite block model. Each row u draws from its own stream
/// derive(seed, {u}), so rows are reproducible independently of each other.
/// Expected cost O(n1 n2 p + n1).
BipartiteGraph gen_bipartite_sbm(const ModelParams& params, const Labeling& sigma,
                                 const Labeling& tau, Seed seed);

/// Degrees of every vertex on one side. The V2 result has length n2, so
/// callers should avoid it for very large implicit V2.
std::vector<std::uint64_t> graph_degrees(const BipartiteGraph& g, Side side);

}  // namespace bisbm
