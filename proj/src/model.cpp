#include "bisbm/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "bisbm/error.hpp"

namespace bisbm {

void ModelParams::validate() const {
  if (n1 < 1 || n2 < 1) throw InvalidParameter("n1 and n2 must be >= 1");
  if (n1 > std::numeric_limits<Vertex>::max())
    throw InvalidParameter("n1 exceeds the 32-bit vertex index range");
  if (!(delta >= 0.0 && delta <= 2.0))
    throw InvalidParameter("delta must lie in [0, 2], got " + std::to_string(delta));
  if (!(p >= 0.0 && p <= 0.5))
    throw InvalidParameter("p must lie in [0, 1/2], got " + std::to_string(p));
  if (same_prob() > 1.0 || cross_prob() > 1.0)
    throw InvalidParameter("delta*p and (2-delta)*p must not exceed 1");
}

Labeling::Labeling(std::vector<std::int8_t> values) : values_(std::move(values)) {
  for (auto x : values_)
    if (x != 1 && x != -1) throw InvalidParameter("labels must be +1 or -1");
}

double Labeling::bias() const {
  if (values_.empty()) return 0.0;
  std::int64_t s = 0;
  for (auto x : values_) s += x;
  return static_cast<double>(s) / static_cast<double>(values_.size());
}

Labeling Labeling::flipped() const {
  Labeling out;
  out.values_.resize(values_.size());
  std::transform(values_.begin(), values_.end(), out.values_.begin(),
                 [](std::int8_t x) { return static_cast<std::int8_t>(-x); });
  return out;
}

BipartiteGraph::BipartiteGraph(ModelParams params, std::vector<BipartiteEdge> edges)
    : params_(params), edges_(std::move(edges)) {
  if (params_.n1 < 1 || params_.n2 < 1) throw InvalidParameter("n1 and n2 must be >= 1");
  std::sort(edges_.begin(), edges_.end());
  if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end())
    throw InvalidParameter("duplicate edge in bipartite graph");
  for (const auto& e : edges_)
    if (e.u >= params_.n1 || e.v >= params_.n2)
      throw InvalidParameter("edge endpoint out of range");

  row_offsets_.assign(params_.n1 + 1, 0);
  row_nbrs_.reserve(edges_.size());
  for (const auto& e : edges_) {
    ++row_offsets_[e.u + 1];
    row_nbrs_.push_back(e.v);
  }
  std::partial_sum(row_offsets_.begin(), row_offsets_.end(), row_offsets_.begin());

  std::vector<BipartiteEdge> by_col(edges_);
  std::sort(by_col.begin(), by_col.end(), [](const auto& a, const auto& b) {
    return a.v != b.v ? a.v < b.v : a.u < b.u;
  });
  col_nbrs_.reserve(by_col.size());
  for (const auto& e : by_col) {
    if (col_ids_.empty() || col_ids_.back() != e.v) {
      col_ids_.push_back(e.v);
      col_offsets_.push_back(col_offsets_.back());
    }
    col_nbrs_.push_back(e.u);
    ++col_offsets_.back();
  }
}

Labeling gen_labeling(std::uint64_t n, Seed seed, bool balanced) {
  if (n == 0) throw InvalidParameter("labeling length must be >= 1");
  Stream rng(seed);
  std::vector<std::int8_t> v(n);
  if (balanced) {
    std::fill(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(n / 2), 1);
    std::fill(v.begin() + static_cast<std::ptrdiff_t>(n / 2), v.end(), -1);
    for (std::uint64_t i = n - 1; i > 0; --i) std::swap(v[i], v[rng.below(i + 1)]);
  } else {
    std::uint64_t bits = 0;
    for (std::uint64_t i = 0; i < n; ++i) {
      if (i % 64 == 0) bits = rng();
      v[i] = (bits & 1) ? 1 : -1;
      bits >>= 1;
    }
  }
  return Labeling(std::move(v));
}

BipartiteGraph gen_bipartite_sbm(const ModelParams& params, const Labeling& sigma,
                                 const Labeling& tau, Seed seed) {
  params.validate();
  if (sigma.size() != params.n1 || tau.size() != params.n2)
    throw InvalidParameter("labeling lengths must equal n1 and n2");

  // Candidates are drawn at the larger of the two class rates by geometric
  // skipping, then thinned to the rate of the pair's class.
  const double same = params.same_prob();
  const double cross = params.cross_prob();
  const double top = std::max(same, cross);
  std::vector<BipartiteEdge> edges;
  edges.reserve(static_cast<std::size_t>(
      static_cast<double>(params.n1) * static_cast<double>(params.n2) * params.p * 1.1 + 16));
  if (top <= 0.0) return BipartiteGraph(params, std::move(edges));

  const double log_miss = std::log1p(-top);
  const double keep_same = same / top;
  const double keep_cross = cross / top;
  const auto n2 = params.n2;
  for (std::uint64_t u = 0; u < params.n1; ++u) {
    Stream rng(seed, u);
    const int su = sigma[u];
    std::uint64_t v = 0;
    while (true) {
      if (top < 1.0) {
        const double skip = std::floor(std::log(rng.uniform_pos()) / log_miss);
        if (skip >= static_cast<double>(n2 - v)) break;
        v += static_cast<std::uint64_t>(skip);
      }
      if (v >= n2) break;
      const double keep = (su == tau[v]) ? keep_same : keep_cross;
      if (keep >= 1.0 || rng.uniform() < keep)
        edges.push_back({static_cast<Vertex>(u), v});
      ++v;
    }
  }
  return BipartiteGraph(params, std::move(edges));
}

std::vector<std::uint64_t> graph_degrees(const BipartiteGraph& g, Side side) {
  if (side == Side::V1) {
    std::vector<std::uint64_t> d(g.n1());
    for (std::uint64_t u = 0; u < g.n1(); ++u) d[u] = g.row_degree(static_cast<Vertex>(u));
    return d;
  }
  std::vector<std::uint64_t> d(g.n2(), 0);
  for (std::size_t i = 0; i < g.num_active_columns(); ++i)
    d[g.active_column_id(i)] = g.active_column(i).size();
  return d;
}

}  // namespace bisbm
