#include "bisbm/planting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "bisbm/error.hpp"

namespace bisbm {

namespace {

void check_arity(int k) {
  if (k < 1 || k > PlantingFunction::kMaxArity)
    throw InvalidParameter("arity k must lie in [1, " +
                           std::to_string(PlantingFunction::kMaxArity) + "]");
}

// n^e, throwing when it would not fit comfortably in 63 bits.
std::uint64_t checked_power(std::uint64_t n, int e) {
  std::uint64_t out = 1;
  for (int i = 0; i < e; ++i) {
    if (n != 0 && out > (std::uint64_t{1} << 62) / n)
      throw InvalidParameter("tuple space n^k overflows 62 bits");
    out *= n;
  }
  return out;
}

SubsetMask point_of(const Labeling& sigma, const std::vector<Vertex>& e) {
  SubsetMask x = 0;
  for (std::size_t i = 0; i < e.size(); ++i)
    if (sigma[e[i]] < 0) x |= SubsetMask{1} << i;
  return x;
}

// Tuple index t in [0, n^k) in lexicographic order, first coordinate most
// significant.
std::vector<Vertex> tuple_of(std::uint64_t t, std::uint64_t n, int k) {
  std::vector<Vertex> e(k);
  for (int j = k - 1; j >= 0; --j) {
    e[j] = static_cast<Vertex>(t % n);
    t /= n;
  }
  return e;
}

std::vector<std::vector<Vertex>> sample_planted(const Labeling& sigma, const PlantingFunction& q,
                                                double p, Seed seed) {
  const int k = q.k();
  const std::uint64_t n = sigma.size();
  const double scale = std::ldexp(p, k);
  if (!(p >= 0.0) || q.max_mass() * scale > 1.0)
    throw InvalidParameter("need p >= 0 and max_x Q(x) 2^k p <= 1");
  const std::uint64_t total = checked_power(n, k);
  const double top = q.max_mass() * scale;
  std::vector<std::vector<Vertex>> out;
  if (top <= 0.0) return out;

  Stream rng(seed);
  const double log_miss = std::log1p(-top);
  std::uint64_t t = 0;
  while (true) {
    if (top < 1.0) {
      const double skip = std::floor(std::log(rng.uniform_pos()) / log_miss);
      if (skip >= static_cast<double>(total - t)) break;
      t += static_cast<std::uint64_t>(skip);
    }
    if (t >= total) break;
    auto e = tuple_of(t, n, k);
    const double keep = q(point_of(sigma, e)) * scale / top;
    if (keep >= 1.0 || rng.uniform() < keep) out.push_back(std::move(e));
    ++t;
  }
  return out;
}

}  // namespace

PlantingFunction::PlantingFunction(int k, std::vector<double> table)
    : k_(k), table_(std::move(table)) {
  check_arity(k);
  if (table_.size() != (std::size_t{1} << k))
    throw InvalidParameter("planting table must have 2^k entries");
  double sum = 0.0;
  for (double x : table_) {
    if (!(x >= 0.0)) throw InvalidParameter("planting masses must be >= 0");
    sum += x;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw InvalidParameter("planting masses must sum to 1");
}

PlantingFunction PlantingFunction::uniform(int k) {
  check_arity(k);
  return PlantingFunction(k, std::vector<double>(std::size_t{1} << k, std::ldexp(1.0, -k)));
}

PlantingFunction PlantingFunction::parity(int k, double delta) {
  check_arity(k);
  if (!(delta >= 0.0 && delta <= 2.0)) throw InvalidParameter("delta must lie in [0, 2]");
  const SubsetMask all = (SubsetMask{1} << k) - 1;
  std::vector<double> t(std::size_t{1} << k);
  for (SubsetMask x = 0; x < t.size(); ++x)
    t[x] = std::ldexp(1.0 + (delta - 1.0) * character(all, x), -k);
  return PlantingFunction(k, std::move(t));
}

PlantingFunction PlantingFunction::from_predicate(int k,
                                                  const std::vector<std::uint8_t>& predicate) {
  check_arity(k);
  if (predicate.size() != (std::size_t{1} << k))
    throw InvalidParameter("predicate must have 2^k entries");
  double ones = 0;
  for (auto b : predicate) ones += b ? 1 : 0;
  if (ones == 0) throw InvalidParameter("predicate is identically 0");
  std::vector<double> t(predicate.size());
  for (std::size_t x = 0; x < t.size(); ++x) t[x] = predicate[x] ? 1.0 / ones : 0.0;
  return PlantingFunction(k, std::move(t));
}

double PlantingFunction::max_mass() const {
  return *std::max_element(table_.begin(), table_.end());
}

FourierReport fourier(const PlantingFunction& q) {
  const int k = q.k();
  const SubsetMask count = SubsetMask{1} << k;
  FourierReport rep;
  rep.coefficients.assign(count, 0.0);
  for (SubsetMask s = 0; s < count; ++s) {
    double acc = 0.0;
    for (SubsetMask x = 0; x < count; ++x) acc += q(x) * character(s, x);
    rep.coefficients[s] = std::ldexp(acc, -k);
  }
  int best = k + 1;
  for (SubsetMask s = 1; s < count; ++s) {
    if (std::abs(rep.coefficients[s]) <= kFourierZero) continue;
    const int size = __builtin_popcount(s);
    if (size < best) {
      best = size;
      rep.argmin_sets.clear();
    }
    if (size == best) rep.argmin_sets.push_back(s);
  }
  if (best > k) throw NoSignal("distribution is uniform; no planted structure");
  rep.distribution_complexity = best;
  return rep;
}

double reduction_delta(const FourierReport& report, int k, SubsetMask s) {
  return 1.0 + std::ldexp(report[s], k);
}

PlantedHypergraph gen_planted_hypergraph(std::uint64_t n, const PlantingFunction& q, double p,
                                         Seed seed) {
  PlantedHypergraph h;
  h.n = n;
  h.k = q.k();
  h.sigma = gen_labeling(n, derive(seed, {0}));
  h.hyperedges = sample_planted(h.sigma, q, p, derive(seed, {1}));
  return h;
}

PlantedHypergraph gen_planted_sat(std::uint64_t num_vars, const PlantingFunction& q, double p,
                                  Seed seed) {
  const Labeling vars = gen_labeling(num_vars, derive(seed, {0}));
  std::vector<std::int8_t> lit(2 * num_vars);
  for (std::uint64_t i = 0; i < num_vars; ++i) {
    lit[2 * i] = static_cast<std::int8_t>(vars[i]);
    lit[2 * i + 1] = static_cast<std::int8_t>(-vars[i]);
  }
  PlantedHypergraph h;
  h.n = 2 * num_vars;
  h.k = q.k();
  h.sat_mode = true;
  h.sigma = Labeling(std::move(lit));
  h.hyperedges = sample_planted(h.sigma, q, p, derive(seed, {1}));
  return h;
}

PlantedHypergraph gen_goldreich(std::uint64_t n, int k,
                                const std::vector<std::uint8_t>& predicate, std::uint64_t m,
                                Seed seed) {
  check_arity(k);
  if (predicate.size() != (std::size_t{1} << k))
    throw InvalidParameter("predicate must have 2^k entries");
  PlantedHypergraph h;
  h.n = n;
  h.k = k;
  h.sigma = gen_labeling(n, derive(seed, {0}));
  Stream rng(derive(seed, {1}));
  h.hyperedges.reserve(m);
  h.labels.reserve(m);
  for (std::uint64_t i = 0; i < m; ++i) {
    std::vector<Vertex> e(k);
    for (auto& x : e) x = static_cast<Vertex>(rng.below(n));
    h.labels.push_back(predicate[point_of(h.sigma, e)] ? 1 : 0);
    h.hyperedges.push_back(std::move(e));
  }
  return h;
}

PlantedHypergraph filter_positive(const PlantedHypergraph& h) {
  PlantedHypergraph out;
  out.n = h.n;
  out.k = h.k;
  out.sat_mode = h.sat_mode;
  out.sigma = h.sigma;
  for (std::size_t i = 0; i < h.hyperedges.size(); ++i)
    if (h.labels.empty() || h.labels[i]) out.hyperedges.push_back(h.hyperedges[i]);
  return out;
}

std::vector<Vertex> ReducedInstance::decode(Column code) const {
  return tuple_of(code, n, tuple_len);
}

int ReducedInstance::column_label(Column code) const {
  int s = 1;
  for (Vertex x : decode(code)) s *= sigma[x];
  return s;
}

ReducedInstance reduce_to_bipartite(const PlantedHypergraph& h, SubsetMask s, Seed seed,
                                    std::optional<double> model_delta) {
  const int r = __builtin_popcount(s);
  if (r < 2)
    throw Unsupported("projection onto fewer than 2 coordinates has no bipartite structure");
  if (h.k < 1 || (s >> h.k) != 0) throw InvalidParameter("subset must lie inside [k]");

  std::vector<int> coords;
  for (int i = 0; i < h.k; ++i)
    if ((s >> i) & 1U) coords.push_back(i);

  ReducedInstance out;
  out.n = h.n;
  out.tuple_len = r - 1;
  out.sigma = h.sigma;
  const std::uint64_t n2 = checked_power(h.n, r - 1);

  Stream rng(seed);
  out.raw_edges.reserve(h.hyperedges.size());
  for (const auto& e : h.hyperedges) {
    const auto pick = static_cast<int>(rng.below(static_cast<std::uint64_t>(r)));
    Column code = 0;
    for (int j = 0; j < r; ++j)
      if (j != pick) code = code * h.n + e[coords[j]];
    out.raw_edges.push_back({e[coords[pick]], code});
  }

  std::vector<BipartiteEdge> unique(out.raw_edges);
  std::sort(unique.begin(), unique.end());
  unique.erase(std::unique(unique.begin(), unique.end()), unique.end());

  ModelParams mp;
  mp.n1 = h.n;
  mp.n2 = n2;
  mp.delta = model_delta.value_or(1.0);
  mp.p = std::min(0.5, static_cast<double>(out.raw_edges.size()) /
                           (static_cast<double>(h.n) * static_cast<double>(n2)));
  out.graph = BipartiteGraph(mp, std::move(unique));
  return out;
}

}  // namespace bisbm
