#include "bisbm/io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <system_error>

#include "bisbm/error.hpp"

namespace bisbm {

namespace {

double parse_double(const std::string& tok) {
  double x = 0.0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), x);
  if (ec != std::errc() || ptr != tok.data() + tok.size())
    throw InvalidParameter("malformed number '" + tok + "'");
  return x;
}

template <class Int>
Int parse_int(const std::string& tok) {
  Int x{};
  const char* first = tok.data();
  if (!tok.empty() && tok[0] == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, tok.data() + tok.size(), x);
  if (ec != std::errc() || ptr != tok.data() + tok.size())
    throw InvalidParameter("malformed integer '" + tok + "'");
  return x;
}

std::vector<std::string> tokens(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> out;
  for (std::string t; ss >> t;) out.push_back(t);
  return out;
}

// Next non-blank, non-comment line split into tokens; empty when the stream
// is exhausted.
std::vector<std::string> next_record(std::istream& is) {
  for (std::string line; std::getline(is, line);) {
    auto t = tokens(line);
    if (!t.empty() && t[0][0] != '#') return t;
  }
  return {};
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  return os;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open '" + path.string() + "'");
  return is;
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

void write_graph(std::ostream& os, const BipartiteGraph& g) {
  const auto& p = g.params();
  os << "bisbm " << p.n1 << ' ' << p.n2 << ' ' << format_double(p.p) << ' '
     << format_double(p.delta) << '\n';
  for (const auto& e : g.edges()) os << e.u << ' ' << e.v << '\n';
}

BipartiteGraph read_graph(std::istream& is) {
  const auto head = next_record(is);
  if (head.size() != 5 || head[0] != "bisbm") throw InvalidParameter("graph header must be 'bisbm n1 n2 p delta'");
  ModelParams p;
  p.n1 = parse_int<std::uint64_t>(head[1]);
  p.n2 = parse_int<std::uint64_t>(head[2]);
  p.p = parse_double(head[3]);
  p.delta = parse_double(head[4]);
  p.validate();
  std::vector<BipartiteEdge> edges;
  for (auto rec = next_record(is); !rec.empty(); rec = next_record(is)) {
    if (rec.size() != 2) throw InvalidParameter("edge lines must be 'u v'");
    edges.push_back({parse_int<Vertex>(rec[0]), parse_int<Column>(rec[1])});
  }
  return BipartiteGraph(p, std::move(edges));
}

void write_labeling(std::ostream& os, const Labeling& l) {
  for (auto x : l.values()) os << (x > 0 ? "+1\n" : "-1\n");
}

Labeling read_labeling(std::istream& is) {
  std::vector<std::int8_t> v;
  for (auto rec = next_record(is); !rec.empty(); rec = next_record(is)) {
    if (rec.size() != 1) throw InvalidParameter("labeling lines hold a single +1 or -1");
    v.push_back(static_cast<std::int8_t>(parse_int<int>(rec[0])));
  }
  return Labeling(std::move(v));
}

void write_planting(std::ostream& os, const PlantingFunction& q) {
  os << q.k() << '\n';
  for (SubsetMask x = 0; x < q.size(); ++x) {
    for (int i = 0; i < q.k(); ++i) os << (sign_at(x, i) > 0 ? "+1 " : "-1 ");
    os << format_double(q(x)) << '\n';
  }
}

PlantingFunction read_planting(std::istream& is) {
  const auto head = next_record(is);
  if (head.size() != 1) throw InvalidParameter("planting header must be 'k'");
  const int k = parse_int<int>(head[0]);
  if (k < 1 || k > PlantingFunction::kMaxArity) throw InvalidParameter("arity out of range");
  std::vector<double> table(std::size_t{1} << k, 0.0);
  std::vector<bool> seen(table.size(), false);
  for (std::size_t row = 0; row < table.size(); ++row) {
    const auto rec = next_record(is);
    if (rec.size() != static_cast<std::size_t>(k) + 1)
      throw InvalidParameter("planting rows must be 'x_1 ... x_k mass'");
    SubsetMask x = 0;
    for (int i = 0; i < k; ++i) {
      const int s = parse_int<int>(rec[i]);
      if (s != 1 && s != -1) throw InvalidParameter("planting coordinates must be +1 or -1");
      if (s < 0) x |= SubsetMask{1} << i;
    }
    if (seen[x]) throw InvalidParameter("planting point listed twice");
    seen[x] = true;
    table[x] = parse_double(rec[k]);
  }
  return PlantingFunction(k, std::move(table));
}

void write_hypergraph(std::ostream& os, const PlantedHypergraph& h) {
  os << "phyp " << h.n << ' ' << h.k << '\n';
  for (std::size_t i = 0; i < h.hyperedges.size(); ++i) {
    const auto& e = h.hyperedges[i];
    for (std::size_t j = 0; j < e.size(); ++j) os << (j ? " " : "") << e[j];
    if (!h.labels.empty()) os << ' ' << static_cast<int>(h.labels[i]);
    os << '\n';
  }
}

PlantedHypergraph read_hypergraph(std::istream& is) {
  const auto head = next_record(is);
  if (head.size() != 3 || head[0] != "phyp") throw InvalidParameter("hypergraph header must be 'phyp n k'");
  PlantedHypergraph h;
  h.n = parse_int<std::uint64_t>(head[1]);
  h.k = parse_int<int>(head[2]);
  if (h.k < 1) throw InvalidParameter("arity must be >= 1");
  bool labelled = false, first = true;
  for (auto rec = next_record(is); !rec.empty(); rec = next_record(is)) {
    const bool has_label = rec.size() == static_cast<std::size_t>(h.k) + 1;
    if (!has_label && rec.size() != static_cast<std::size_t>(h.k))
      throw InvalidParameter("hyperedge lines hold k vertices and an optional label");
    if (first) labelled = has_label;
    if (has_label != labelled) throw InvalidParameter("labels must be present on all lines or none");
    first = false;
    std::vector<Vertex> e(h.k);
    for (int j = 0; j < h.k; ++j) {
      e[j] = parse_int<Vertex>(rec[j]);
      if (e[j] >= h.n) throw InvalidParameter("hyperedge vertex out of range");
    }
    h.hyperedges.push_back(std::move(e));
    if (labelled) {
      const int lab = parse_int<int>(rec[h.k]);
      if (lab != 0 && lab != 1) throw InvalidParameter("hyperedge labels must be 0 or 1");
      h.labels.push_back(static_cast<std::uint8_t>(lab));
    }
  }
  return h;
}

void save_graph(const std::filesystem::path& path, const BipartiteGraph& g) {
  auto os = open_out(path);
  write_graph(os, g);
}

BipartiteGraph load_graph(const std::filesystem::path& path) {
  auto is = open_in(path);
  return read_graph(is);
}

void save_labeling(const std::filesystem::path& path, const Labeling& l) {
  auto os = open_out(path);
  write_labeling(os, l);
}

Labeling load_labeling(const std::filesystem::path& path) {
  auto is = open_in(path);
  return read_labeling(is);
}

}  // namespace bisbm
