#include <limits>
#include <sstream>

#include "bisbm/error.hpp"
#include "bisbm/io.hpp"
#include "doctest.h"
#include "oracle.hpp"

using namespace bisbm;

TEST_CASE("format_double round-trips") {
  for (double x : {0.0, 1.0, -2.5, 0.1, 1e-300, 3.0e-5 / 7.0, std::numeric_limits<double>::max()}) {
    const std::string s = format_double(x);
    CHECK(std::stod(s) == x);
  }
}

TEST_CASE("graph text round-trip is bit exact") {
  const auto g = oracle::random_graph(30, 400, 0.07, 9, 0.3);
  std::stringstream a;
  write_graph(a, g);
  const std::string text = a.str();
  const auto back = read_graph(a);
  CHECK(back.params() == g.params());
  CHECK(std::equal(back.edges().begin(), back.edges().end(), g.edges().begin(), g.edges().end()));
  std::stringstream b;
  write_graph(b, back);
  CHECK(b.str() == text);
  CHECK(text.rfind("bisbm 30 400 ", 0) == 0);
}

TEST_CASE("readers skip comments and reject garbage") {
  std::stringstream ok("# manifest abc\nbisbm 2 3 0.1 1\n\n0 2\n1 0\n");
  CHECK(read_graph(ok).num_edges() == 2);
  std::stringstream bad_head("bipartite 2 3 0.1 1\n");
  CHECK_THROWS_AS(read_graph(bad_head), InvalidParameter);
  std::stringstream bad_edge("bisbm 2 3 0.1 1\n0 7\n");
  CHECK_THROWS_AS(read_graph(bad_edge), InvalidParameter);
  std::stringstream bad_label("+1\n0\n");
  CHECK_THROWS_AS(read_labeling(bad_label), InvalidParameter);
}

TEST_CASE("labeling, planting and hypergraph round-trips") {
  const auto l = gen_labeling(17, Seed{4});
  std::stringstream ls;
  write_labeling(ls, l);
  CHECK(read_labeling(ls) == l);

  const auto q = PlantingFunction::parity(3, 0.7);
  std::stringstream qs;
  write_planting(qs, q);
  const auto q2 = read_planting(qs);
  CHECK(q2.k() == 3);
  CHECK(q2.table() == q.table());

  auto h = gen_goldreich(20, 3, {1, 0, 0, 1, 0, 1, 1, 0}, 25, Seed{2});
  std::stringstream hs;
  write_hypergraph(hs, h);
  const auto h2 = read_hypergraph(hs);
  CHECK(h2.n == h.n);
  CHECK(h2.k == 3);
  CHECK(h2.hyperedges == h.hyperedges);
  CHECK(h2.labels == h.labels);
}
