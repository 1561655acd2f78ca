#include <doctest.h>

#include <sstream>

#include "dsgt/digraph.hpp"

using namespace dsgt;

namespace {

Digraph three_cycle() {
  Digraph g(3);
  g.add_edge(1, 2);
  g.add_edge(2, 3);
  g.add_edge(3, 1);
  g.add_all_self_loops();
  return g;
}

// Independent reachability oracle: boolean transitive closure.
bool closure_strongly_connected(const Digraph& g) {
  const int n = g.num_nodes();
  std::vector<std::vector<bool>> r(n + 1, std::vector<bool>(n + 1, false));
  for (int i = 1; i <= n; ++i) r[i][i] = true;
  for (auto [u, v] : g.edges()) r[u][v] = true;
  for (int m = 1; m <= n; ++m)
    for (int i = 1; i <= n; ++i)
      for (int j = 1; j <= n; ++j)
        if (r[i][m] && r[m][j]) r[i][j] = true;
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= n; ++j)
      if (!r[i][j]) return false;
  return true;
}

}  // namespace

TEST_CASE("strong connectivity basics") {
  CHECK(is_strongly_connected(three_cycle()));
  Digraph g(2);
  g.add_edge(1, 2);
  g.add_all_self_loops();
  CHECK_FALSE(is_strongly_connected(g));
}

TEST_CASE("strong connectivity matches closure oracle on random graphs") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto seq = generate_sequence(10, 5, {GraphMode::PerStepRandom, 0.2}, seed);
    for (const auto& g : seq.graphs)
      CHECK(is_strongly_connected(g) == closure_strongly_connected(g));
  }
  // non-connected graphs too
  Digraph g(4);
  g.add_edge(1, 2);
  g.add_edge(2, 1);
  g.add_edge(3, 4);
  g.add_edge(4, 3);
  g.add_all_self_loops();
  CHECK(is_strongly_connected(g) == closure_strongly_connected(g));
  CHECK_FALSE(is_strongly_connected(g));
}

TEST_CASE("graph stats on the 3-cycle") {
  const GraphStats s = graph_stats(three_cycle());
  CHECK(s.strongly_connected);
  CHECK(s.diameter == 2);
  // six ordered pairs, each edge lies on three canonical shortest paths
  CHECK(s.max_edge_utility == 3);
}

TEST_CASE("graph stats on the complete digraph") {
  Digraph g(4);
  for (int i = 1; i <= 4; ++i)
    for (int j = 1; j <= 4; ++j) g.add_edge(i, j);
  const GraphStats s = graph_stats(g);
  CHECK(s.diameter == 1);
  CHECK(s.max_edge_utility == 1);
}

TEST_CASE("graph stats rejects disconnected input") {
  Digraph g(2);
  g.add_edge(1, 2);
  g.add_all_self_loops();
  CHECK_THROWS(graph_stats(g));
}

TEST_CASE("static generation of a strongly connected graph") {
  auto seq = generate_sequence(3, 1, {GraphMode::Static}, 0);
  REQUIRE(seq.horizon() == 1);
  CHECK(is_strongly_connected(seq.graphs[0]));
  CHECK(seq.graphs[0].has_all_self_loops());
}

TEST_CASE("single-node sequences are self-loops only") {
  for (auto mode :
       {GraphMode::Static, GraphMode::PerStepRandom, GraphMode::CPeriodic}) {
    auto seq = generate_sequence(1, 5, {mode, 0.5, 1}, 3);
    REQUIRE(seq.horizon() == 5);
    for (const auto& g : seq.graphs) {
      CHECK(g.num_nodes() == 1);
      CHECK(g.num_edges() == 1);
      CHECK(g.has_edge(1, 1));
    }
  }
}

TEST_CASE("per-step-random graphs are compliant at every step") {
  auto seq = generate_sequence(10, 100, {GraphMode::PerStepRandom, 0.3}, 7);
  REQUIRE(seq.horizon() == 100);
  for (const auto& g : seq.graphs) {
    CHECK(g.has_all_self_loops());
    CHECK(closure_strongly_connected(g));
    const GraphStats s = graph_stats(g);
    CHECK(s.diameter >= 1);
    CHECK(s.diameter <= 9);
    CHECK(s.max_edge_utility >= 1);
  }
}

TEST_CASE("same seed regenerates the identical sequence") {
  auto s1 = generate_sequence(8, 20, {GraphMode::PerStepRandom, 0.4}, 99);
  auto s2 = generate_sequence(8, 20, {GraphMode::PerStepRandom, 0.4}, 99);
  for (int k = 0; k < 20; ++k)
    CHECK(s1.graphs[k].edges() == s2.graphs[k].edges());
  auto s3 = generate_sequence(8, 20, {GraphMode::PerStepRandom, 0.4}, 100);
  bool all_equal = true;
  for (int k = 0; k < 20; ++k)
    all_equal = all_equal && (s1.graphs[k].edges() == s3.graphs[k].edges());
  CHECK_FALSE(all_equal);
}

TEST_CASE("union graph") {
  auto seq = generate_sequence(6, 10, {GraphMode::PerStepRandom, 0.2}, 5);
  CHECK(union_graph(seq, 3, 1).edges() == seq.graphs[3].edges());
  CHECK_THROWS(union_graph(seq, 9, 2));

  DigraphSeq two;
  Digraph a(2), b(2);
  a.add_edge(1, 2);
  a.add_all_self_loops();
  b.add_edge(2, 1);
  b.add_all_self_loops();
  two.graphs = {a, b};
  CHECK_FALSE(is_strongly_connected(a));
  CHECK(is_strongly_connected(union_graph(two, 0, 2)));
}

TEST_CASE("c-periodic windows are strongly connected") {
  GeneratorSpec spec{GraphMode::CPeriodic, 0.1, 3};
  auto seq = generate_sequence(9, 30, spec, 11);
  for (int k = 0; k + 3 <= seq.horizon(); ++k)
    CHECK(closure_strongly_connected(union_graph(seq, k, 3)));
}

TEST_CASE("c-periodic rejects periods longer than the horizon") {
  CHECK_THROWS(generate_sequence(5, 2, {GraphMode::CPeriodic, 0.1, 4}, 0));
}

TEST_CASE("symmetric generation mirrors every edge") {
  GeneratorSpec spec{GraphMode::Static, 0.3, 1, true};
  auto seq = generate_sequence(7, 1, spec, 2);
  for (auto [u, v] : seq.graphs[0].edges())
    CHECK(seq.graphs[0].has_edge(v, u));
}

TEST_CASE("text serialization round-trips") {
  auto seq = generate_sequence(6, 12, {GraphMode::PerStepRandom, 0.3}, 42);
  std::stringstream ss;
  write_sequence(ss, seq);
  DigraphSeq back = read_sequence(ss);
  REQUIRE(back.n() == 6);
  REQUIRE(back.horizon() == 12);
  for (int k = 0; k < 12; ++k)
    CHECK(back.graphs[k].edges() == seq.graphs[k].edges());
}
