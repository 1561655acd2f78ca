#pragma once

#include <cstdint>
#include <iosfwd>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace dsgt {

/// Directed graph on nodes 1..n. An edge (j,i) means j sends to i.
class Digraph {
public:
  Digraph() = default;
  explicit Digraph(int n);

  int num_nodes() const { return n_; }
  int num_edges() const { return static_cast<int>(edges_.size()); }

  /// Adds j->i. Duplicate insertions are ignored.
  void add_edge(int from, int to);
  bool has_edge(int from, int to) const;
  void add_all_self_loops();
  bool has_all_self_loops() const;

  const std::set<std::pair<int, int>>& edges() const { return edges_; }

  /// In-neighbors of i excluding i itself, ascending.
  std::vector<int> in_neighbors(int i) const;
  /// Out-neighbors of i excluding i itself, ascending.
  std::vector<int> out_neighbors(int i) const;

private:
  void check_node(int v) const;

  int n_ = 0;
  std::set<std::pair<int, int>> edges_;  // (from, to)
};

struct GraphStats {
  int diameter = 0;        // max shortest directed path over ordered pairs
  long max_edge_utility = 0;  // max canonical-shortest-path load over non-loop edges
  bool strongly_connected = false;
};

enum class GraphMode { Static, PerStepRandom, CPeriodic };

struct GeneratorSpec {
  GraphMode mode = GraphMode::PerStepRandom;
  double density = 0.3;   // probability of each extra non-loop edge
  int c_period = 1;       // for CPeriodic
  bool symmetric = false; // mirror every edge (needed for doubly-stochastic W)
};

struct DigraphSeq {
  std::vector<Digraph> graphs;
  GeneratorSpec spec;
  std::uint64_t seed = 0;

  int n() const { return graphs.empty() ? 0 : graphs.front().num_nodes(); }
  int horizon() const { return static_cast<int>(graphs.size()); }
};

/// Realizes a graph sequence for the requested mode. Deterministic given seed.
/// Per-step and static modes plant a random Hamiltonian cycle plus self-loops,
/// so every graph is strongly connected by construction. C-periodic mode
/// spreads the cycle edges over c_period templates and repeats them, making
/// every window of c_period consecutive edge-set unions strongly connected.
DigraphSeq generate_sequence(int n, int horizon, const GeneratorSpec& spec,
                             std::uint64_t seed);

bool is_strongly_connected(const Digraph& g);

/// Diameter and maximal edge-utility. Self-loops are ignored for paths.
/// Edge utility counts, for each ordered pair, the one canonical shortest
/// path (lexicographically smallest node sequence) through each edge.
/// Throws if g is not strongly connected.
GraphStats graph_stats(const Digraph& g);

/// Union of edge sets over [start, start + C).
Digraph union_graph(const DigraphSeq& seq, int start, int C);

/// Line-oriented text format: "n horizon" header, then "k: j>i j>i ..." lines.
void write_sequence(std::ostream& os, const DigraphSeq& seq);
DigraphSeq read_sequence(std::istream& is);

}  // namespace dsgt
