#include "dsgt/digraph.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <queue>
#include <random>
#include <sstream>
#include <stdexcept>

#include "dsgt/rng.hpp"

namespace dsgt {

Digraph::Digraph(int n) : n_(n) {
  if (n < 1) throw std::invalid_argument("Digraph: node count must be >= 1");
}

void Digraph::check_node(int v) const {
  if (v < 1 || v > n_) {
    throw std::out_of_range("Digraph: node id " + std::to_string(v) +
                            " outside [1," + std::to_string(n_) + "]");
  }
}

void Digraph::add_edge(int from, int to) {
  check_node(from);
  check_node(to);
  edges_.insert({from, to});
}

bool Digraph::has_edge(int from, int to) const {
  return edges_.count({from, to}) > 0;
}

void Digraph::add_all_self_loops() {
  for (int i = 1; i <= n_; ++i) edges_.insert({i, i});
}

bool Digraph::has_all_self_loops() const {
  for (int i = 1; i <= n_; ++i)
    if (!has_edge(i, i)) return false;
  return true;
}

std::vector<int> Digraph::in_neighbors(int i) const {
  check_node(i);
  std::vector<int> res;
  for (int j = 1; j <= n_; ++j)
    if (j != i && has_edge(j, i)) res.push_back(j);
  return res;
}

std::vector<int> Digraph::out_neighbors(int i) const {
  check_node(i);
  std::vector<int> res;
  for (int j = 1; j <= n_; ++j)
    if (j != i && has_edge(i, j)) res.push_back(j);
  return res;
}

namespace {

// BFS distances along directed edges, ignoring self-loops. -1 = unreachable.
std::vector<int> bfs_dist(const Digraph& g, int src, bool reverse) {
  const int n = g.num_nodes();
  std::vector<int> dist(n + 1, -1);
  std::queue<int> q;
  dist[src] = 0;
  q.push(src);
  while (!q.empty()) {
    int v = q.front();
    q.pop();
    for (int u = 1; u <= n; ++u) {
      if (u == v) continue;
      bool connected = reverse ? g.has_edge(u, v) : g.has_edge(v, u);
      if (connected && dist[u] < 0) {
        dist[u] = dist[v] + 1;
        q.push(u);
      }
    }
  }
  return dist;
}

Digraph random_cycle_graph(int n, double density, std::mt19937_64& rng) {
  Digraph g(n);
  g.add_all_self_loops();
  if (n == 1) return g;
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 1);
  std::shuffle(perm.begin(), perm.end(), rng);
  for (int i = 0; i < n; ++i) g.add_edge(perm[i], perm[(i + 1) % n]);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= n; ++j)
      if (i != j && coin(rng) < density) g.add_edge(i, j);
  return g;
}

Digraph mirrored(const Digraph& g) {
  Digraph s(g.num_nodes());
  for (const auto& [from, to] : g.edges()) {
    s.add_edge(from, to);
    s.add_edge(to, from);
  }
  return s;
}

}  // namespace

DigraphSeq generate_sequence(int n, int horizon, const GeneratorSpec& spec,
                             std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("generate_sequence: n must be >= 1");
  if (horizon < 1)
    throw std::invalid_argument("generate_sequence: horizon must be >= 1");

  DigraphSeq seq;
  seq.spec = spec;
  seq.seed = seed;
  auto rng = substream(seed, 0x6772617068ULL);  // "graph" stream

  switch (spec.mode) {
    case GraphMode::Static: {
      Digraph g = random_cycle_graph(n, spec.density, rng);
      if (spec.symmetric) g = mirrored(g);
      seq.graphs.assign(horizon, g);
      break;
    }
    case GraphMode::PerStepRandom: {
      for (int k = 0; k < horizon; ++k) {
        Digraph g = random_cycle_graph(n, spec.density, rng);
        if (spec.symmetric) g = mirrored(g);
        seq.graphs.push_back(std::move(g));
      }
      break;
    }
    case GraphMode::CPeriodic: {
      const int C = spec.c_period;
      if (C < 1 || C > horizon) {
        throw std::invalid_argument(
            "generate_sequence: c_period must be in [1, horizon]");
      }
      // Spread a Hamiltonian cycle's edges across C templates; each template
      // keeps all self-loops. The union over any C consecutive steps of the
      // periodic repetition contains the full cycle.
      std::vector<int> perm(n);
      std::iota(perm.begin(), perm.end(), 1);
      std::shuffle(perm.begin(), perm.end(), rng);
      std::vector<Digraph> templates;
      std::uniform_real_distribution<double> coin(0.0, 1.0);
      for (int t = 0; t < C; ++t) {
        Digraph g(n);
        g.add_all_self_loops();
        templates.push_back(std::move(g));
      }
      for (int i = 0; i < n && n > 1; ++i) {
        templates[i % C].add_edge(perm[i], perm[(i + 1) % n]);
      }
      for (auto& g : templates) {
        for (int i = 1; i <= n; ++i)
          for (int j = 1; j <= n; ++j)
            if (i != j && coin(rng) < spec.density / C) g.add_edge(i, j);
        if (spec.symmetric) g = mirrored(g);
      }
      for (int k = 0; k < horizon; ++k) seq.graphs.push_back(templates[k % C]);
      break;
    }
  }
  return seq;
}

bool is_strongly_connected(const Digraph& g) {
  const int n = g.num_nodes();
  if (n == 1) return true;
  auto fwd = bfs_dist(g, 1, /*reverse=*/false);
  auto bwd = bfs_dist(g, 1, /*reverse=*/true);
  for (int v = 1; v <= n; ++v)
    if (fwd[v] < 0 || bwd[v] < 0) return false;
  return true;
}

GraphStats graph_stats(const Digraph& g) {
  if (!is_strongly_connected(g))
    throw std::invalid_argument("graph_stats: graph is not strongly connected");
  const int n = g.num_nodes();
  GraphStats st;
  st.strongly_connected = true;
  if (n == 1) {
    st.diameter = 1;       // degenerate single node
    st.max_edge_utility = 1;
    return st;
  }

  std::vector<std::vector<int>> dist_from(n + 1), dist_to(n + 1);
  for (int v = 1; v <= n; ++v) {
    dist_from[v] = bfs_dist(g, v, false);
    dist_to[v] = bfs_dist(g, v, true);
  }

  std::map<std::pair<int, int>, long> load;
  int diameter = 0;
  for (int s = 1; s <= n; ++s) {
    for (int t = 1; t <= n; ++t) {
      if (s == t) continue;
      const int d = dist_from[s][t];
      diameter = std::max(diameter, d);
      // Canonical shortest path: greedy lexicographic choice among nodes on
      // some shortest s->t path.
      int v = s;
      while (v != t) {
        for (int u = 1; u <= n; ++u) {
          if (u == v || !g.has_edge(v, u)) continue;
          if (dist_from[s][u] == dist_from[s][v] + 1 &&
              dist_from[s][u] + dist_to[t][u] == d) {
            ++load[{v, u}];
            v = u;
            break;
          }
        }
      }
    }
  }
  long max_load = 0;
  for (const auto& [e, c] : load) max_load = std::max(max_load, c);
  st.diameter = diameter;
  st.max_edge_utility = max_load;
  return st;
}

Digraph union_graph(const DigraphSeq& seq, int start, int C) {
  if (start < 0 || C < 1 || start + C > seq.horizon())
    throw std::out_of_range("union_graph: window outside sequence");
  Digraph u(seq.n());
  for (int k = start; k < start + C; ++k)
    for (const auto& [from, to] : seq.graphs[k].edges()) u.add_edge(from, to);
  return u;
}

void write_sequence(std::ostream& os, const DigraphSeq& seq) {
  os << seq.n() << ' ' << seq.horizon() << '\n';
  for (int k = 0; k < seq.horizon(); ++k) {
    os << k << ':';
    for (const auto& [from, to] : seq.graphs[k].edges())
      os << ' ' << from << '>' << to;
    os << '\n';
  }
}

DigraphSeq read_sequence(std::istream& is) {
  int n = 0, horizon = 0;
  if (!(is >> n >> horizon))
    throw std::runtime_error("read_sequence: bad header");
  DigraphSeq seq;
  std::string line;
  std::getline(is, line);
  for (int k = 0; k < horizon; ++k) {
    if (!std::getline(is, line))
      throw std::runtime_error("read_sequence: truncated at step " +
                               std::to_string(k));
    std::istringstream ls(line);
    std::string tok;
    ls >> tok;  // "k:"
    Digraph g(n);
    while (ls >> tok) {
      auto pos = tok.find('>');
      if (pos == std::string::npos)
        throw std::runtime_error("read_sequence: bad edge token " + tok);
      g.add_edge(std::stoi(tok.substr(0, pos)), std::stoi(tok.substr(pos + 1)));
    }
    seq.graphs.push_back(std::move(g));
  }
  return seq;
}

}  // namespace dsgt
