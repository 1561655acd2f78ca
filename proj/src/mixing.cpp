#include "dsgt/mixing.hpp"

#include <algorithm>
#include <limits>
#include <ostream>
#include <random>
#include <stdexcept>

#include "dsgt/rng.hpp"

namespace dsgt {

namespace {

double min_positive(const Eigen::MatrixXd& m) {
  double mp = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      if (m(i, j) > 0.0) mp = std::min(mp, m(i, j));
  return std::isfinite(mp) ? mp : 0.0;
}

bool is_symmetric_graph(const Digraph& g) {
  for (const auto& [from, to] : g.edges())
    if (!g.has_edge(to, from)) return false;
  return true;
}

}  // namespace

MixingPair build_mixing(const Digraph& g, const MixingRule& rule) {
  const int n = g.num_nodes();
  if (!g.has_all_self_loops())
    throw std::invalid_argument("build_mixing: graph must have all self-loops");

  MixingPair pair;
  pair.A = Eigen::MatrixXd::Zero(n, n);
  pair.B = Eigen::MatrixXd::Zero(n, n);

  switch (rule.kind) {
    case WeightRule::Uniform: {
      for (int i = 1; i <= n; ++i) {
        auto in = g.in_neighbors(i);
        const double w = 1.0 / (static_cast<double>(in.size()) + 1.0);
        pair.A(i - 1, i - 1) = w;
        for (int j : in) pair.A(i - 1, j - 1) = w;
        auto out = g.out_neighbors(i);
        const double v = 1.0 / (static_cast<double>(out.size()) + 1.0);
        pair.B(i - 1, i - 1) = v;
        for (int j : out) pair.B(j - 1, i - 1) = v;
      }
      break;
    }
    case WeightRule::RandomStochastic: {
      if (rule.floor <= 0.0 || rule.floor * n > 1.0)
        throw std::invalid_argument(
            "build_mixing: random-stochastic floor must be in (0, 1/n]");
      auto rng = substream(rule.seed, 0x6d6978ULL);
      std::uniform_real_distribution<double> u(0.0, 1.0);
      // Floored weights: floor + random mass renormalized over the support.
      for (int i = 1; i <= n; ++i) {
        auto in = g.in_neighbors(i);
        const int d = static_cast<int>(in.size()) + 1;
        Eigen::VectorXd raw(d);
        for (int t = 0; t < d; ++t) raw(t) = u(rng);
        raw *= (1.0 - rule.floor * d) / raw.sum();
        raw.array() += rule.floor;
        pair.A(i - 1, i - 1) = raw(0);
        for (size_t t = 0; t < in.size(); ++t)
          pair.A(i - 1, in[t] - 1) = raw(static_cast<int>(t) + 1);
      }
      for (int i = 1; i <= n; ++i) {
        auto out = g.out_neighbors(i);
        const int d = static_cast<int>(out.size()) + 1;
        Eigen::VectorXd raw(d);
        for (int t = 0; t < d; ++t) raw(t) = u(rng);
        raw *= (1.0 - rule.floor * d) / raw.sum();
        raw.array() += rule.floor;
        pair.B(i - 1, i - 1) = raw(0);
        for (size_t t = 0; t < out.size(); ++t)
          pair.B(out[t] - 1, i - 1) = raw(static_cast<int>(t) + 1);
      }
      break;
    }
    case WeightRule::Metropolis: {
      if (!is_symmetric_graph(g))
        throw std::invalid_argument(
            "build_mixing: metropolis rule needs a symmetric graph");
      Eigen::MatrixXd W = Eigen::MatrixXd::Zero(n, n);
      std::vector<int> deg(n + 1, 0);
      for (int i = 1; i <= n; ++i)
        deg[i] = static_cast<int>(g.in_neighbors(i).size());
      for (int i = 1; i <= n; ++i) {
        double offdiag = 0.0;
        for (int j : g.in_neighbors(i)) {
          const double w = 1.0 / (1.0 + std::max(deg[i], deg[j]));
          W(i - 1, j - 1) = w;
          offdiag += w;
        }
        W(i - 1, i - 1) = 1.0 - offdiag;
      }
      pair.A = W;
      pair.B = W;
      break;
    }
  }

  pair.a_floor = min_positive(pair.A);
  pair.b_floor = min_positive(pair.B);
  return pair;
}

MixingReport validate_mixing(const MixingPair& pair, const Digraph& g) {
  constexpr double kTol = 1e-12;
  MixingReport rep;
  const int n = g.num_nodes();
  if (pair.A.rows() != n || pair.A.cols() != n || pair.B.rows() != n ||
      pair.B.cols() != n) {
    rep.violations.push_back("dimension mismatch with graph");
    return rep;
  }
  for (int i = 0; i < n; ++i) {
    const double rs = pair.A.row(i).sum();
    if (std::abs(rs - 1.0) > kTol)
      rep.violations.push_back("A row " + std::to_string(i + 1) + " sums to " +
                               std::to_string(rs));
  }
  for (int j = 0; j < n; ++j) {
    const double cs = pair.B.col(j).sum();
    if (std::abs(cs - 1.0) > kTol)
      rep.violations.push_back("B column " + std::to_string(j + 1) +
                               " sums to " + std::to_string(cs));
  }
  for (int i = 1; i <= n; ++i) {
    for (int j = 1; j <= n; ++j) {
      const bool a_support = (i == j) || g.has_edge(j, i);
      const bool a_pos = pair.A(i - 1, j - 1) > 0.0;
      if (a_pos && !a_support)
        rep.violations.push_back("A(" + std::to_string(i) + "," +
                                 std::to_string(j) + ") positive off the graph, misaligned");
      if (!a_pos && a_support)
        rep.violations.push_back("A(" + std::to_string(i) + "," +
                                 std::to_string(j) + ") zero on support");
      const bool b_support = (i == j) || g.has_edge(j, i);
      const bool b_pos = pair.B(i - 1, j - 1) > 0.0;
      if (b_pos && !b_support)
        rep.violations.push_back("B(" + std::to_string(i) + "," +
                                 std::to_string(j) + ") positive off the graph, misaligned");
      if (!b_pos && b_support)
        rep.violations.push_back("B(" + std::to_string(i) + "," +
                                 std::to_string(j) + ") zero on support");
      if (a_pos && pair.A(i - 1, j - 1) < pair.a_floor - kTol)
        rep.violations.push_back("A(" + std::to_string(i) + "," +
                                 std::to_string(j) + ") below floor");
      if (b_pos && pair.B(i - 1, j - 1) < pair.b_floor - kTol)
        rep.violations.push_back("B(" + std::to_string(i) + "," +
                                 std::to_string(j) + ") below floor");
    }
  }
  return rep;
}

std::vector<MixingPair> build_mixing_sequence(const DigraphSeq& seq,
                                              const MixingRule& rule) {
  std::vector<MixingPair> pairs;
  pairs.reserve(seq.graphs.size());
  MixingRule step_rule = rule;
  for (size_t k = 0; k < seq.graphs.size(); ++k) {
    step_rule.seed = mix64(rule.seed + k);
    pairs.push_back(build_mixing(seq.graphs[k], step_rule));
  }
  return pairs;
}

std::pair<double, double> sequence_floors(
    const std::vector<MixingPair>& pairs) {
  double a = 1.0, b = 1.0;
  for (const auto& p : pairs) {
    a = std::min(a, p.a_floor);
    b = std::min(b, p.b_floor);
  }
  return {a, b};
}

void write_matrix_csv(std::ostream& os, const Eigen::MatrixXd& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) os << ',';
      os << m(i, j);
    }
    os << '\n';
  }
}

}  // namespace dsgt
