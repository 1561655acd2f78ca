#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "dsgt/digraph.hpp"

namespace dsgt {

/// Row-stochastic A (pull states) and column-stochastic B (push directions)
/// aligned with one graph. a_floor/b_floor are the realized smallest positive
/// entries.
struct MixingPair {
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
  double a_floor = 0.0;
  double b_floor = 0.0;
};

enum class WeightRule {
  Uniform,           // 1/(deg+1) over neighborhood incl. self
  RandomStochastic,  // random positive weights renormalized, floored
  Metropolis,        // doubly stochastic; requires a symmetric graph
};

struct MixingRule {
  WeightRule kind = WeightRule::Uniform;
  double floor = 0.05;        // RandomStochastic only
  std::uint64_t seed = 0;     // RandomStochastic only
};

MixingPair build_mixing(const Digraph& g, const MixingRule& rule);

struct MixingReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

/// Checks row/column sums, graph alignment of the sparsity patterns, and
/// positive-entry floors. Violations are reported with indices, not thrown.
MixingReport validate_mixing(const MixingPair& pair, const Digraph& g);

/// Per-step mixing for a whole sequence.
std::vector<MixingPair> build_mixing_sequence(const DigraphSeq& seq,
                                              const MixingRule& rule);

/// Smallest positive entry over the horizon, for each of A and B.
std::pair<double, double> sequence_floors(const std::vector<MixingPair>& pairs);

void write_matrix_csv(std::ostream& os, const Eigen::MatrixXd& m);

}  // namespace dsgt
