#pragma once

#include <Eigen/Dense>
#include <vector>

#include "dsgt/mixing.hpp"

namespace dsgt {

enum class FlowKind { Phi, Pi };

/// One stochastic vector per step. For Pi the recursion pi_{k+1} = B_k pi_k
/// is exact; for Phi the recursion phi_{k+1}^T A_k = phi_k^T holds up to
/// approx_tol (residuals reported per step).
struct StochasticFlow {
  std::vector<Eigen::VectorXd> vectors;
  FlowKind kind = FlowKind::Pi;
  double approx_tol = 0.0;
  std::vector<double> residuals;  // per-step recursion residual (inf-norm)

  int n() const { return vectors.empty() ? 0 : static_cast<int>(vectors[0].size()); }
  int steps() const { return static_cast<int>(vectors.size()); }
  double min_entry() const;
};

/// Forward products pi_0 = (1/n)1, pi_{k+1} = B_k pi_k. Returns steps()
/// == Bs.size() + 1 vectors.
StochasticFlow pi_sequence(const std::vector<Eigen::MatrixXd>& Bs);

/// Absolute probability sequence for {A_k}, approximated backward: the value
/// at the horizon end is obtained by left-multiplying the uniform vector with
/// repeats of the final matrix until successive approximations differ by less
/// than tol (at most tail_extension repeats), then the recursion
/// phi_k^T = phi_{k+1}^T A_k is applied downward. Returns As.size() + 1
/// vectors.
StochasticFlow phi_sequence(const std::vector<Eigen::MatrixXd>& As,
                            int tail_extension = 100000, double tol = 1e-10);

/// Lower bounds (a^n/n, b^n/n) for the phi- and pi-flow entries.
std::pair<double, double> flow_floor(double a, double b, int n);

/// Convenience extraction from a mixing sequence.
std::vector<Eigen::MatrixXd> a_matrices(const std::vector<MixingPair>& pairs);
std::vector<Eigen::MatrixXd> b_matrices(const std::vector<MixingPair>& pairs);

}  // namespace dsgt
