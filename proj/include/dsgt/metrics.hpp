#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>
#include <vector>

#include "dsgt/problems.hpp"

namespace dsgt {

/// The four error components driving the contraction analysis.
struct ErrorVector {
  double opt_gap = 0.0;     // ||x_hat - x*||^2
  double consensus = 0.0;   // ||x - x_hat||^2 weighted by phi_k
  double state_diff = 0.0;  // ||x_k - x_{k-1}||^2
  double tracking = 0.0;    // S^2(y_k, pi_k)

  Eigen::Vector4d as_vec() const {
    return {opt_gap, consensus, state_diff, tracking};
  }
};

struct RunRecord {
  std::vector<long> iters;
  std::vector<ErrorVector> errors;
  std::vector<double> loss;
  std::vector<double> accuracy;
  std::vector<double> sumgrad_residual;
  std::string config_echo;
  std::uint64_t seed = 0;
};

/// phi-weighted convex combination of stacked agent states (rows).
Eigen::VectorXd weighted_average(const std::vector<Eigen::VectorXd>& xs,
                                 const Eigen::VectorXd& phi);

ErrorVector error_vector(const std::vector<Eigen::VectorXd>& xs,
                         const std::vector<Eigen::VectorXd>& xs_prev,
                         const std::vector<Eigen::VectorXd>& ys,
                         const Eigen::VectorXd& phi_k,
                         const Eigen::VectorXd& pi_k,
                         const Eigen::VectorXd& x_star);

/// inf-norm of sum_i y_i - sum_i g_i (tracking identity residual).
double sumgrad_residual(const std::vector<Eigen::VectorXd>& ys,
                        const std::vector<Eigen::VectorXd>& gs);

/// (1/n) sum ||grad f_i(x*)||^2 — data-heterogeneity diagnostic.
double heterogeneity(const ProblemSpec& spec, const Eigen::VectorXd& x_star);

/// Fraction of test samples with sign(x1:'b + x0) == label; sign(0) = +1.
double accuracy(const Eigen::VectorXd& x, const Dataset& ds,
                const std::vector<int>& test_idx);

/// Fixed-order CSV: iter, opt_gap, consensus, state_diff, tracking, loss,
/// accuracy, sumgrad_residual.
void write_record_csv(std::ostream& os, const RunRecord& rec);

}  // namespace dsgt
