#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "dsgt/digraph.hpp"
#include "dsgt/flows.hpp"

namespace dsgt {

/// Per-step contraction and scaling constants of the Lyapunov analysis.
struct StepConstants {
  double chi = 1.0;      // sqrt(1/min(pi_k))
  double chi_next = 1.0; // sqrt(1/min(pi_{k+1}))
  double varphi = 1.0;   // sqrt(1/min(phi_k))
  double varphi_next = 1.0;
  double gamma = 1.0;    // sqrt(max_i phi_{k+1,i} * pi_{k,i})
  double psi = 0.0;      // n (chi_{k+1}^2 - 1)
  double tau = 0.0;      // column-stochastic contraction factor
  double c = 0.0;        // row-stochastic contraction factor
  double nu = 0.0;       // 6 L^2 chi_{k+1}^2 tau^2/(1-tau^2) + 3 psi L^2
  double zeta = 0.0;     // (c_bar varphi_{k+1} + varphi_k)^2 nu
};

struct GlobalConstants {
  double c = 0.0;    // max_k c_k (strictly < 1)
  double tau = 0.0;  // max_k tau_k (strictly < 1)
  double eta = 1.0;  // min_k phi_{k+1}' pi_k
  double psi = 0.0;
  double chi = 1.0;
  double varphi = 1.0;
  double nu = 0.0;
  double varsigma_sq = 0.0;
  double L = 1.0;
  double mu = 1.0;
  int n = 1;
  double sigma = 0.0;
};

/// 4x4 nonnegative system V_{k+1} <= M V_k + b.
struct CompositeSystem {
  Eigen::Matrix4d M;
  Eigen::Vector4d b;
  double m1, m2, m3, m4, m5, m7, m8, m9, m10, m11;
  double b1, b2, b3, b4, b5, b6;
};

/// Contraction factors tau_k and c_k alone (needed before the horizon maxima
/// exist).
std::pair<double, double> step_contraction(const StochasticFlow& phi,
                                           const StochasticFlow& pi,
                                           const GraphStats& stats_k, double a,
                                           double b, int k);

/// Full per-step constants; tau_bar and c_bar are the horizon bounds entering
/// nu_k and zeta_k. Throws if a contraction radicand leaves [0,1).
StepConstants step_constants(const StochasticFlow& phi,
                             const StochasticFlow& pi,
                             const GraphStats& stats_k, double a, double b,
                             double L, int k, double tau_bar, double c_bar);

/// Horizon maxima/minima plus the derived nu and varsigma^2.
GlobalConstants global_constants(const std::vector<StepConstants>& steps,
                                 const StochasticFlow& phi,
                                 const StochasticFlow& pi, double L, double mu,
                                 int n, double sigma);

/// Convenience: stats + contractions + constants for a whole realized
/// sequence (steps 0..horizon-1).
GlobalConstants sequence_constants(const DigraphSeq& seq,
                                   const std::vector<MixingPair>& pairs,
                                   const StochasticFlow& phi,
                                   const StochasticFlow& pi, double L,
                                   double mu, double sigma);

/// The upper-bound system of the composite relation at (alpha_bar, beta_bar).
/// Requires 0 < alpha_bar < 2/(n eta (L+mu)).
CompositeSystem composite_system(const GlobalConstants& g, double alpha_bar,
                                 double beta_bar);

struct SpectralResult {
  double rho = 0.0;
  Eigen::VectorXd certificate;  // positive delta with M delta < rho' delta
  double rho_certified = 0.0;
};

/// Spectral radius of a square matrix (largest eigenvalue modulus). When
/// with_certificate, also returns delta > 0 with M delta < rho' delta for
/// rho' slightly above the estimate (valid for nonnegative M).
SpectralResult spectral_radius(const Eigen::MatrixXd& M,
                               bool with_certificate = false);

struct Theorem1Bounds {
  double alpha_max = 0.0;
  GlobalConstants g;

  /// Largest admissible beta_bar for a given alpha_bar < alpha_max.
  double beta_max(double alpha_bar) const;
  /// 1 if the alpha-scaled radical binds, 2 if the absolute radical binds.
  int binding_term(double alpha_bar) const;
};

Theorem1Bounds theorem1_bounds(const GlobalConstants& g);

}  // namespace dsgt
