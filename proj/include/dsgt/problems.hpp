#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace dsgt {

/// Rows of `features` are samples; labels in {+1,-1}. For quadratic problems
/// the rows act as the centers c_j of the local costs 0.5*||x - c_j||^2.
struct Dataset {
  Eigen::MatrixXd features;  // m x p
  Eigen::VectorXd labels;    // m, values +1/-1
  std::vector<int> train_idx;
  std::vector<int> test_idx;

  int num_samples() const { return static_cast<int>(features.rows()); }
  int dim() const { return static_cast<int>(features.cols()); }
};

enum class ProblemKind { LogisticL2, Quadratic };

struct ProblemSpec {
  ProblemKind kind = ProblemKind::LogisticL2;
  double lambda = 0.0;  // L2 regularization (logistic)
  std::shared_ptr<const Dataset> data;
  std::vector<std::vector<int>> partitions;  // per-agent train indices
  double L = 0.0;   // filled by estimate_L_mu
  double mu = 0.0;

  int num_agents() const { return static_cast<int>(partitions.size()); }
  /// Model dimension: p+1 (bias first) for logistic, p for quadratic.
  int model_dim() const;
};

enum class OracleMode { Exact, Minibatch, ExactPlusNoise };

struct OracleConfig {
  OracleMode mode = OracleMode::Exact;
  int batch_size = 1;
  double sigma = 0.0;  // total noise std (ExactPlusNoise)
};

/// Loss and gradient over the given sample rows. Logistic model is
/// x = [x0; x1:] with bias x0: mean ln(1+exp(-(x1:'b + x0) l)) + (lambda/2)|x|^2.
/// Quadratic: mean of 0.5*||x - c_j||^2 over the batch rows.
std::pair<double, Eigen::VectorXd> loss_and_grad(
    const Eigen::VectorXd& x, const std::vector<int>& batch,
    const ProblemSpec& spec);

/// Full local gradient of agent's cost (mean over its partition).
Eigen::VectorXd local_gradient(int agent, const Eigen::VectorXd& x,
                               const ProblemSpec& spec);
double local_loss(int agent, const Eigen::VectorXd& x, const ProblemSpec& spec);

/// Stochastic first-order oracle. Deterministic given (seed, agent, iter).
Eigen::VectorXd sample_gradient(int agent, const Eigen::VectorXd& x,
                                const OracleConfig& cfg,
                                const ProblemSpec& spec, std::uint64_t seed,
                                std::uint64_t iteration);

enum class PartitionScheme { Iid, LabelSorted };

/// Disjoint cover of the train indices across n agents.
std::vector<std::vector<int>> partition(const Dataset& ds, int n,
                                        PartitionScheme scheme,
                                        std::uint64_t seed);

/// Centralized minimizer of f = (1/n) sum f_i, to gradient norm <= tol.
/// Damped Newton for logistic; closed-form for quadratic.
std::pair<Eigen::VectorXd, double> solve_reference(const ProblemSpec& spec,
                                                   double tol = 1e-12,
                                                   int max_iter = 200);

/// (L, mu): logistic mu = lambda, L = lambda + lam_max((1/4m) sum bb') by
/// power iteration; quadratic (1, 1).
std::pair<double, double> estimate_L_mu(const ProblemSpec& spec);

// --- dataset constructors / loaders ---

/// Two spherical Gaussians at +-mean_shift*u (u a fixed unit direction),
/// labels +1/-1. Deterministic given seed.
Dataset make_synthetic_gauss(int dim, int m_train, int m_test,
                             double mean_shift, std::uint64_t seed);

/// Quadratic-center dataset: rows drawn from two clusters at +-separation/2
/// along a random direction; labels mark the cluster.
Dataset make_quadratic_centers(int dim, int m, double separation,
                               std::uint64_t seed);

/// CSV rows "label,f1,...,fp"; first m_train rows train, rest test.
Dataset load_csv(const std::string& path, int m_train);

/// MNIST IDX pair restricted to two digits mapped to +1/-1.
Dataset load_mnist_idx(const std::string& images_path,
                       const std::string& labels_path, int digit_pos,
                       int digit_neg, int m_train, int m_test);

}  // namespace dsgt
