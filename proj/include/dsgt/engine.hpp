#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "dsgt/flows.hpp"
#include "dsgt/metrics.hpp"
#include "dsgt/mixing.hpp"
#include "dsgt/problems.hpp"

namespace dsgt {

struct AgentState {
  Eigen::VectorXd x;
  Eigen::VectorXd x_prev;
  Eigen::VectorXd y;
  Eigen::VectorXd g_last;
  double alpha = 0.0;
  double beta = 0.0;
};

struct NetworkState {
  std::vector<AgentState> agents;
  long iteration = 0;

  int n() const { return static_cast<int>(agents.size()); }
};

enum class Algorithm { DsgtmTv, Dsgt, Dsgd };
enum class AlphaSchedule { Constant, OneOverK };

/// Initialization per the method: x_{-1} = x_0 (default zero), y_0 = g(x_0).
NetworkState init_network(const ProblemSpec& spec, const Eigen::VectorXd& alphas,
                          const Eigen::VectorXd& betas,
                          const OracleConfig& oracle, std::uint64_t seed,
                          const std::vector<Eigen::VectorXd>* x0 = nullptr);

/// One synchronous round of the momentum tracking method: all reads from the
/// k-snapshot, all writes to k+1.
void step_dsgtm_tv(NetworkState& state, const MixingPair& pair,
                   const OracleConfig& oracle, const ProblemSpec& spec,
                   std::uint64_t seed);

/// beta = 0 specialization with a doubly-stochastic static W (validated).
void step_dsgt(NetworkState& state, const Eigen::MatrixXd& W,
               const OracleConfig& oracle, const ProblemSpec& spec,
               std::uint64_t seed);

/// Plain decentralized (stochastic) gradient descent: no y-state.
void step_dsgd(NetworkState& state, const Eigen::MatrixXd& W,
               const OracleConfig& oracle, const ProblemSpec& spec,
               std::uint64_t seed, AlphaSchedule schedule);

void validate_doubly_stochastic(const Eigen::MatrixXd& W, double tol = 1e-9);

/// Everything a single run needs, prebuilt by the harness.
struct RunInputs {
  Algorithm algo = Algorithm::DsgtmTv;
  const std::vector<MixingPair>* pairs = nullptr;  // per step (DsgtmTv)
  const Eigen::MatrixXd* W = nullptr;              // static (Dsgt/Dsgd)
  const StochasticFlow* phi = nullptr;
  const StochasticFlow* pi = nullptr;
  const ProblemSpec* problem = nullptr;
  OracleConfig oracle;
  Eigen::VectorXd alphas;
  Eigen::VectorXd betas;
  AlphaSchedule schedule = AlphaSchedule::Constant;
  long horizon = 0;
  int cadence = 1;
  std::uint64_t seed = 0;
  Eigen::VectorXd x_star;
  const std::vector<Eigen::VectorXd>* x0 = nullptr;
  std::string config_echo;
};

/// Executes the configured algorithm, recording metrics every cadence steps
/// (including iteration 0). Deterministic given the seed.
RunRecord run(const RunInputs& in);

}  // namespace dsgt
