#include "dsgt/engine.hpp"

#include <stdexcept>

namespace dsgt {

NetworkState init_network(const ProblemSpec& spec,
                          const Eigen::VectorXd& alphas,
                          const Eigen::VectorXd& betas,
                          const OracleConfig& oracle, std::uint64_t seed,
                          const std::vector<Eigen::VectorXd>* x0) {
  const int n = spec.num_agents();
  if (alphas.size() != n || betas.size() != n)
    throw std::invalid_argument("init_network: alpha/beta size mismatch");
  if (alphas.minCoeff() < 0.0 || betas.minCoeff() < 0.0)
    throw std::invalid_argument("init_network: negative alpha or beta");
  if (alphas.maxCoeff() <= 0.0)
    throw std::invalid_argument("init_network: at least one stepsize positive");
  NetworkState st;
  st.iteration = 0;
  st.agents.resize(n);
  const int d = spec.model_dim();
  for (int i = 0; i < n; ++i) {
    auto& ag = st.agents[i];
    ag.x = x0 ? (*x0)[i] : Eigen::VectorXd::Zero(d);
    ag.x_prev = ag.x;  // zero initial momentum
    ag.g_last = sample_gradient(i, ag.x, oracle, spec, seed, 0);
    ag.y = ag.g_last;
    ag.alpha = alphas(i);
    ag.beta = betas(i);
  }
  return st;
}

void step_dsgtm_tv(NetworkState& state, const MixingPair& pair,
                   const OracleConfig& oracle, const ProblemSpec& spec,
                   std::uint64_t seed) {
  const int n = state.n();
  if (pair.A.rows() != n)
    throw std::invalid_argument("step_dsgtm_tv: mixing dimension mismatch");
  const long k = state.iteration;

  std::vector<Eigen::VectorXd> x_next(n), y_next(n), g_next(n);
  for (int i = 0; i < n; ++i) {
    const auto& ag = state.agents[i];
    Eigen::VectorXd pulled = Eigen::VectorXd::Zero(ag.x.size());
    for (int j = 0; j < n; ++j)
      if (pair.A(i, j) != 0.0) pulled += pair.A(i, j) * state.agents[j].x;
    x_next[i] = pulled - ag.alpha * ag.y + ag.beta * (ag.x - ag.x_prev);
  }
  for (int i = 0; i < n; ++i)
    g_next[i] = sample_gradient(i, x_next[i], oracle, spec, seed, k + 1);
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd pushed = Eigen::VectorXd::Zero(x_next[i].size());
    for (int j = 0; j < n; ++j)
      if (pair.B(i, j) != 0.0) pushed += pair.B(i, j) * state.agents[j].y;
    y_next[i] = pushed + g_next[i] - state.agents[i].g_last;
  }
  for (int i = 0; i < n; ++i) {
    auto& ag = state.agents[i];
    ag.x_prev = std::move(ag.x);
    ag.x = std::move(x_next[i]);
    ag.y = std::move(y_next[i]);
    ag.g_last = std::move(g_next[i]);
  }
  ++state.iteration;
}

void validate_doubly_stochastic(const Eigen::MatrixXd& W, double tol) {
  if (W.minCoeff() < -tol)
    throw std::invalid_argument("W has negative entries");
  for (Eigen::Index i = 0; i < W.rows(); ++i)
    if (std::abs(W.row(i).sum() - 1.0) > tol ||
        std::abs(W.col(i).sum() - 1.0) > tol)
      throw std::invalid_argument("W is not doubly stochastic");
}

void step_dsgt(NetworkState& state, const Eigen::MatrixXd& W,
               const OracleConfig& oracle, const ProblemSpec& spec,
               std::uint64_t seed) {
  validate_doubly_stochastic(W);
  MixingPair pair;
  pair.A = W;
  pair.B = W;
  // beta is forced to zero for the specialization; alpha comes from state.
  for (auto& ag : state.agents)
    if (ag.beta != 0.0)
      throw std::invalid_argument("step_dsgt: beta must be zero");
  step_dsgtm_tv(state, pair, oracle, spec, seed);
}

void step_dsgd(NetworkState& state, const Eigen::MatrixXd& W,
               const OracleConfig& oracle, const ProblemSpec& spec,
               std::uint64_t seed, AlphaSchedule schedule) {
  validate_doubly_stochastic(W);
  const int n = state.n();
  const long k = state.iteration;
  std::vector<Eigen::VectorXd> g_now(n), x_next(n);
  for (int i = 0; i < n; ++i)
    g_now[i] = sample_gradient(i, state.agents[i].x, oracle, spec, seed, k);
  for (int i = 0; i < n; ++i) {
    double a = state.agents[i].alpha;
    if (schedule == AlphaSchedule::OneOverK) a /= double(k + 1);
    Eigen::VectorXd mixed = Eigen::VectorXd::Zero(state.agents[i].x.size());
    for (int j = 0; j < n; ++j)
      if (W(i, j) != 0.0) mixed += W(i, j) * state.agents[j].x;
    x_next[i] = mixed - a * g_now[i];
  }
  for (int i = 0; i < n; ++i) {
    auto& ag = state.agents[i];
    ag.x_prev = std::move(ag.x);
    ag.x = std::move(x_next[i]);
    ag.g_last = std::move(g_now[i]);
  }
  ++state.iteration;
}

RunRecord run(const RunInputs& in) {
  if (!in.problem) throw std::invalid_argument("run: missing problem");
  const ProblemSpec& spec = *in.problem;
  const int n = spec.num_agents();
  const Dataset& ds = *spec.data;

  NetworkState st = in.algo == Algorithm::DsgtmTv
                        ? init_network(spec, in.alphas, in.betas, in.oracle,
                                       in.seed, in.x0)
                        : init_network(spec, in.alphas,
                                       Eigen::VectorXd::Zero(n), in.oracle,
                                       in.seed, in.x0);

  RunRecord rec;
  rec.seed = in.seed;
  rec.config_echo = in.config_echo;

  const bool have_flows = in.phi && in.pi;
  auto record = [&](long k) {
    rec.iters.push_back(k);
    std::vector<Eigen::VectorXd> xs(n), xp(n), ys(n), gs(n);
    for (int i = 0; i < n; ++i) {
      xs[i] = st.agents[i].x;
      xp[i] = st.agents[i].x_prev;
      ys[i] = st.agents[i].y;
      gs[i] = st.agents[i].g_last;
    }
    Eigen::VectorXd phi_k, pi_k;
    if (have_flows && k < in.phi->steps() && k < in.pi->steps()) {
      phi_k = in.phi->vectors[k];
      pi_k = in.pi->vectors[k];
    } else {
      phi_k = Eigen::VectorXd::Constant(n, 1.0 / n);
      pi_k = phi_k;
    }
    rec.errors.push_back(error_vector(xs, xp, ys, phi_k, pi_k, in.x_star));
    double loss = 0.0;
    for (int i = 0; i < n; ++i) loss += local_loss(i, st.agents[i].x, spec);
    rec.loss.push_back(loss / n);
    const Eigen::VectorXd x_hat = weighted_average(xs, phi_k);
    rec.accuracy.push_back(spec.kind == ProblemKind::LogisticL2 &&
                                   !ds.test_idx.empty()
                               ? accuracy(x_hat, ds, ds.test_idx)
                               : 0.0);
    rec.sumgrad_residual.push_back(in.algo == Algorithm::Dsgd
                                       ? 0.0
                                       : sumgrad_residual(ys, gs));
  };

  record(0);
  for (long k = 0; k < in.horizon; ++k) {
    switch (in.algo) {
      case Algorithm::DsgtmTv: {
        if (!in.pairs || k >= static_cast<long>(in.pairs->size()))
          throw std::runtime_error("run: mixing pair missing at step " +
                                   std::to_string(k));
        step_dsgtm_tv(st, (*in.pairs)[k], in.oracle, spec, in.seed);
        break;
      }
      case Algorithm::Dsgt:
        if (!in.W) throw std::runtime_error("run: W missing");
        step_dsgt(st, *in.W, in.oracle, spec, in.seed);
        break;
      case Algorithm::Dsgd:
        if (!in.W) throw std::runtime_error("run: W missing");
        step_dsgd(st, *in.W, in.oracle, spec, in.seed, in.schedule);
        break;
    }
    if ((k + 1) % in.cadence == 0 || k + 1 == in.horizon) record(k + 1);
  }
  return rec;
}

}  // namespace dsgt
