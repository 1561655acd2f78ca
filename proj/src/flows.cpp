#include "dsgt/flows.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace dsgt {

double StochasticFlow::min_entry() const {
  double m = 1.0;
  for (const auto& v : vectors) m = std::min(m, v.minCoeff());
  return m;
}

StochasticFlow pi_sequence(const std::vector<Eigen::MatrixXd>& Bs) {
  if (Bs.empty()) throw std::invalid_argument("pi_sequence: empty input");
  const Eigen::Index n = Bs.front().rows();
  StochasticFlow flow;
  flow.kind = FlowKind::Pi;
  flow.approx_tol = 0.0;
  Eigen::VectorXd pi = Eigen::VectorXd::Constant(n, 1.0 / double(n));
  flow.vectors.push_back(pi);
  for (const auto& B : Bs) {
    if (B.rows() != n || B.cols() != n)
      throw std::invalid_argument("pi_sequence: dimension mismatch");
    pi = B * pi;
    flow.vectors.push_back(pi);
    flow.residuals.push_back(0.0);
  }
  return flow;
}

StochasticFlow phi_sequence(const std::vector<Eigen::MatrixXd>& As,
                            int tail_extension, double tol) {
  if (As.empty()) throw std::invalid_argument("phi_sequence: empty input");
  if (tail_extension < 0 || tol <= 0.0)
    throw std::invalid_argument("phi_sequence: bad tail/tol");
  const Eigen::Index n = As.front().rows();
  const int K = static_cast<int>(As.size());

  // Tail value: phi_K^T ~ (1/n)1^T A_last^e, grown until stationary.
  Eigen::RowVectorXd w = Eigen::RowVectorXd::Constant(n, 1.0 / double(n));
  const Eigen::MatrixXd& tail = As.back();
  bool converged = (n == 1);
  for (int e = 0; e < tail_extension && !converged; ++e) {
    Eigen::RowVectorXd next = w * tail;
    if ((next - w).cwiseAbs().maxCoeff() < tol) converged = true;
    w = next;
  }
  if (!converged)
    throw std::runtime_error(
        "phi_sequence: tail approximation did not converge at step " +
        std::to_string(K));

  StochasticFlow flow;
  flow.kind = FlowKind::Phi;
  flow.approx_tol = tol;
  flow.vectors.assign(K + 1, Eigen::VectorXd());
  flow.residuals.assign(K, 0.0);
  flow.vectors[K] = w.transpose();
  for (int k = K - 1; k >= 0; --k) {
    Eigen::RowVectorXd phik = flow.vectors[k + 1].transpose() * As[k];
    flow.vectors[k] = phik.transpose();
    flow.residuals[k] =
        (flow.vectors[k + 1].transpose() * As[k] - phik).cwiseAbs().maxCoeff();
  }
  return flow;
}

std::pair<double, double> flow_floor(double a, double b, int n) {
  if (a <= 0.0 || a > 1.0 || b <= 0.0 || b > 1.0 || n < 1)
    throw std::invalid_argument("flow_floor: need a,b in (0,1], n >= 1");
  return {std::pow(a, n) / double(n), std::pow(b, n) / double(n)};
}

std::vector<Eigen::MatrixXd> a_matrices(const std::vector<MixingPair>& pairs) {
  std::vector<Eigen::MatrixXd> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) out.push_back(p.A);
  return out;
}

std::vector<Eigen::MatrixXd> b_matrices(const std::vector<MixingPair>& pairs) {
  std::vector<Eigen::MatrixXd> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) out.push_back(p.B);
  return out;
}

}  // namespace dsgt
