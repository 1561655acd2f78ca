#include "dsgt/metrics.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace dsgt {

Eigen::VectorXd weighted_average(const std::vector<Eigen::VectorXd>& xs,
                                 const Eigen::VectorXd& phi) {
  if (xs.empty() || static_cast<int>(xs.size()) != phi.size())
    throw std::invalid_argument("weighted_average: dimension mismatch");
  Eigen::VectorXd avg = Eigen::VectorXd::Zero(xs[0].size());
  for (size_t i = 0; i < xs.size(); ++i) avg += phi(i) * xs[i];
  return avg;
}

ErrorVector error_vector(const std::vector<Eigen::VectorXd>& xs,
                         const std::vector<Eigen::VectorXd>& xs_prev,
                         const std::vector<Eigen::VectorXd>& ys,
                         const Eigen::VectorXd& phi_k,
                         const Eigen::VectorXd& pi_k,
                         const Eigen::VectorXd& x_star) {
  const int n = static_cast<int>(xs.size());
  if (pi_k.minCoeff() <= 0.0)
    throw std::invalid_argument("error_vector: pi has a zero component");
  ErrorVector ev;
  const Eigen::VectorXd x_hat = weighted_average(xs, phi_k);
  ev.opt_gap = (x_hat - x_star).squaredNorm();
  Eigen::VectorXd y_sum = Eigen::VectorXd::Zero(ys[0].size());
  for (const auto& y : ys) y_sum += y;
  for (int i = 0; i < n; ++i) {
    ev.consensus += phi_k(i) * (xs[i] - x_hat).squaredNorm();
    ev.state_diff += (xs[i] - xs_prev[i]).squaredNorm();
    ev.tracking += pi_k(i) * (ys[i] / pi_k(i) - y_sum).squaredNorm();
  }
  return ev;
}

double sumgrad_residual(const std::vector<Eigen::VectorXd>& ys,
                        const std::vector<Eigen::VectorXd>& gs) {
  Eigen::VectorXd diff = Eigen::VectorXd::Zero(ys[0].size());
  for (const auto& y : ys) diff += y;
  for (const auto& g : gs) diff -= g;
  return diff.lpNorm<Eigen::Infinity>();
}

double heterogeneity(const ProblemSpec& spec, const Eigen::VectorXd& x_star) {
  double acc = 0.0;
  const int n = spec.num_agents();
  for (int i = 0; i < n; ++i)
    acc += local_gradient(i, x_star, spec).squaredNorm();
  return acc / n;
}

double accuracy(const Eigen::VectorXd& x, const Dataset& ds,
                const std::vector<int>& test_idx) {
  if (test_idx.empty()) throw std::invalid_argument("accuracy: empty test set");
  const int p = ds.dim();
  const Eigen::VectorXd w = x.tail(p);
  int correct = 0;
  for (int j : test_idx) {
    const double score = (ds.features.row(j) * w)(0) + x(0);
    const double pred = score >= 0.0 ? 1.0 : -1.0;  // sign(0) == +1
    if (pred == ds.labels(j)) ++correct;
  }
  return double(correct) / double(test_idx.size());
}

void write_record_csv(std::ostream& os, const RunRecord& rec) {
  os << "iter,opt_gap,consensus,state_diff,tracking,loss,accuracy,"
        "sumgrad_residual\n";
  for (size_t t = 0; t < rec.iters.size(); ++t) {
    const auto& e = rec.errors[t];
    os << rec.iters[t] << ',' << e.opt_gap << ',' << e.consensus << ','
       << e.state_diff << ',' << e.tracking << ',' << rec.loss[t] << ','
       << rec.accuracy[t] << ',' << rec.sumgrad_residual[t] << '\n';
  }
}

}  // namespace dsgt
