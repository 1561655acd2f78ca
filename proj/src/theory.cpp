#include "dsgt/theory.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "dsgt/rng.hpp"

namespace dsgt {

namespace {

double radical(double r, const char* what) {
  if (r < 0.0 || r > 1.0)
    throw std::runtime_error(std::string("step_constants: radicand for ") +
                             what + " outside [0,1]: " + std::to_string(r));
  return std::sqrt(1.0 - r);
}

}  // namespace

std::pair<double, double> step_contraction(const StochasticFlow& phi,
                                           const StochasticFlow& pi,
                                           const GraphStats& stats_k, double a,
                                           double b, int k) {
  if (k + 1 >= phi.steps() || k + 1 >= pi.steps())
    throw std::out_of_range("step_contraction: flows do not cover step k+1");
  const auto& pk = pi.vectors[k];
  const auto& pk1 = pi.vectors[k + 1];
  const auto& fk = phi.vectors[k];
  const auto& fk1 = phi.vectors[k + 1];
  const double dk = double(stats_k.diameter) * double(stats_k.max_edge_utility);
  const double tau_rad = (pk.minCoeff() * pk.minCoeff() * b * b) /
                         (pk.maxCoeff() * pk.maxCoeff() * pk1.maxCoeff() * dk);
  const double c_rad =
      (fk1.minCoeff() * a * a) / (fk.maxCoeff() * fk.maxCoeff() * dk);
  return {radical(tau_rad, "tau"), radical(c_rad, "c")};
}

StepConstants step_constants(const StochasticFlow& phi,
                             const StochasticFlow& pi,
                             const GraphStats& stats_k, double a, double b,
                             double L, int k, double tau_bar, double c_bar) {
  StepConstants sc;
  const auto& pk = pi.vectors[k];
  const auto& pk1 = pi.vectors[k + 1];
  const auto& fk = phi.vectors[k];
  const auto& fk1 = phi.vectors[k + 1];
  const int n = static_cast<int>(pk.size());

  sc.chi = std::sqrt(1.0 / pk.minCoeff());
  sc.chi_next = std::sqrt(1.0 / pk1.minCoeff());
  sc.varphi = std::sqrt(1.0 / fk.minCoeff());
  sc.varphi_next = std::sqrt(1.0 / fk1.minCoeff());
  sc.gamma = std::sqrt((fk1.array() * pk.array()).maxCoeff());
  sc.psi = n * (sc.chi_next * sc.chi_next - 1.0);
  auto [tau_k, c_k] = step_contraction(phi, pi, stats_k, a, b, k);
  sc.tau = tau_k;
  sc.c = c_k;
  const double t2 = tau_bar * tau_bar;
  sc.nu = 6.0 * L * L * sc.chi_next * sc.chi_next * t2 / (1.0 - t2) +
          3.0 * sc.psi * L * L;
  const double comb = c_bar * sc.varphi_next + sc.varphi;
  sc.zeta = comb * comb * sc.nu;
  return sc;
}

GlobalConstants global_constants(const std::vector<StepConstants>& steps,
                                 const StochasticFlow& phi,
                                 const StochasticFlow& pi, double L, double mu,
                                 int n, double sigma) {
  if (steps.empty())
    throw std::invalid_argument("global_constants: empty step list");
  GlobalConstants g;
  g.L = L;
  g.mu = mu;
  g.n = n;
  g.sigma = sigma;
  g.c = 0.0;
  g.tau = 0.0;
  g.psi = 0.0;
  g.chi = 1.0;
  g.varphi = 1.0;
  for (const auto& s : steps) {
    g.c = std::max(g.c, s.c);
    g.tau = std::max(g.tau, s.tau);
    g.psi = std::max(g.psi, s.psi);
    g.chi = std::max({g.chi, s.chi, s.chi_next});
    g.varphi = std::max({g.varphi, s.varphi, s.varphi_next});
  }
  constexpr double kGuard = 1e-12;
  if (g.c >= 1.0 - kGuard || g.tau >= 1.0 - kGuard)
    throw std::runtime_error("global_constants: contraction factor at 1");
  g.eta = 1.0;
  const int K = static_cast<int>(steps.size());
  for (int k = 0; k < K; ++k)
    g.eta = std::min(g.eta, phi.vectors[k + 1].dot(pi.vectors[k]));
  const double t2 = g.tau * g.tau;
  g.nu = 6.0 * L * L * g.chi * g.chi * t2 / (1.0 - t2) + 3.0 * g.psi * L * L;
  const double phi2 = g.varphi * g.varphi;
  g.varsigma_sq =
      L * L * (n * g.eta * mu * mu + 12.0 * L * L * phi2) / (g.eta * mu * mu) +
      8.0 * g.nu * (n * g.eta * g.eta * mu * mu + 48.0 * L * L * phi2) /
          (n * g.eta * mu * mu * (1.0 - t2));
  return g;
}

GlobalConstants sequence_constants(const DigraphSeq& seq,
                                   const std::vector<MixingPair>& pairs,
                                   const StochasticFlow& phi,
                                   const StochasticFlow& pi, double L,
                                   double mu, double sigma) {
  const int K = static_cast<int>(pairs.size());
  auto [a, b] = sequence_floors(pairs);
  std::vector<GraphStats> stats(K);
  for (int k = 0; k < K; ++k) stats[k] = graph_stats(seq.graphs[k]);
  double tau_bar = 0.0, c_bar = 0.0;
  for (int k = 0; k < K; ++k) {
    auto [t, c] = step_contraction(phi, pi, stats[k], a, b, k);
    tau_bar = std::max(tau_bar, t);
    c_bar = std::max(c_bar, c);
  }
  std::vector<StepConstants> steps;
  steps.reserve(K);
  for (int k = 0; k < K; ++k)
    steps.push_back(
        step_constants(phi, pi, stats[k], a, b, L, k, tau_bar, c_bar));
  return global_constants(steps, phi, pi, L, mu, seq.n(), sigma);
}

CompositeSystem composite_system(const GlobalConstants& g, double alpha_bar,
                                 double beta_bar) {
  const double limit = 2.0 / (g.n * g.eta * (g.L + g.mu));
  if (!(alpha_bar > 0.0) || alpha_bar >= limit)
    throw std::invalid_argument(
        "composite_system: alpha_bar must be in (0, 2/(n eta (L+mu)))");
  CompositeSystem cs;
  const double L2 = g.L * g.L;
  const double phi2 = g.varphi * g.varphi;
  const double c2 = g.c * g.c;
  const double t2 = g.tau * g.tau;
  const double s2 = g.sigma * g.sigma;
  cs.m1 = g.n * g.mu * g.eta / 2.0;
  cs.m2 = 3.0 * L2 * phi2 / g.mu;
  cs.m3 = 6.0 / (g.n * g.mu * g.eta);
  cs.m4 = 4.0 * g.n * L2 * phi2 * (1.0 + c2) / (1.0 - c2);
  cs.m5 = 2.0 * (1.0 + c2) / (1.0 - c2);
  cs.m7 = 6.0 * g.n * L2 * phi2;
  cs.m8 = 12.0 * phi2;
  cs.m9 = 2.0 * g.n * L2 * phi2 * g.nu;
  cs.m10 = 4.0 * phi2 * g.nu;
  cs.m11 = g.nu;
  cs.b1 = 1.5 * g.n * s2;
  cs.b2 = 4.0 * g.n * (1.0 + c2) * s2 / (1.0 - c2);
  cs.b3 = 6.0 * g.n * s2;
  cs.b4 = 4.0 * g.n * g.psi * s2;
  cs.b5 = 2.0 * g.L * g.n * g.psi * s2;
  cs.b6 = 2.0 * g.n * g.nu * s2;

  const double a = alpha_bar, b = beta_bar;
  cs.M << 1.0 - cs.m1 * a, cs.m2 * a, cs.m3 * b * b / a, cs.m3 * a,
      cs.m4 * a * a, (1.0 + c2) / 2.0 + cs.m4 * a * a, cs.m5 * b * b,
      cs.m5 * a * a,
      cs.m7 * a * a, cs.m8 + cs.m7 * a * a, 3.0 * b * b, 3.0 * a * a,
      cs.m9 * a * a, cs.m10 + cs.m9 * a * a, cs.m11 * b * b,
      (1.0 + t2) / 2.0 + cs.m11 * a * a;
  cs.b << cs.b1 * a * a, cs.b2 * a * a, cs.b3 * a * a,
      cs.b4 + cs.b5 * a + cs.b6 * a * a;
  return cs;
}

namespace {

// Gelfand limit via scaled repeated squaring. Only the dominant eigenvalue
// survives the squarings, and for nonnegative matrices the products involve
// no cancellation, so this stays accurate even when rho is within 1e-12 of 1
// and entries span many orders of magnitude.
double nonneg_spectral_radius(const Eigen::MatrixXd& M) {
  Eigen::MatrixXd B = M;
  double log_rho = 0.0;
  double weight = 1.0;
  for (int j = 0; j < 64; ++j) {
    const double s = B.maxCoeff();
    if (s == 0.0) return 0.0;  // nilpotent
    B /= s;
    log_rho += weight * std::log(s);
    weight *= 0.5;
    B = (B * B).eval();
  }
  const double s = B.maxCoeff();
  if (s == 0.0) return 0.0;
  log_rho += weight * std::log(s);
  return std::exp(log_rho);
}

double qr_spectral_radius(const Eigen::MatrixXd& M) {
  const Eigen::Index n = M.rows();
  // Balance by a diagonal similarity (powers of two) first; the QR iteration
  // loses accuracy on matrices whose entries span many orders of magnitude.
  Eigen::MatrixXd B = M;
  for (bool changed = true; changed;) {
    changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      double r = B.row(i).cwiseAbs().sum() - std::abs(B(i, i));
      double c = B.col(i).cwiseAbs().sum() - std::abs(B(i, i));
      if (r == 0.0 || c == 0.0) continue;
      double f = 1.0;
      while (c < r / 2.0) {
        c *= 2.0;
        r /= 2.0;
        f *= 2.0;
      }
      while (c > r * 2.0) {
        c /= 2.0;
        r *= 2.0;
        f /= 2.0;
      }
      if (f != 1.0) {
        B.col(i) *= f;
        B.row(i) /= f;
        changed = true;
      }
    }
  }
  Eigen::EigenSolver<Eigen::MatrixXd> es(B, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("spectral_radius: eigensolver failed");
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace

SpectralResult spectral_radius(const Eigen::MatrixXd& M,
                               bool with_certificate) {
  if (M.rows() != M.cols() || !M.allFinite())
    throw std::invalid_argument("spectral_radius: need a finite square matrix");
  const Eigen::Index n = M.rows();
  SpectralResult res;
  res.rho = (M.array() >= 0.0).all() ? nonneg_spectral_radius(M)
                                     : qr_spectral_radius(M);
  if (with_certificate) {
    // delta = (rho' I - M)^{-1} 1 > 0 whenever rho' > rho(M); then
    // M delta = rho' delta - 1 < rho' delta.
    double gap = std::max(res.rho, 1.0) * 1e-10;
    for (int tries = 0; tries < 64; ++tries) {
      const double rho_c = res.rho + gap;
      Eigen::MatrixXd S = rho_c * Eigen::MatrixXd::Identity(n, n) - M;
      Eigen::VectorXd delta = S.fullPivLu().solve(Eigen::VectorXd::Ones(n));
      if (delta.allFinite() && delta.minCoeff() > 0.0 &&
          ((M * delta).array() < rho_c * delta.array()).all()) {
        res.certificate = delta;
        res.rho_certified = rho_c;
        break;
      }
      gap *= 4.0;
    }
    if (res.certificate.size() == 0)
      throw std::runtime_error("spectral_radius: certificate not found");
  }
  return res;
}

double Theorem1Bounds::beta_max(double alpha_bar) const {
  if (!(alpha_bar > 0.0) || alpha_bar >= alpha_max)
    throw std::invalid_argument("beta_max: alpha_bar outside (0, alpha_max)");
  const double t2 = g.tau * g.tau;
  const double c2 = g.c * g.c;
  const double term1 =
      alpha_bar * std::sqrt((g.n * g.eta * g.L * g.L * (1.0 - t2) + 32.0 * g.nu) /
                            (48.0 * (1.0 - t2)));
  const double rad2 = (1.0 - c2) * (1.0 - c2) /
                          (96.0 * (1.0 + c2) * g.varphi * g.varphi) -
                      g.varsigma_sq * alpha_bar * alpha_bar / 12.0;
  if (rad2 <= 0.0) return 0.0;  // absolute radical binds with nothing left
  return std::min(term1, std::sqrt(rad2));
}

int Theorem1Bounds::binding_term(double alpha_bar) const {
  const double t2 = g.tau * g.tau;
  const double c2 = g.c * g.c;
  const double term1 =
      alpha_bar * std::sqrt((g.n * g.eta * g.L * g.L * (1.0 - t2) + 32.0 * g.nu) /
                            (48.0 * (1.0 - t2)));
  const double rad2 = (1.0 - c2) * (1.0 - c2) /
                          (96.0 * (1.0 + c2) * g.varphi * g.varphi) -
                      g.varsigma_sq * alpha_bar * alpha_bar / 12.0;
  if (rad2 <= 0.0) return 2;
  return term1 <= std::sqrt(rad2) ? 1 : 2;
}

Theorem1Bounds theorem1_bounds(const GlobalConstants& g) {
  Theorem1Bounds tb;
  tb.g = g;
  const double c2 = g.c * g.c;
  const double first = 2.0 / (g.n * g.eta * (g.L + g.mu));
  const double second =
      (1.0 - c2) /
      (2.0 * g.varphi * std::sqrt(g.varsigma_sq) * std::sqrt(2.0 * (1.0 + c2)));
  tb.alpha_max = std::min(first, second);
  return tb;
}

}  // namespace dsgt
