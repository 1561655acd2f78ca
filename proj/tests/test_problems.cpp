#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>

#include "dsgt/problems.hpp"
#include "dsgt/rng.hpp"

using namespace dsgt;

namespace {

ProblemSpec logistic_spec(int n = 2, double lambda = 0.01,
                          std::uint64_t seed = 1, int dim = 4,
                          int m_train = 40) {
  ProblemSpec spec;
  spec.kind = ProblemKind::LogisticL2;
  spec.lambda = lambda;
  spec.data = std::make_shared<Dataset>(
      make_synthetic_gauss(dim, m_train, 20, 1.5, seed));
  spec.partitions = partition(*spec.data, n, PartitionScheme::Iid, seed);
  std::tie(spec.L, spec.mu) = estimate_L_mu(spec);
  return spec;
}

ProblemSpec quadratic_spec(int n = 3, std::uint64_t seed = 2, int dim = 4) {
  ProblemSpec spec;
  spec.kind = ProblemKind::Quadratic;
  spec.data =
      std::make_shared<Dataset>(make_quadratic_centers(dim, 30, 3.0, seed));
  spec.partitions = partition(*spec.data, n, PartitionScheme::Iid, seed);
  std::tie(spec.L, spec.mu) = estimate_L_mu(spec);
  return spec;
}

}  // namespace

TEST_CASE("logistic loss and gradient at zero") {
  auto spec = logistic_spec(1, 0.0);
  const auto& ds = *spec.data;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(spec.model_dim());
  auto [loss, grad] = loss_and_grad(x, ds.train_idx, spec);
  CHECK(loss == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  Eigen::VectorXd expected = Eigen::VectorXd::Zero(spec.model_dim());
  for (int j : ds.train_idx) {
    expected(0) += -ds.labels(j) / 2.0;
    expected.tail(ds.dim()) += (-ds.labels(j) / 2.0) * ds.features.row(j).transpose();
  }
  expected /= double(ds.train_idx.size());
  CHECK((grad - expected).lpNorm<Eigen::Infinity>() <= 1e-12);
}

TEST_CASE("quadratic loss vanishes at its center") {
  auto spec = quadratic_spec();
  const int j = spec.partitions[0][0];
  Eigen::VectorXd x = spec.data->features.row(j).transpose();
  auto [loss, grad] = loss_and_grad(x, {j}, spec);
  CHECK(loss == doctest::Approx(0.0));
  CHECK(grad.norm() == doctest::Approx(0.0));
}

TEST_CASE("gradients match central finite differences") {
  const double h = 1e-6;
  for (int kind = 0; kind < 2; ++kind) {
    ProblemSpec spec = kind == 0 ? logistic_spec(2, 0.05) : quadratic_spec();
    auto rng = substream(77, kind);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
      Eigen::VectorXd x(spec.model_dim());
      for (int i = 0; i < x.size(); ++i) x(i) = gauss(rng);
      const auto& batch = spec.partitions[trial % spec.num_agents()];
      auto [loss, grad] = loss_and_grad(x, batch, spec);
      Eigen::VectorXd fd(x.size());
      for (int i = 0; i < x.size(); ++i) {
        Eigen::VectorXd xp = x, xm = x;
        xp(i) += h;
        xm(i) -= h;
        fd(i) = (loss_and_grad(xp, batch, spec).first -
                 loss_and_grad(xm, batch, spec).first) /
                (2 * h);
      }
      CHECK((grad - fd).norm() / std::max(1.0, grad.norm()) < 1e-5);
    }
  }
}

TEST_CASE("exact oracle equals the full local gradient") {
  auto spec = logistic_spec();
  Eigen::VectorXd x = Eigen::VectorXd::Ones(spec.model_dim()) * 0.3;
  OracleConfig cfg;
  cfg.mode = OracleMode::Exact;
  Eigen::VectorXd g = sample_gradient(0, x, cfg, spec, 5, 3);
  CHECK((g - local_gradient(0, x, spec)).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("zero-noise oracle equals the exact gradient") {
  auto spec = quadratic_spec();
  Eigen::VectorXd x = Eigen::VectorXd::Ones(spec.model_dim());
  OracleConfig cfg;
  cfg.mode = OracleMode::ExactPlusNoise;
  cfg.sigma = 0.0;
  Eigen::VectorXd g = sample_gradient(1, x, cfg, spec, 5, 3);
  CHECK((g - local_gradient(1, x, spec)).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("oracle draws are deterministic per (seed, agent, iteration)") {
  auto spec = logistic_spec();
  Eigen::VectorXd x = Eigen::VectorXd::Ones(spec.model_dim()) * 0.1;
  OracleConfig cfg;
  cfg.mode = OracleMode::ExactPlusNoise;
  cfg.sigma = 0.5;
  Eigen::VectorXd g1 = sample_gradient(0, x, cfg, spec, 42, 7);
  Eigen::VectorXd g2 = sample_gradient(0, x, cfg, spec, 42, 7);
  Eigen::VectorXd g3 = sample_gradient(1, x, cfg, spec, 42, 7);
  Eigen::VectorXd g4 = sample_gradient(0, x, cfg, spec, 42, 8);
  CHECK((g1 - g2).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK((g1 - g3).lpNorm<Eigen::Infinity>() > 0.0);
  CHECK((g1 - g4).lpNorm<Eigen::Infinity>() > 0.0);
}

TEST_CASE("minibatch oracle is unbiased") {
  auto spec = logistic_spec(1, 0.01, 9, 3, 60);
  Eigen::VectorXd x = Eigen::VectorXd::Ones(spec.model_dim()) * 0.2;
  OracleConfig cfg;
  cfg.mode = OracleMode::Minibatch;
  cfg.batch_size = 5;
  const Eigen::VectorXd full = local_gradient(0, x, spec);
  const int draws = 10000;
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(x.size());
  Eigen::VectorXd sumsq = Eigen::VectorXd::Zero(x.size());
  for (int t = 0; t < draws; ++t) {
    Eigen::VectorXd g = sample_gradient(0, x, cfg, spec, 1234, t);
    sum += g;
    sumsq += g.cwiseProduct(g);
  }
  Eigen::VectorXd mean = sum / draws;
  for (int i = 0; i < x.size(); ++i) {
    double var = (sumsq(i) - sum(i) * sum(i) / draws) / (draws - 1);
    double se = std::sqrt(var / draws);
    CHECK(std::abs(mean(i) - full(i)) <= 3.0 * se + 1e-12);
  }
}

TEST_CASE("partition schemes") {
  auto ds = make_synthetic_gauss(3, 10, 4, 1.0, 8);
  auto singletons = partition(ds, 10, PartitionScheme::Iid, 1);
  REQUIRE(singletons.size() == 10);
  std::vector<int> seen;
  for (const auto& p : singletons) {
    CHECK(p.size() == 1);
    seen.push_back(p[0]);
  }
  std::sort(seen.begin(), seen.end());
  CHECK(seen == ds.train_idx);

  auto single = partition(ds, 1, PartitionScheme::Iid, 1);
  REQUIRE(single.size() == 1);
  CHECK(single[0].size() == ds.train_idx.size());

  auto sorted = partition(ds, 2, PartitionScheme::LabelSorted, 1);
  for (int j : sorted[0]) CHECK(ds.labels(j) == -1.0);
  for (int j : sorted[1]) CHECK(ds.labels(j) == 1.0);

  CHECK_THROWS(partition(ds, 11, PartitionScheme::Iid, 1));
}

TEST_CASE("reference solution of averaged quadratics is the center mean") {
  auto spec = quadratic_spec(3, 4, 5);
  auto [x_star, f_star] = solve_reference(spec);
  Eigen::VectorXd mean_of_means = Eigen::VectorXd::Zero(5);
  for (const auto& part : spec.partitions) {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(5);
    for (int j : part) c += spec.data->features.row(j).transpose();
    mean_of_means += c / double(part.size());
  }
  mean_of_means /= double(spec.partitions.size());
  CHECK((x_star - mean_of_means).lpNorm<Eigen::Infinity>() <= 1e-10);
}

TEST_CASE("huge regularization pins the logistic solution near zero") {
  auto spec = logistic_spec(2, 1e6);
  auto [x_star, f_star] = solve_reference(spec);
  CHECK(x_star.norm() <= 1.0 / 1e6 * 10.0);
}

TEST_CASE("reference solution is a certified local minimum") {
  auto spec = logistic_spec(3, 0.001, 12, 6, 90);
  auto [x_star, f_star] = solve_reference(spec);
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(spec.model_dim());
  double f_check = 0.0;
  for (int i = 0; i < spec.num_agents(); ++i) {
    grad += local_gradient(i, x_star, spec);
    f_check += local_loss(i, x_star, spec);
  }
  grad /= double(spec.num_agents());
  f_check /= double(spec.num_agents());
  CHECK(grad.norm() <= 1e-12);
  CHECK(f_check == doctest::Approx(f_star));
  auto rng = substream(55, 0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int t = 0; t < 5; ++t) {
    Eigen::VectorXd d(spec.model_dim());
    for (int i = 0; i < d.size(); ++i) d(i) = gauss(rng);
    d *= 1e-3 / d.norm();
    double f_pert = 0.0;
    for (int i = 0; i < spec.num_agents(); ++i)
      f_pert += local_loss(i, x_star + d, spec);
    CHECK(f_pert / spec.num_agents() > f_star);
  }
}

TEST_CASE("curvature estimates") {
  CHECK(estimate_L_mu(quadratic_spec()) == std::pair<double, double>{1.0, 1.0});

  // all-zero features leave only the bias column
  ProblemSpec spec;
  spec.kind = ProblemKind::LogisticL2;
  spec.lambda = 0.3;
  auto ds = std::make_shared<Dataset>();
  ds->features = Eigen::MatrixXd::Zero(8, 2);
  ds->labels = Eigen::VectorXd::Ones(8);
  for (int i = 0; i < 8; ++i) ds->train_idx.push_back(i);
  spec.data = ds;
  spec.partitions = {ds->train_idx};
  auto [L, mu] = estimate_L_mu(spec);
  CHECK(mu == doctest::Approx(0.3));
  CHECK(L == doctest::Approx(0.3 + 0.25).epsilon(1e-10));

  // dense eigensolver oracle on a random dataset
  auto lspec = logistic_spec(1, 0.01, 21, 5, 50);
  const auto& d = *lspec.data;
  const int m = static_cast<int>(d.train_idx.size());
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(6, 6);
  for (int j : d.train_idx) {
    Eigen::VectorXd bt(6);
    bt(0) = 1.0;
    bt.tail(5) = d.features.row(j).transpose();
    H += bt * bt.transpose();
  }
  H /= 4.0 * m;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
  auto [L2, mu2] = estimate_L_mu(lspec);
  CHECK(L2 == doctest::Approx(0.01 + es.eigenvalues().maxCoeff())
                  .epsilon(1e-8));
}

TEST_CASE("csv loader round-trips a small dataset") {
  const std::string path = "/tmp/dsgt_test_data.csv";
  {
    std::ofstream out(path);
    out << "1,0.5,-0.25\n-1,1.5,2.0\n1,-3.0,0.75\n-1,0.0,0.0\n";
  }
  Dataset ds = load_csv(path, 3);
  REQUIRE(ds.num_samples() == 4);
  CHECK(ds.dim() == 2);
  CHECK(ds.labels(0) == 1.0);
  CHECK(ds.labels(1) == -1.0);
  CHECK(ds.features(2, 0) == doctest::Approx(-3.0));
  CHECK(ds.train_idx.size() == 3);
  CHECK(ds.test_idx.size() == 1);
}
