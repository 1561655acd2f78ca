#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "dsgt/harness.hpp"

using namespace dsgt;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.algorithm = Algorithm::DsgtmTv;
  cfg.horizon = 40;
  cfg.seed = 3;
  cfg.n = 5;
  cfg.graph.mode = GraphMode::PerStepRandom;
  cfg.graph.density = 0.3;
  cfg.problem_kind = ProblemKind::Quadratic;
  cfg.dataset = "quadratic-centers";
  cfg.dim = 3;
  cfg.m_train = 40;
  cfg.separation = 3.0;
  cfg.alpha = 0.05;
  cfg.beta = 0.1;
  cfg.output_dir = "/tmp/dsgt_harness_test";
  cfg.echo = "test-config\n";
  return cfg;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("prepared experiments are internally consistent") {
  auto prep = prepare_experiment(small_config());
  CHECK(prep.seq.horizon() == 40);
  CHECK(prep.pairs.size() == 40);
  CHECK(prep.phi.steps() == 41);
  CHECK(prep.pi.steps() == 41);
  CHECK(prep.problem.num_agents() == 5);
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(3);
  for (int i = 0; i < 5; ++i)
    grad += local_gradient(i, prep.x_star, prep.problem);
  CHECK(grad.norm() / 5.0 <= 1e-10);
}

TEST_CASE("single-seed aggregate equals the run itself") {
  auto cfg = small_config();
  cfg.seed_count = 1;
  auto res = run_experiment(cfg);
  REQUIRE(res.records.size() == 1);
  for (size_t t = 0; t < res.aggregate.iters.size(); ++t) {
    CHECK(res.aggregate.mean[t][0] ==
          doctest::Approx(res.records[0].errors[t].opt_gap));
    CHECK(res.aggregate.stderr_[t][0] == 0.0);
  }
}

TEST_CASE("deterministic runs are identical across seeds, noisy ones differ") {
  auto cfg = small_config();
  cfg.seed_count = 4;
  auto res = run_experiment(cfg);
  REQUIRE(res.records.size() == 4);
  for (int s = 1; s < 4; ++s)
    for (size_t t = 0; t < res.records[0].iters.size(); ++t)
      CHECK(res.records[s].errors[t].opt_gap ==
            res.records[0].errors[t].opt_gap);

  cfg.oracle.mode = OracleMode::ExactPlusNoise;
  cfg.oracle.sigma = 0.3;
  cfg.seed_count = 8;
  auto noisy = run_experiment(cfg);
  bool positive_stderr = false;
  for (size_t t = 1; t < noisy.aggregate.iters.size(); ++t)
    positive_stderr = positive_stderr || noisy.aggregate.stderr_[t][0] > 0.0;
  CHECK(positive_stderr);
}

TEST_CASE("artifacts are reproducible files without timestamps") {
  namespace fs = std::filesystem;
  auto cfg = small_config();
  cfg.seed_count = 2;
  cfg.plots = true;
  fs::remove_all(cfg.output_dir);
  run_experiment(cfg);
  const fs::path dir(cfg.output_dir);
  CHECK(fs::exists(dir / "config.txt"));
  CHECK(fs::exists(dir / "seed_3.csv"));
  CHECK(fs::exists(dir / "seed_4.csv"));
  CHECK(fs::exists(dir / "aggregate.csv"));
  CHECK(fs::exists(dir / "opt_gap.svg"));
  CHECK(slurp(dir / "config.txt") == "test-config\n");
  const std::string first = slurp(dir / "seed_3.csv");
  const std::string agg = slurp(dir / "aggregate.csv");

  run_experiment(cfg);  // rerun must produce byte-identical outputs
  CHECK(slurp(dir / "seed_3.csv") == first);
  CHECK(slurp(dir / "aggregate.csv") == agg);
}

TEST_CASE("svg plots are valid polyline documents") {
  std::ostringstream os;
  write_svg_plot(os, "opt_gap", {0, 1, 2, 3}, {1.0, 0.1, 0.01, 0.001});
  const std::string svg = os.str();
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("<polyline") != std::string::npos);
  CHECK(svg.find("opt_gap") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);
}

TEST_CASE("dsgt and dsgd configs prepare a doubly stochastic W") {
  auto cfg = small_config();
  cfg.algorithm = Algorithm::Dsgt;
  cfg.graph.mode = GraphMode::Static;
  cfg.graph.symmetric = true;
  cfg.mixing.kind = WeightRule::Metropolis;
  cfg.beta = 0.0;
  auto prep = prepare_experiment(cfg);
  CHECK_NOTHROW(validate_doubly_stochastic(prep.W));
  auto rec = run_one(prep, 5);
  CHECK(rec.errors.back().opt_gap < rec.errors.front().opt_gap);
}

TEST_CASE("theory constants come out of a prepared experiment") {
  auto prep = prepare_experiment(small_config());
  auto g = prepared_constants(prep);
  CHECK(g.n == 5);
  CHECK(g.c < 1.0);
  CHECK(g.tau < 1.0);
  CHECK(g.eta > 0.0);
  auto bounds = theorem1_bounds(g);
  CHECK(bounds.alpha_max > 0.0);
}

TEST_CASE("aggregate rejects mismatched records") {
  RunRecord a, b;
  a.iters = {0, 1};
  b.iters = {0, 2};
  CHECK_THROWS(aggregate_records({a, b}));
  CHECK_THROWS(aggregate_records({}));
}
