#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dsgt/digraph.hpp"
#include "dsgt/engine.hpp"
#include "dsgt/mixing.hpp"
#include "dsgt/problems.hpp"

namespace dsgt {

/// Everything the harness needs, parsed from a sectioned key-value file.
struct ExperimentConfig {
  Algorithm algorithm = Algorithm::DsgtmTv;
  long horizon = 100;
  int cadence = 1;
  std::uint64_t seed = 1;
  int seed_count = 1;
  std::string output_dir = "out";
  bool plots = false;

  int n = 1;
  GeneratorSpec graph;
  std::string graph_file;  // overrides generation when set

  MixingRule mixing;

  ProblemKind problem_kind = ProblemKind::LogisticL2;
  double lambda = 0.0;
  std::string dataset = "synthetic-gauss";
  std::string dataset_path;         // csv
  std::string mnist_images, mnist_labels;
  int mnist_pos = 3, mnist_neg = 5;
  int dim = 10;
  int m_train = 200;
  int m_test = 100;
  double mean_shift = 2.0;
  double separation = 4.0;
  PartitionScheme partition = PartitionScheme::Iid;

  OracleConfig oracle;

  double alpha = 0.01;
  double beta = 0.0;
  std::vector<double> alpha_multipliers;  // empty -> all ones
  std::vector<double> beta_multipliers;
  AlphaSchedule schedule = AlphaSchedule::Constant;

  std::string echo;  // raw file contents, for reproducibility
};

struct ConfigResult {
  ExperimentConfig cfg;
  std::vector<std::string> violations;  // key paths with messages

  bool ok() const { return violations.empty(); }
};

/// Parses and validates. Parse errors throw with a line number; semantic
/// violations are collected in the result.
ConfigResult load_config(const std::string& path);

/// load_config that throws listing every violation.
ExperimentConfig load_config_or_throw(const std::string& path);

/// Resolved per-agent stepsizes: base * multiplier (all ones if unset).
Eigen::VectorXd resolve_alphas(const ExperimentConfig& cfg);
Eigen::VectorXd resolve_betas(const ExperimentConfig& cfg);

}  // namespace dsgt
