#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "dsgt/config.hpp"
#include "dsgt/engine.hpp"
#include "dsgt/flows.hpp"
#include "dsgt/theory.hpp"

namespace dsgt {

/// Realized inputs shared by every seed of an experiment: graphs, weights,
/// flows, dataset, reference solution.
struct PreparedExperiment {
  ExperimentConfig cfg;
  DigraphSeq seq;
  std::vector<MixingPair> pairs;
  Eigen::MatrixXd W;  // static doubly-stochastic weights (dsgt/dsgd)
  StochasticFlow phi;
  StochasticFlow pi;
  ProblemSpec problem;
  Eigen::VectorXd x_star;
  double f_star = 0.0;
};

/// Builds graphs, mixing, flows, dataset, partition, (L, mu) and the
/// centralized reference solution for a validated config.
PreparedExperiment prepare_experiment(const ExperimentConfig& cfg);

/// Theory constants of the prepared sequence (dsgtm-tv only).
GlobalConstants prepared_constants(const PreparedExperiment& prep);

/// One run with the given seed (replaces cfg.seed).
RunRecord run_one(const PreparedExperiment& prep, std::uint64_t seed);

struct AggregateSeries {
  std::vector<long> iters;
  // the 7 metric columns of the record CSV, in header order
  std::vector<std::array<double, 7>> mean;
  std::vector<std::array<double, 7>> stderr_;
};

struct ExperimentResult {
  std::vector<RunRecord> records;  // one per seed
  AggregateSeries aggregate;
};

AggregateSeries aggregate_records(const std::vector<RunRecord>& records);

/// Runs cfg.seed_count seeds (cfg.seed, cfg.seed+1, ...) and writes config
/// echo, per-seed CSVs, the aggregate CSV and optional SVG plots into
/// cfg.output_dir. Output files carry no timestamps.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

void write_aggregate_csv(std::ostream& os, const AggregateSeries& agg);

/// Log-scale polyline plot of one metric series per file.
void write_svg_plot(std::ostream& os, const std::string& title,
                    const std::vector<long>& iters,
                    const std::vector<double>& values);

}  // namespace dsgt
