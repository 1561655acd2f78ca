#include "dsgt/harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace dsgt {
namespace {

std::shared_ptr<const Dataset> build_dataset(const ExperimentConfig& cfg) {
  if (cfg.dataset == "synthetic-gauss")
    return std::make_shared<Dataset>(make_synthetic_gauss(
        cfg.dim, cfg.m_train, cfg.m_test, cfg.mean_shift, cfg.seed));
  if (cfg.dataset == "quadratic-centers")
    return std::make_shared<Dataset>(
        make_quadratic_centers(cfg.dim, cfg.m_train, cfg.separation, cfg.seed));
  if (cfg.dataset == "csv")
    return std::make_shared<Dataset>(load_csv(cfg.dataset_path, cfg.m_train));
  if (cfg.dataset == "mnist")
    return std::make_shared<Dataset>(
        load_mnist_idx(cfg.mnist_images, cfg.mnist_labels, cfg.mnist_pos,
                       cfg.mnist_neg, cfg.m_train, cfg.m_test));
  throw std::runtime_error("unknown dataset kind: " + cfg.dataset);
}

}  // namespace

PreparedExperiment prepare_experiment(const ExperimentConfig& cfg) {
  PreparedExperiment prep;
  prep.cfg = cfg;

  if (!cfg.graph_file.empty()) {
    std::ifstream in(cfg.graph_file);
    if (!in) throw std::runtime_error("cannot open graph file: " + cfg.graph_file);
    prep.seq = read_sequence(in);
    if (prep.seq.n() != cfg.n)
      throw std::runtime_error("graph file node count disagrees with graph.n");
    if (prep.seq.horizon() < cfg.horizon)
      throw std::runtime_error("graph file shorter than the horizon");
  } else {
    prep.seq = generate_sequence(cfg.n, static_cast<int>(cfg.horizon),
                                 cfg.graph, cfg.seed);
  }

  if (cfg.algorithm == Algorithm::DsgtmTv) {
    prep.pairs = build_mixing_sequence(prep.seq, cfg.mixing);
    prep.pi = pi_sequence(b_matrices(prep.pairs));
    prep.phi = phi_sequence(a_matrices(prep.pairs));
  } else {
    MixingRule rule = cfg.mixing;
    rule.kind = WeightRule::Metropolis;
    prep.W = build_mixing(prep.seq.graphs.front(), rule).A;
    validate_doubly_stochastic(prep.W);
  }

  prep.problem.kind = cfg.problem_kind;
  prep.problem.lambda = cfg.lambda;
  prep.problem.data = build_dataset(cfg);
  prep.problem.partitions =
      partition(*prep.problem.data, cfg.n, cfg.partition, cfg.seed);
  std::tie(prep.problem.L, prep.problem.mu) = estimate_L_mu(prep.problem);
  std::tie(prep.x_star, prep.f_star) = solve_reference(prep.problem);
  return prep;
}

GlobalConstants prepared_constants(const PreparedExperiment& prep) {
  if (prep.pairs.empty())
    throw std::runtime_error(
        "prepared_constants: no time-varying mixing sequence prepared");
  return sequence_constants(prep.seq, prep.pairs, prep.phi, prep.pi,
                            prep.problem.L, prep.problem.mu,
                            prep.cfg.oracle.sigma);
}

RunRecord run_one(const PreparedExperiment& prep, std::uint64_t seed) {
  RunInputs in;
  in.algo = prep.cfg.algorithm;
  if (in.algo == Algorithm::DsgtmTv) {
    in.pairs = &prep.pairs;
    in.phi = &prep.phi;
    in.pi = &prep.pi;
  } else {
    in.W = &prep.W;
  }
  in.problem = &prep.problem;
  in.oracle = prep.cfg.oracle;
  in.alphas = resolve_alphas(prep.cfg);
  in.betas = resolve_betas(prep.cfg);
  in.schedule = prep.cfg.schedule;
  in.horizon = prep.cfg.horizon;
  in.cadence = prep.cfg.cadence;
  in.seed = seed;
  in.x_star = prep.x_star;
  in.config_echo = prep.cfg.echo;
  return run(in);
}

AggregateSeries aggregate_records(const std::vector<RunRecord>& records) {
  if (records.empty())
    throw std::invalid_argument("aggregate_records: no records");
  const size_t T = records[0].iters.size();
  for (const auto& r : records)
    if (r.iters != records[0].iters)
      throw std::invalid_argument("aggregate_records: cadence mismatch");
  const double m = double(records.size());
  AggregateSeries agg;
  agg.iters = records[0].iters;
  agg.mean.resize(T);
  agg.stderr_.resize(T);
  for (size_t t = 0; t < T; ++t) {
    std::array<double, 7> sum{}, sumsq{};
    for (const auto& r : records) {
      const auto v = r.errors[t].as_vec();
      const double cols[7] = {v(0), v(1), v(2), v(3),
                              r.loss[t], r.accuracy[t], r.sumgrad_residual[t]};
      for (int c = 0; c < 7; ++c) {
        sum[c] += cols[c];
        sumsq[c] += cols[c] * cols[c];
      }
    }
    for (int c = 0; c < 7; ++c) {
      agg.mean[t][c] = sum[c] / m;
      double var = m > 1 ? (sumsq[c] - sum[c] * sum[c] / m) / (m - 1) : 0.0;
      agg.stderr_[t][c] = m > 1 ? std::sqrt(std::max(var, 0.0) / m) : 0.0;
    }
  }
  return agg;
}

void write_aggregate_csv(std::ostream& os, const AggregateSeries& agg) {
  static const char* names[7] = {"opt_gap",  "consensus", "state_diff",
                                 "tracking", "loss",      "accuracy",
                                 "sumgrad_residual"};
  os << "iter";
  for (const char* n : names) os << ',' << n << "_mean," << n << "_stderr";
  os << '\n';
  for (size_t t = 0; t < agg.iters.size(); ++t) {
    os << agg.iters[t];
    for (int c = 0; c < 7; ++c)
      os << ',' << agg.mean[t][c] << ',' << agg.stderr_[t][c];
    os << '\n';
  }
}

void write_svg_plot(std::ostream& os, const std::string& title,
                    const std::vector<long>& iters,
                    const std::vector<double>& values) {
  const int W = 640, H = 400, ML = 60, MR = 20, MT = 30, MB = 40;
  std::vector<double> logs(values.size());
  for (size_t i = 0; i < values.size(); ++i)
    logs[i] = std::log10(std::max(values[i], 1e-300));
  double lo = *std::min_element(logs.begin(), logs.end());
  double hi = *std::max_element(logs.begin(), logs.end());
  if (hi - lo < 1e-12) hi = lo + 1.0;
  const double x0 = iters.front(), x1 = std::max<double>(iters.back(), x0 + 1);
  auto px = [&](double it) {
    return ML + (it - x0) / (x1 - x0) * (W - ML - MR);
  };
  auto py = [&](double lg) {
    return H - MB - (lg - lo) / (hi - lo) * (H - MT - MB);
  };
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W
     << "\" height=\"" << H << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"18\" text-anchor=\"middle\" "
        "font-family=\"sans-serif\" font-size=\"14\">"
     << title << " (log10)</text>\n";
  os << "<line x1=\"" << ML << "\" y1=\"" << H - MB << "\" x2=\"" << W - MR
     << "\" y2=\"" << H - MB << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << ML << "\" y1=\"" << MT << "\" x2=\"" << ML
     << "\" y2=\"" << H - MB << "\" stroke=\"black\"/>\n";
  os << "<text x=\"" << ML - 6 << "\" y=\"" << py(hi) + 4
     << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
     << hi << "</text>\n";
  os << "<text x=\"" << ML - 6 << "\" y=\"" << py(lo) + 4
     << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
     << lo << "</text>\n";
  os << "<text x=\"" << px(x0) << "\" y=\"" << H - MB + 16
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        "font-size=\"11\">"
     << static_cast<long>(x0) << "</text>\n";
  os << "<text x=\"" << px(x1) << "\" y=\"" << H - MB + 16
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        "font-size=\"11\">"
     << static_cast<long>(x1) << "</text>\n";
  os << "<polyline fill=\"none\" stroke=\"#1f5fbf\" stroke-width=\"1.5\" "
        "points=\"";
  for (size_t i = 0; i < iters.size(); ++i)
    os << px(double(iters[i])) << ',' << py(logs[i]) << ' ';
  os << "\"/>\n</svg>\n";
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  PreparedExperiment prep = prepare_experiment(cfg);
  ExperimentResult res;
  for (int s = 0; s < cfg.seed_count; ++s)
    res.records.push_back(run_one(prep, cfg.seed + std::uint64_t(s)));
  res.aggregate = aggregate_records(res.records);

  namespace fs = std::filesystem;
  fs::create_directories(cfg.output_dir);
  {
    std::ofstream out(fs::path(cfg.output_dir) / "config.txt");
    out << cfg.echo;
  }
  for (int s = 0; s < cfg.seed_count; ++s) {
    std::ofstream out(fs::path(cfg.output_dir) /
                      ("seed_" + std::to_string(cfg.seed + std::uint64_t(s)) +
                       ".csv"));
    write_record_csv(out, res.records[s]);
  }
  {
    std::ofstream out(fs::path(cfg.output_dir) / "aggregate.csv");
    write_aggregate_csv(out, res.aggregate);
  }
  if (cfg.plots) {
    static const char* names[7] = {"opt_gap",  "consensus", "state_diff",
                                   "tracking", "loss",      "accuracy",
                                   "sumgrad_residual"};
    for (int c = 0; c < 7; ++c) {
      std::vector<double> series(res.aggregate.iters.size());
      for (size_t t = 0; t < series.size(); ++t)
        series[t] = res.aggregate.mean[t][c];
      std::ofstream out(fs::path(cfg.output_dir) /
                        (std::string(names[c]) + ".svg"));
      write_svg_plot(out, names[c], res.aggregate.iters, series);
    }
  }
  return res;
}

}  // namespace dsgt
