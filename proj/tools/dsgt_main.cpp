#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "dsgt/harness.hpp"

namespace {

int cmd_run(const std::string& config, std::optional<std::uint64_t> seed,
            const std::string& out) {
  dsgt::ExperimentConfig cfg = dsgt::load_config_or_throw(config);
  if (seed) cfg.seed = *seed;
  if (!out.empty()) cfg.output_dir = out;
  dsgt::ExperimentResult res = dsgt::run_experiment(cfg);
  const auto& last = res.aggregate.mean.back();
  std::cout << "wrote " << cfg.seed_count << " run(s) to " << cfg.output_dir
            << "\nfinal means: opt_gap=" << last[0]
            << " consensus=" << last[1] << " tracking=" << last[3]
            << " loss=" << last[4] << " accuracy=" << last[5] << "\n";
  return 0;
}

int cmd_bounds(const std::string& config, const std::string& csv) {
  dsgt::ExperimentConfig cfg = dsgt::load_config_or_throw(config);
  if (cfg.algorithm != dsgt::Algorithm::DsgtmTv)
    throw std::runtime_error("bounds: config must use the dsgtm-tv algorithm");
  dsgt::PreparedExperiment prep = dsgt::prepare_experiment(cfg);
  dsgt::GlobalConstants g = dsgt::prepared_constants(prep);
  dsgt::Theorem1Bounds b = dsgt::theorem1_bounds(g);

  std::cout << "n=" << g.n << " L=" << g.L << " mu=" << g.mu
            << " eta=" << g.eta << " c=" << g.c << " tau=" << g.tau
            << "\npsi=" << g.psi << " chi=" << g.chi << " varphi=" << g.varphi
            << " nu=" << g.nu << " varsigma^2=" << g.varsigma_sq
            << "\nalpha_max = " << b.alpha_max << "\n\n"
            << "alpha_bar        beta_max       rho(M at beta/2)\n";
  std::ostringstream rows;
  rows << "alpha_bar,beta_max,rho\n";
  for (double frac : {0.1, 0.25, 0.5, 0.75, 0.9}) {
    const double a = frac * b.alpha_max;
    const double bm = b.beta_max(a);
    const auto sys = dsgt::composite_system(g, a, bm / 2.0);
    const double rho = dsgt::spectral_radius(sys.M).rho;
    std::cout << a << "  " << bm << "  " << rho << "\n";
    rows << a << ',' << bm << ',' << rho << '\n';
  }
  if (!csv.empty()) {
    std::ofstream out(csv);
    out << rows.str();
    std::cout << "\nwrote " << csv << "\n";
  }
  return 0;
}

int cmd_validate(const std::string& config) {
  dsgt::ConfigResult cr = dsgt::load_config(config);
  if (!cr.ok()) {
    for (const auto& v : cr.violations) std::cerr << "config: " << v << "\n";
    return 1;
  }
  const dsgt::ExperimentConfig& cfg = cr.cfg;
  int failures = 0;
  auto check = [&](bool ok, const std::string& what) {
    std::cout << (ok ? "pass  " : "FAIL  ") << what << "\n";
    if (!ok) ++failures;
  };

  dsgt::DigraphSeq seq = dsgt::generate_sequence(
      cfg.n, static_cast<int>(cfg.horizon), cfg.graph, cfg.seed);
  bool connected = true;
  if (cfg.graph.mode == dsgt::GraphMode::CPeriodic) {
    for (int k = 0; k + cfg.graph.c_period <= seq.horizon(); ++k)
      connected = connected &&
                  dsgt::is_strongly_connected(
                      dsgt::union_graph(seq, k, cfg.graph.c_period));
    check(connected, "every c_period-window union strongly connected");
  } else {
    for (const auto& g : seq.graphs)
      connected = connected && dsgt::is_strongly_connected(g);
    check(connected, "every graph strongly connected");
  }
  bool loops = true;
  for (const auto& g : seq.graphs) loops = loops && g.has_all_self_loops();
  check(loops, "self-loops everywhere");

  auto pairs = dsgt::build_mixing_sequence(seq, cfg.mixing);
  bool mix_ok = true;
  for (int k = 0; k < seq.horizon(); ++k)
    mix_ok = mix_ok && dsgt::validate_mixing(pairs[k], seq.graphs[k]).ok();
  check(mix_ok, "mixing stochasticity, alignment and floors");

  auto pi = dsgt::pi_sequence(dsgt::b_matrices(pairs));
  auto phi = dsgt::phi_sequence(dsgt::a_matrices(pairs));
  auto [a, bfloor] = dsgt::sequence_floors(pairs);
  auto [phi_floor, pi_floor] = dsgt::flow_floor(a, bfloor, cfg.n);
  check(pi.min_entry() >= pi_floor, "pi flow respects the b^n/n floor");
  check(phi.min_entry() >= phi_floor, "phi flow respects the a^n/n floor");
  double worst = 0.0;
  for (double r : phi.residuals) worst = std::max(worst, r);
  check(worst <= 1e-10, "phi recursion residual <= 1e-10");

  std::cout << (failures == 0 ? "all checks passed\n"
                              : std::to_string(failures) + " check(s) failed\n");
  return failures == 0 ? 0 : 1;
}

int cmd_sweep(const std::string& config, std::vector<double> alpha_grid,
              std::vector<double> beta_grid, const std::string& out) {
  dsgt::ExperimentConfig cfg = dsgt::load_config_or_throw(config);
  if (cfg.algorithm != dsgt::Algorithm::DsgtmTv)
    throw std::runtime_error("sweep: config must use the dsgtm-tv algorithm");
  dsgt::PreparedExperiment prep = dsgt::prepare_experiment(cfg);
  dsgt::GlobalConstants g = dsgt::prepared_constants(prep);

  std::ostringstream rows;
  rows << "alpha,beta,rho,final_opt_gap\n";
  for (double a : alpha_grid)
    for (double b : beta_grid) {
      double rho = std::numeric_limits<double>::quiet_NaN();
      try {
        const auto sys = dsgt::composite_system(g, a, b);
        rho = dsgt::spectral_radius(sys.M).rho;
      } catch (const std::exception&) {
        // alpha outside the admissible range; rho stays NaN
      }
      dsgt::PreparedExperiment p = prep;
      p.cfg.alpha = a;
      p.cfg.beta = b;
      p.cfg.alpha_multipliers.clear();
      p.cfg.beta_multipliers.clear();
      const dsgt::RunRecord rec = dsgt::run_one(p, cfg.seed);
      rows << a << ',' << b << ',' << rho << ','
           << rec.errors.back().opt_gap << '\n';
    }
  if (out.empty()) {
    std::cout << rows.str();
  } else {
    std::ofstream os(out);
    os << rows.str();
    std::cout << "wrote " << out << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"decentralized gradient-tracking simulator"};
  app.require_subcommand(1);

  std::string config, out, csv;
  std::optional<std::uint64_t> seed;
  std::vector<double> alpha_grid, beta_grid;

  auto* run = app.add_subcommand("run", "execute an experiment");
  run->add_option("--config", config, "config file")->required();
  run->add_option("--seed", seed, "override the master seed");
  run->add_option("--out", out, "override the output directory");

  auto* bounds = app.add_subcommand("bounds", "print the stepsize bounds");
  bounds->add_option("--config", config, "config file")->required();
  bounds->add_option("--csv", csv, "also write the table as CSV");

  auto* validate =
      app.add_subcommand("validate", "check graph/mixing/flow invariants");
  validate->add_option("--config", config, "config file")->required();

  auto* sweep = app.add_subcommand("sweep", "grid of rho(M) and final error");
  sweep->add_option("--config", config, "config file")->required();
  sweep->add_option("--alpha-grid", alpha_grid, "alpha values")
      ->required()
      ->delimiter(',');
  sweep->add_option("--beta-grid", beta_grid, "beta values")
      ->required()
      ->delimiter(',');
  sweep->add_option("--out", out, "CSV output path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(config, seed, out);
    if (bounds->parsed()) return cmd_bounds(config, csv);
    if (validate->parsed()) return cmd_validate(config);
    if (sweep->parsed()) return cmd_sweep(config, alpha_grid, beta_grid, out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
