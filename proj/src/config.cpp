#include "dsgt/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace dsgt {
namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

struct KvFile {
  // key "section.name" -> value
  std::map<std::string, std::string> values;
  std::string raw;
};

KvFile parse_kv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  KvFile f;
  std::ostringstream rawbuf;
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    rawbuf << line << '\n';
    std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']')
        throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                 ": malformed section header");
      section = lower(trim(t.substr(1, t.size() - 2)));
      continue;
    }
    auto eq = t.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": expected key = value");
    std::string key = lower(trim(t.substr(0, eq)));
    std::string val = trim(t.substr(eq + 1));
    if (key.empty())
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": empty key");
    f.values[section.empty() ? key : section + "." + key] = val;
  }
  f.raw = rawbuf.str();
  return f;
}

class Reader {
public:
  Reader(const KvFile& f, std::vector<std::string>& violations)
      : f_(f), violations_(violations) {}

  bool has(const std::string& key) const { return f_.values.count(key) > 0; }

  std::string str(const std::string& key, const std::string& def) {
    auto it = f_.values.find(key);
    return it == f_.values.end() ? def : it->second;
  }

  double num(const std::string& key, double def) {
    auto it = f_.values.find(key);
    if (it == f_.values.end()) return def;
    try {
      size_t pos = 0;
      double v = std::stod(it->second, &pos);
      if (pos != it->second.size()) throw std::invalid_argument("");
      return v;
    } catch (const std::exception&) {
      violations_.push_back(key + ": not a number: " + it->second);
      return def;
    }
  }

  long integer(const std::string& key, long def) {
    double v = num(key, double(def));
    long l = static_cast<long>(v);
    if (double(l) != v) violations_.push_back(key + ": not an integer");
    return l;
  }

  bool flag(const std::string& key, bool def) {
    std::string v = lower(str(key, def ? "true" : "false"));
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    violations_.push_back(key + ": not a boolean: " + v);
    return def;
  }

  std::vector<double> numbers(const std::string& key) {
    std::vector<double> out;
    auto it = f_.values.find(key);
    if (it == f_.values.end()) return out;
    std::istringstream ss(it->second);
    std::string tok;
    while (ss >> tok) {
      try {
        out.push_back(std::stod(tok));
      } catch (const std::exception&) {
        violations_.push_back(key + ": not a number: " + tok);
      }
    }
    return out;
  }

  void violation(const std::string& msg) { violations_.push_back(msg); }

private:
  const KvFile& f_;
  std::vector<std::string>& violations_;
};

}  // namespace

ConfigResult load_config(const std::string& path) {
  KvFile file = parse_kv(path);
  ConfigResult res;
  ExperimentConfig& c = res.cfg;
  Reader r(file, res.violations);
  c.echo = file.raw;

  const std::string algo = lower(r.str("experiment.algorithm", "dsgtm-tv"));
  if (algo == "dsgtm-tv")
    c.algorithm = Algorithm::DsgtmTv;
  else if (algo == "dsgt")
    c.algorithm = Algorithm::Dsgt;
  else if (algo == "dsgd")
    c.algorithm = Algorithm::Dsgd;
  else
    r.violation("experiment.algorithm: unknown value " + algo);

  c.horizon = r.integer("experiment.horizon", 100);
  if (c.horizon < 1) r.violation("experiment.horizon: must be >= 1");
  c.cadence = static_cast<int>(r.integer("experiment.cadence", 1));
  if (c.cadence < 1) r.violation("experiment.cadence: must be >= 1");
  c.seed = static_cast<std::uint64_t>(r.integer("experiment.seed", 1));
  c.seed_count = static_cast<int>(r.integer("experiment.seed_count", 1));
  if (c.seed_count < 1) r.violation("experiment.seed_count: must be >= 1");
  c.output_dir = r.str("experiment.output", "out");
  c.plots = r.flag("experiment.plots", false);

  c.n = static_cast<int>(r.integer("graph.n", 1));
  if (c.n < 1) r.violation("graph.n: must be >= 1");
  const std::string mode = lower(r.str("graph.mode", "per-step-random"));
  if (mode == "static")
    c.graph.mode = GraphMode::Static;
  else if (mode == "per-step-random")
    c.graph.mode = GraphMode::PerStepRandom;
  else if (mode == "c-periodic")
    c.graph.mode = GraphMode::CPeriodic;
  else
    r.violation("graph.mode: unknown value " + mode);
  c.graph.density = r.num("graph.density", 0.3);
  if (c.graph.density < 0.0 || c.graph.density > 1.0)
    r.violation("graph.density: must be in [0,1]");
  c.graph.c_period = static_cast<int>(r.integer("graph.c_period", 1));
  if (c.graph.c_period < 1) r.violation("graph.c_period: must be >= 1");
  c.graph.symmetric = r.flag("graph.symmetric", false);
  c.graph_file = r.str("graph.file", "");

  const std::string rule = lower(r.str("mixing.rule", "uniform"));
  if (rule == "uniform")
    c.mixing.kind = WeightRule::Uniform;
  else if (rule == "random-stochastic")
    c.mixing.kind = WeightRule::RandomStochastic;
  else if (rule == "metropolis")
    c.mixing.kind = WeightRule::Metropolis;
  else
    r.violation("mixing.rule: unknown value " + rule);
  c.mixing.floor = r.num("mixing.floor", 0.05);
  c.mixing.seed = static_cast<std::uint64_t>(
      r.integer("mixing.seed", static_cast<long>(c.seed)));
  if (c.mixing.kind == WeightRule::RandomStochastic &&
      (c.mixing.floor <= 0.0 || c.mixing.floor > 1.0 / c.n))
    r.violation("mixing.floor: must be in (0, 1/n] for random-stochastic");

  const std::string kind = lower(r.str("problem.kind", "logistic-l2"));
  if (kind == "logistic-l2")
    c.problem_kind = ProblemKind::LogisticL2;
  else if (kind == "quadratic")
    c.problem_kind = ProblemKind::Quadratic;
  else
    r.violation("problem.kind: unknown value " + kind);
  c.lambda = r.num("problem.lambda", 0.0);
  if (c.lambda < 0.0) r.violation("problem.lambda: must be >= 0");
  c.dataset = lower(r.str("problem.dataset", "synthetic-gauss"));
  if (c.dataset != "synthetic-gauss" && c.dataset != "quadratic-centers" &&
      c.dataset != "csv" && c.dataset != "mnist")
    r.violation("problem.dataset: unknown value " + c.dataset);
  c.dataset_path = r.str("problem.path", "");
  if (c.dataset == "csv" && c.dataset_path.empty())
    r.violation("problem.path: required for csv datasets");
  c.mnist_images = r.str("problem.mnist_images", "");
  c.mnist_labels = r.str("problem.mnist_labels", "");
  c.mnist_pos = static_cast<int>(r.integer("problem.mnist_pos", 3));
  c.mnist_neg = static_cast<int>(r.integer("problem.mnist_neg", 5));
  c.dim = static_cast<int>(r.integer("problem.dim", 10));
  if (c.dim < 1) r.violation("problem.dim: must be >= 1");
  c.m_train = static_cast<int>(r.integer("problem.m_train", 200));
  c.m_test = static_cast<int>(r.integer("problem.m_test", 100));
  if (c.m_train < c.n)
    r.violation("problem.m_train: need at least one sample per agent");
  c.mean_shift = r.num("problem.mean_shift", 2.0);
  c.separation = r.num("problem.separation", 4.0);
  const std::string part = lower(r.str("problem.partition", "iid"));
  if (part == "iid")
    c.partition = PartitionScheme::Iid;
  else if (part == "label-sorted")
    c.partition = PartitionScheme::LabelSorted;
  else
    r.violation("problem.partition: unknown value " + part);

  const std::string om = lower(r.str("oracle.mode", "exact"));
  if (om == "exact")
    c.oracle.mode = OracleMode::Exact;
  else if (om == "minibatch")
    c.oracle.mode = OracleMode::Minibatch;
  else if (om == "exact-plus-noise")
    c.oracle.mode = OracleMode::ExactPlusNoise;
  else
    r.violation("oracle.mode: unknown value " + om);
  c.oracle.batch_size = static_cast<int>(r.integer("oracle.batch_size", 1));
  if (c.oracle.batch_size < 1) r.violation("oracle.batch_size: must be >= 1");
  c.oracle.sigma = r.num("oracle.sigma", 0.0);
  if (c.oracle.sigma < 0.0) r.violation("oracle.sigma: must be >= 0");

  c.alpha = r.num("stepsize.alpha", 0.01);
  c.beta = r.num("stepsize.beta", 0.0);
  if (c.alpha < 0.0) r.violation("stepsize.alpha: must be >= 0");
  if (c.beta < 0.0) r.violation("stepsize.beta: must be >= 0");
  c.alpha_multipliers = r.numbers("stepsize.alpha_multipliers");
  c.beta_multipliers = r.numbers("stepsize.beta_multipliers");
  if (!c.alpha_multipliers.empty() &&
      static_cast<int>(c.alpha_multipliers.size()) != c.n)
    r.violation("stepsize.alpha_multipliers: need n entries");
  if (!c.beta_multipliers.empty() &&
      static_cast<int>(c.beta_multipliers.size()) != c.n)
    r.violation("stepsize.beta_multipliers: need n entries");
  const std::string sched = lower(r.str("stepsize.schedule", "constant"));
  if (sched == "constant")
    c.schedule = AlphaSchedule::Constant;
  else if (sched == "one-over-k")
    c.schedule = AlphaSchedule::OneOverK;
  else
    r.violation("stepsize.schedule: unknown value " + sched);

  bool any_alpha = false;
  if (c.alpha > 0.0) {
    any_alpha = c.alpha_multipliers.empty();
    for (double m : c.alpha_multipliers)
      if (m > 0.0) any_alpha = true;
  }
  if (!any_alpha) r.violation("stepsize.alpha: at least one stepsize positive");

  if (c.algorithm != Algorithm::DsgtmTv) {
    if (c.graph.mode != GraphMode::Static)
      r.violation("graph.mode: dsgt/dsgd require a static graph");
    if (!c.graph.symmetric)
      r.violation("graph.symmetric: dsgt/dsgd require a symmetric graph");
    if (c.mixing.kind != WeightRule::Metropolis)
      r.violation("mixing.rule: dsgt/dsgd require the metropolis rule");
    if (c.algorithm == Algorithm::Dsgd && c.beta != 0.0)
      r.violation("stepsize.beta: dsgd has no momentum term");
  }
  if (c.dataset == "quadratic-centers" && c.problem_kind != ProblemKind::Quadratic)
    r.violation("problem.dataset: quadratic-centers requires kind = quadratic");

  return res;
}

ExperimentConfig load_config_or_throw(const std::string& path) {
  ConfigResult res = load_config(path);
  if (!res.ok()) {
    std::string msg = "invalid config " + path + ":";
    for (const auto& v : res.violations) msg += "\n  " + v;
    throw std::runtime_error(msg);
  }
  return res.cfg;
}

Eigen::VectorXd resolve_alphas(const ExperimentConfig& cfg) {
  Eigen::VectorXd a = Eigen::VectorXd::Constant(cfg.n, cfg.alpha);
  for (size_t i = 0; i < cfg.alpha_multipliers.size(); ++i)
    a(static_cast<Eigen::Index>(i)) *= cfg.alpha_multipliers[i];
  return a;
}

Eigen::VectorXd resolve_betas(const ExperimentConfig& cfg) {
  Eigen::VectorXd b = Eigen::VectorXd::Constant(cfg.n, cfg.beta);
  for (size_t i = 0; i < cfg.beta_multipliers.size(); ++i)
    b(static_cast<Eigen::Index>(i)) *= cfg.beta_multipliers[i];
  return b;
}

}  // namespace dsgt
