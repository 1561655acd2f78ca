#include "dsgt/problems.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include "dsgt/rng.hpp"

namespace dsgt {

int ProblemSpec::model_dim() const {
  if (!data) throw std::logic_error("ProblemSpec: no dataset");
  return kind == ProblemKind::LogisticL2 ? data->dim() + 1 : data->dim();
}

std::pair<double, Eigen::VectorXd> loss_and_grad(
    const Eigen::VectorXd& x, const std::vector<int>& batch,
    const ProblemSpec& spec) {
  if (batch.empty()) throw std::invalid_argument("loss_and_grad: empty batch");
  if (!x.allFinite()) throw std::invalid_argument("loss_and_grad: x not finite");
  const Dataset& ds = *spec.data;
  const double inv_m = 1.0 / static_cast<double>(batch.size());

  if (spec.kind == ProblemKind::Quadratic) {
    double loss = 0.0;
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(x.size());
    for (int j : batch) {
      Eigen::VectorXd d = x - ds.features.row(j).transpose();
      loss += 0.5 * d.squaredNorm();
      grad += d;
    }
    return {loss * inv_m, grad * inv_m};
  }

  // logistic-l2, x = [bias; weights]
  const Eigen::VectorXd w = x.tail(x.size() - 1);
  const double x0 = x(0);
  double loss = 0.0;
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(x.size());
  for (int j : batch) {
    const double margin = (ds.features.row(j) * w)(0) + x0;
    const double z = -margin * ds.labels(j);
    // stable ln(1+exp(z))
    loss += z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
    const double s = 1.0 / (1.0 + std::exp(-z));  // sigmoid(z)
    const double coeff = -ds.labels(j) * s;
    grad(0) += coeff;
    grad.tail(x.size() - 1) += coeff * ds.features.row(j).transpose();
  }
  loss *= inv_m;
  grad *= inv_m;
  loss += 0.5 * spec.lambda * x.squaredNorm();
  grad += spec.lambda * x;
  return {loss, grad};
}

Eigen::VectorXd local_gradient(int agent, const Eigen::VectorXd& x,
                               const ProblemSpec& spec) {
  return loss_and_grad(x, spec.partitions.at(agent), spec).second;
}

double local_loss(int agent, const Eigen::VectorXd& x,
                  const ProblemSpec& spec) {
  return loss_and_grad(x, spec.partitions.at(agent), spec).first;
}

Eigen::VectorXd sample_gradient(int agent, const Eigen::VectorXd& x,
                                const OracleConfig& cfg,
                                const ProblemSpec& spec, std::uint64_t seed,
                                std::uint64_t iteration) {
  const auto& part = spec.partitions.at(agent);
  switch (cfg.mode) {
    case OracleMode::Exact:
      return local_gradient(agent, x, spec);
    case OracleMode::Minibatch: {
      int bs = cfg.batch_size;
      if (bs > static_cast<int>(part.size())) {
        std::cerr << "warning: batch size " << bs << " clamped to local size "
                  << part.size() << "\n";
        bs = static_cast<int>(part.size());
      }
      auto rng = substream(seed, 0x6f7261636cULL, agent, iteration);
      std::uniform_int_distribution<int> pick(0,
                                              static_cast<int>(part.size()) - 1);
      std::vector<int> batch(bs);
      for (int t = 0; t < bs; ++t) batch[t] = part[pick(rng)];
      return loss_and_grad(x, batch, spec).second;
    }
    case OracleMode::ExactPlusNoise: {
      Eigen::VectorXd g = local_gradient(agent, x, spec);
      if (cfg.sigma > 0.0) {
        auto rng = substream(seed, 0x6f7261636cULL, agent, iteration);
        std::normal_distribution<double> gauss(
            0.0, cfg.sigma / std::sqrt(double(g.size())));
        for (Eigen::Index t = 0; t < g.size(); ++t) g(t) += gauss(rng);
      }
      return g;
    }
  }
  throw std::logic_error("sample_gradient: unknown mode");
}

std::vector<std::vector<int>> partition(const Dataset& ds, int n,
                                        PartitionScheme scheme,
                                        std::uint64_t seed) {
  const int m = static_cast<int>(ds.train_idx.size());
  if (n < 1 || n > m)
    throw std::invalid_argument("partition: need 1 <= n <= train size");
  std::vector<int> order = ds.train_idx;
  if (scheme == PartitionScheme::Iid) {
    auto rng = substream(seed, 0x70617274ULL);
    std::shuffle(order.begin(), order.end(), rng);
  } else {
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return ds.labels(a) < ds.labels(b);
    });
  }
  std::vector<std::vector<int>> parts(n);
  // near-equal contiguous shards
  int base = m / n, extra = m % n, pos = 0;
  for (int i = 0; i < n; ++i) {
    int size = base + (i < extra ? 1 : 0);
    parts[i].assign(order.begin() + pos, order.begin() + pos + size);
    pos += size;
  }
  return parts;
}

namespace {

// Global cost f = (1/n) sum_i f_i; with unequal shards this is not the plain
// sample mean, so evaluate per agent.
std::pair<double, Eigen::VectorXd> global_loss_grad(const Eigen::VectorXd& x,
                                                    const ProblemSpec& spec) {
  const int n = spec.num_agents();
  double loss = 0.0;
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(x.size());
  for (int i = 0; i < n; ++i) {
    auto [li, gi] = loss_and_grad(x, spec.partitions[i], spec);
    loss += li;
    grad += gi;
  }
  return {loss / n, grad / n};
}

}  // namespace

std::pair<Eigen::VectorXd, double> solve_reference(const ProblemSpec& spec,
                                                   double tol, int max_iter) {
  if (spec.partitions.empty())
    throw std::invalid_argument("solve_reference: no partitions");
  const int d = spec.model_dim();

  if (spec.kind == ProblemKind::Quadratic) {
    // Minimizer of the average of quadratics: mean of per-agent mean centers.
    Eigen::VectorXd x = Eigen::VectorXd::Zero(d);
    for (const auto& part : spec.partitions) {
      Eigen::VectorXd c = Eigen::VectorXd::Zero(d);
      for (int j : part) c += spec.data->features.row(j).transpose();
      x += c / double(part.size());
    }
    x /= double(spec.partitions.size());
    auto [f, g] = global_loss_grad(x, spec);
    return {x, f};
  }

  if (spec.mu <= 0.0 && spec.lambda <= 0.0)
    throw std::invalid_argument("solve_reference: problem not strongly convex");

  // Damped Newton on the global logistic cost. The Hessian is assembled from
  // per-agent weighted sample contributions.
  const Dataset& ds = *spec.data;
  const int n = spec.num_agents();
  const int p = ds.dim();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(d);
  for (int it = 0; it < max_iter; ++it) {
    auto [f, g] = global_loss_grad(x, spec);
    if (g.lpNorm<Eigen::Infinity>() <= tol && g.norm() <= tol) return {x, f};
    Eigen::MatrixXd H = spec.lambda * Eigen::MatrixXd::Identity(d, d);
    const Eigen::VectorXd w = x.tail(p);
    for (int i = 0; i < n; ++i) {
      const double wt = 1.0 / (double(n) * double(spec.partitions[i].size()));
      for (int j : spec.partitions[i]) {
        const double margin = (ds.features.row(j) * w)(0) + x(0);
        const double s = 1.0 / (1.0 + std::exp(-margin * ds.labels(j)));
        const double curv = wt * s * (1.0 - s);
        Eigen::VectorXd bt(d);
        bt(0) = 1.0;
        bt.tail(p) = ds.features.row(j).transpose();
        H.selfadjointView<Eigen::Lower>().rankUpdate(bt, curv);
      }
    }
    Eigen::VectorXd step =
        H.selfadjointView<Eigen::Lower>().llt().solve(g);
    // backtracking on the global loss
    double t = 1.0;
    auto fx = f;
    for (int bs = 0; bs < 60; ++bs) {
      auto [fn, gn] = global_loss_grad(x - t * step, spec);
      if (fn <= fx - 1e-4 * t * g.dot(step)) {
        x -= t * step;
        break;
      }
      t *= 0.5;
      if (bs == 59) x -= t * step;
    }
  }
  auto [f, g] = global_loss_grad(x, spec);
  if (g.norm() > tol)
    throw std::runtime_error("solve_reference: no convergence, |g|=" +
                             std::to_string(g.norm()));
  return {x, f};
}

std::pair<double, double> estimate_L_mu(const ProblemSpec& spec) {
  if (spec.kind == ProblemKind::Quadratic) return {1.0, 1.0};
  const Dataset& ds = *spec.data;
  // L = lambda + lam_max((1/4m) sum bb'), b = [1; features]. Power iteration
  // via matrix-free products with the augmented design matrix.
  const int m = static_cast<int>(ds.train_idx.size());
  const int d = ds.dim() + 1;
  auto rng = substream(0x4c6d75ULL, d, m);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXd v(d);
  for (int t = 0; t < d; ++t) v(t) = gauss(rng);
  v.normalize();
  double lam = 0.0;
  for (int it = 0; it < 500; ++it) {
    Eigen::VectorXd u = Eigen::VectorXd::Zero(d);
    for (int j : ds.train_idx) {
      double dot = v(0) + (ds.features.row(j) * v.tail(d - 1))(0);
      u(0) += dot;
      u.tail(d - 1) += dot * ds.features.row(j).transpose();
    }
    u /= (4.0 * m);
    const double next = u.norm();
    v = u / next;
    if (std::abs(next - lam) <= 1e-12 * std::max(1.0, next) && it > 3) {
      lam = next;
      break;
    }
    lam = next;
  }
  return {spec.lambda + lam, spec.lambda};
}

Dataset make_synthetic_gauss(int dim, int m_train, int m_test,
                             double mean_shift, std::uint64_t seed) {
  auto rng = substream(seed, 0x67617573ULL);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXd u(dim);
  for (int t = 0; t < dim; ++t) u(t) = gauss(rng);
  u.normalize();
  const int m = m_train + m_test;
  Dataset ds;
  ds.features.resize(m, dim);
  ds.labels.resize(m);
  for (int j = 0; j < m; ++j) {
    const double label = (j % 2 == 0) ? 1.0 : -1.0;
    for (int t = 0; t < dim; ++t)
      ds.features(j, t) = label * mean_shift * u(t) + gauss(rng);
    ds.labels(j) = label;
  }
  ds.train_idx.resize(m_train);
  std::iota(ds.train_idx.begin(), ds.train_idx.end(), 0);
  ds.test_idx.resize(m_test);
  std::iota(ds.test_idx.begin(), ds.test_idx.end(), m_train);
  return ds;
}

Dataset make_quadratic_centers(int dim, int m, double separation,
                               std::uint64_t seed) {
  auto rng = substream(seed, 0x71756164ULL);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXd u(dim);
  for (int t = 0; t < dim; ++t) u(t) = gauss(rng);
  u.normalize();
  Dataset ds;
  ds.features.resize(m, dim);
  ds.labels.resize(m);
  for (int j = 0; j < m; ++j) {
    const double label = (j % 2 == 0) ? 1.0 : -1.0;
    for (int t = 0; t < dim; ++t)
      ds.features(j, t) = label * 0.5 * separation * u(t) + 0.25 * gauss(rng);
    ds.labels(j) = label;
  }
  ds.train_idx.resize(m);
  std::iota(ds.train_idx.begin(), ds.train_idx.end(), 0);
  return ds;
}

Dataset load_csv(const std::string& path, int m_train) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_csv: cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
    if (!rows.empty() && row.size() != rows.front().size())
      throw std::runtime_error("load_csv: ragged row in " + path);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("load_csv: empty file " + path);
  const int m = static_cast<int>(rows.size());
  const int p = static_cast<int>(rows.front().size()) - 1;
  Dataset ds;
  ds.features.resize(m, p);
  ds.labels.resize(m);
  for (int j = 0; j < m; ++j) {
    ds.labels(j) = rows[j][0] > 0 ? 1.0 : -1.0;
    for (int t = 0; t < p; ++t) ds.features(j, t) = rows[j][t + 1];
  }
  m_train = std::min(m_train, m);
  ds.train_idx.resize(m_train);
  std::iota(ds.train_idx.begin(), ds.train_idx.end(), 0);
  ds.test_idx.resize(m - m_train);
  std::iota(ds.test_idx.begin(), ds.test_idx.end(), m_train);
  return ds;
}

namespace {
std::uint32_t read_be32(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  return (std::uint32_t(b[0]) << 24) | (std::uint32_t(b[1]) << 16) |
         (std::uint32_t(b[2]) << 8) | std::uint32_t(b[3]);
}
}  // namespace

Dataset load_mnist_idx(const std::string& images_path,
                       const std::string& labels_path, int digit_pos,
                       int digit_neg, int m_train, int m_test) {
  std::ifstream imgs(images_path, std::ios::binary);
  std::ifstream labs(labels_path, std::ios::binary);
  if (!imgs || !labs)
    throw std::runtime_error("load_mnist_idx: cannot open idx files");
  if (read_be32(imgs) != 0x803 || read_be32(labs) != 0x801)
    throw std::runtime_error("load_mnist_idx: bad magic");
  const int m_img = static_cast<int>(read_be32(imgs));
  const int m_lab = static_cast<int>(read_be32(labs));
  if (m_img != m_lab) throw std::runtime_error("load_mnist_idx: count mismatch");
  const int rows = static_cast<int>(read_be32(imgs));
  const int cols = static_cast<int>(read_be32(imgs));
  const int p = rows * cols;
  const int want = m_train + m_test;
  Dataset ds;
  ds.features.resize(want, p);
  ds.labels.resize(want);
  std::vector<unsigned char> buf(p);
  int kept = 0;
  for (int j = 0; j < m_img && kept < want; ++j) {
    imgs.read(reinterpret_cast<char*>(buf.data()), p);
    char lab;
    labs.read(&lab, 1);
    if (lab != digit_pos && lab != digit_neg) continue;
    for (int t = 0; t < p; ++t)
      ds.features(kept, t) = double(buf[t]) / 255.0;
    ds.labels(kept) = (lab == digit_pos) ? 1.0 : -1.0;
    ++kept;
  }
  if (kept < want)
    throw std::runtime_error("load_mnist_idx: not enough samples of digits");
  ds.train_idx.resize(m_train);
  std::iota(ds.train_idx.begin(), ds.train_idx.end(), 0);
  ds.test_idx.resize(m_test);
  std::iota(ds.test_idx.begin(), ds.test_idx.end(), m_train);
  return ds;
}

}  // namespace dsgt
