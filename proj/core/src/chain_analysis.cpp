#include "osplab/chain_analysis.hpp"

#include <boost/graph/adjacency_list.hpp>
#include <boost/graph/strong_components.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <sstream>
#include <vector>

namespace osplab {
namespace {

using Graph = boost::adjacency_list<boost::vecS, boost::vecS, boost::directedS>;

Graph support_graph(const Eigen::MatrixXd& m) {
  const auto n = static_cast<std::size_t>(m.rows());
  Graph g(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) > 0.0) {
        boost::add_edge(i, j, g);
      }
    }
  }
  return g;
}

struct ClassStructure {
  std::vector<int> component;         // per-state SCC id
  std::vector<int> closed_components;  // SCC ids with no outgoing edge
};

ClassStructure communicating_classes(const Eigen::MatrixXd& m) {
  const Graph g = support_graph(m);
  ClassStructure out;
  out.component.resize(boost::num_vertices(g));
  const int count = boost::strong_components(
      g, boost::make_iterator_property_map(out.component.begin(),
                                           boost::get(boost::vertex_index, g)));
  std::vector<bool> closed(static_cast<std::size_t>(count), true);
  for (auto [e, end] = boost::edges(g); e != end; ++e) {
    const auto u = boost::source(*e, g);
    const auto v = boost::target(*e, g);
    if (out.component[u] != out.component[v]) {
      closed[static_cast<std::size_t>(out.component[u])] = false;
    }
  }
  for (int c = 0; c < count; ++c) {
    if (closed[static_cast<std::size_t>(c)]) out.closed_components.push_back(c);
  }
  return out;
}

// gcd of (level[u] + 1 - level[v]) over edges inside the class.
std::size_t class_period(const Eigen::MatrixXd& m, const std::vector<int>& component, int cls) {
  const auto n = static_cast<std::size_t>(m.rows());
  std::vector<long> level(n, -1);
  std::size_t root = 0;
  while (component[root] != cls) ++root;
  level[root] = 0;
  std::queue<std::size_t> frontier;
  frontier.push(root);
  long g = 0;
  while (!frontier.empty()) {
    const auto u = frontier.front();
    frontier.pop();
    for (std::size_t v = 0; v < n; ++v) {
      if (component[v] != cls) continue;
      if (!(m(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(v)) > 0.0)) continue;
      if (level[v] < 0) {
        level[v] = level[u] + 1;
        frontier.push(v);
      } else {
        g = std::gcd(g, std::labs(level[u] + 1 - level[v]));
      }
    }
  }
  return g == 0 ? 1 : static_cast<std::size_t>(g);
}

}  // namespace

TransitionMatrix::TransitionMatrix(Eigen::MatrixXd rows) : rows_(std::move(rows)) {
  if (rows_.rows() == 0 || rows_.rows() != rows_.cols()) {
    throw std::invalid_argument("transition matrix must be square and non-empty");
  }
  for (Eigen::Index s = 0; s < rows_.rows(); ++s) {
    for (Eigen::Index t = 0; t < rows_.cols(); ++t) {
      const double p = rows_(s, t);
      if (!(p >= 0.0 && p <= 1.0)) {
        std::ostringstream msg;
        msg << "transition entry (" << s << "," << t << ") = " << p << " outside [0,1]";
        throw std::invalid_argument(msg.str());
      }
    }
    if (std::abs(rows_.row(s).sum() - 1.0) > kProbabilityTolerance) {
      std::ostringstream msg;
      msg << "transition row " << s << " sums to " << rows_.row(s).sum();
      throw std::invalid_argument(msg.str());
    }
  }
}

Distribution::Distribution(Eigen::VectorXd mass) : mass_(std::move(mass)) {
  if (mass_.size() == 0) throw std::invalid_argument("distribution must be non-empty");
  for (Eigen::Index s = 0; s < mass_.size(); ++s) {
    if (!(mass_(s) >= 0.0 && mass_(s) <= 1.0)) {
      throw std::invalid_argument("distribution entry outside [0,1]");
    }
  }
  if (std::abs(mass_.sum() - 1.0) > kProbabilityTolerance) {
    throw std::invalid_argument("distribution does not sum to 1");
  }
}

double tv_distance(const Distribution& p, const Distribution& q) {
  if (p.size() != q.size()) throw std::invalid_argument("tv_distance: dimension mismatch");
  return 0.5 * (p.mass() - q.mass()).cwiseAbs().sum();
}

Distribution stationary_distribution(const TransitionMatrix& P) {
  const auto& m = P.matrix();
  const Eigen::Index n = m.rows();

  const ClassStructure classes = communicating_classes(m);
  if (classes.closed_components.size() != 1) {
    throw NotUniquelyErgodic("not uniquely ergodic: " +
                             std::to_string(classes.closed_components.size()) +
                             " recurrent classes");
  }
  const int recurrent = classes.closed_components.front();

  // Balance equations (P^T - I) mu = 0 with the last one replaced by sum(mu) = 1.
  Eigen::MatrixXd system = m.transpose() - Eigen::MatrixXd::Identity(n, n);
  system.row(n - 1).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  rhs(n - 1) = 1.0;
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(system);
  if (!lu.isInvertible()) throw NotUniquelyErgodic("not uniquely ergodic: singular balance system");
  Eigen::VectorXd mu = lu.solve(rhs);

  // Transient states carry exactly zero mass.
  for (Eigen::Index s = 0; s < n; ++s) {
    if (classes.component[static_cast<std::size_t>(s)] != recurrent || mu(s) < 0.0) mu(s) = 0.0;
  }
  mu /= mu.sum();

  const double residual = (mu.transpose() * m - mu.transpose()).cwiseAbs().sum();
  if (residual > 1e-10) {
    throw NotUniquelyErgodic("stationary residual " + std::to_string(residual) + " exceeds 1e-10");
  }
  return Distribution(std::move(mu));
}

double worst_start_tv(const TransitionMatrix& P, const Distribution& mu, int n) {
  if (n < 0) throw std::invalid_argument("worst_start_tv: negative step count");
  const Eigen::Index size = static_cast<Eigen::Index>(P.size());
  Eigen::MatrixXd power = Eigen::MatrixXd::Identity(size, size);
  for (int i = 0; i < n; ++i) power = power * P.matrix();
  double worst = 0.0;
  for (Eigen::Index s = 0; s < size; ++s) {
    worst = std::max(worst, 0.5 * (power.row(s).transpose() - mu.mass()).cwiseAbs().sum());
  }
  return worst;
}

int mixing_time(const TransitionMatrix& P, const Distribution& mu, int cap) {
  if (cap < 1) throw std::invalid_argument("mixing_time: cap must be >= 1");
  if (P.size() != mu.size()) throw std::invalid_argument("mixing_time: dimension mismatch");
  Eigen::MatrixXd power = P.matrix();
  for (int n = 1; n <= cap; ++n) {
    double worst = 0.0;
    for (Eigen::Index s = 0; s < power.rows(); ++s) {
      worst = std::max(worst, 0.5 * (power.row(s).transpose() - mu.mass()).cwiseAbs().sum());
    }
    if (worst <= 0.25 + kMixingSlack) return n;
    power = power * P.matrix();
  }
  throw MixingExceedsCap("mixing exceeds cap of " + std::to_string(cap) + " steps");
}

double pseudo_spectral_gap(const TransitionMatrix& P, const Distribution& mu, int k_max) {
  if (k_max < 1) throw std::invalid_argument("pseudo_spectral_gap: k_max must be >= 1");
  if (P.size() != mu.size()) throw std::invalid_argument("pseudo_spectral_gap: dimension mismatch");

  std::vector<Eigen::Index> support;
  for (Eigen::Index s = 0; s < static_cast<Eigen::Index>(mu.size()); ++s) {
    if (mu.mass()(s) > 0.0) support.push_back(s);
  }
  const auto m = static_cast<Eigen::Index>(support.size());
  Eigen::MatrixXd restricted(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    double kept = 0.0;
    for (Eigen::Index j = 0; j < m; ++j) {
      restricted(i, j) = P.matrix()(support[static_cast<std::size_t>(i)],
                                    support[static_cast<std::size_t>(j)]);
      kept += restricted(i, j);
    }
    if (std::abs(kept - 1.0) > 1e-9) {
      throw std::domain_error("pseudo_spectral_gap: zero stationary mass on a reachable state");
    }
  }
  if (m == 1) return 1.0;

  // In L2(mu), (P*)^k P^k is similar to B^T B with B = D^{1/2} P^k D^{-1/2},
  // so its spectrum is the squared singular values of B.
  Eigen::VectorXd sqrt_mu(m);
  for (Eigen::Index i = 0; i < m; ++i) sqrt_mu(i) = std::sqrt(mu.mass()(support[static_cast<std::size_t>(i)]));
  const Eigen::VectorXd inv_sqrt_mu = sqrt_mu.cwiseInverse();

  double best = 0.0;
  Eigen::MatrixXd power = restricted;
  for (int k = 1; k <= k_max; ++k) {
    const Eigen::MatrixXd b = sqrt_mu.asDiagonal() * power * inv_sqrt_mu.asDiagonal();
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(b);
    const double second = svd.singularValues()(1);
    const double gap = std::clamp(1.0 - second * second, 0.0, 1.0);
    best = std::max(best, gap / k);
    power = power * restricted;
  }
  return best;
}

ErgodicityReport validate_uniform_ergodicity(const TransitionMatrix& P) {
  const ClassStructure classes = communicating_classes(P.matrix());
  ErgodicityReport report;
  report.recurrent_classes = classes.closed_components.size();
  if (report.recurrent_classes != 1) {
    report.violation = ErgodicityViolation::multiple_recurrent_classes;
    report.message = std::to_string(report.recurrent_classes) + " recurrent classes";
    return report;
  }
  report.period = class_period(P.matrix(), classes.component, classes.closed_components.front());
  if (report.period > 1) {
    report.violation = ErgodicityViolation::periodic;
    report.message = "recurrent class has period " + std::to_string(report.period);
  }
  return report;
}

ChainAnalysis analyze_chain(const TransitionMatrix& P, const Eigen::VectorXd& rewards,
                            int mixing_cap, int gap_k_max) {
  if (static_cast<std::size_t>(rewards.size()) != P.size()) {
    throw std::invalid_argument("analyze_chain: reward vector size mismatch");
  }
  Distribution mu = stationary_distribution(P);
  const int t_mix = mixing_time(P, mu, mixing_cap);
  const double beta = pseudo_spectral_gap(P, mu, gap_k_max > 0 ? gap_k_max : 2 * t_mix);
  const double rho = mu.mass().dot(rewards);
  return ChainAnalysis{std::move(mu), t_mix, beta, rho};
}

}  // namespace osplab
