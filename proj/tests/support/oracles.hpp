#pragma once

// Independent reference computations used only by tests. Nothing here calls the
// code path it is used to check.

#include "osplab/chain_analysis.hpp"
#include "osplab/mdp_model.hpp"
#include "osplab/rng.hpp"
#include "osplab/sample_path.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

namespace oracle {

using Matrix = std::vector<std::vector<double>>;

inline Matrix to_rows(const osplab::TransitionMatrix& P) {
  Matrix rows(P.size(), std::vector<double>(P.size()));
  for (std::size_t i = 0; i < P.size(); ++i)
    for (std::size_t j = 0; j < P.size(); ++j) rows[i][j] = P(i, j);
  return rows;
}

/// Distribution after `steps` steps from the uniform start, averaged over the last
/// half of the iterates (Cesaro) so periodic chains also converge.
inline std::vector<double> power_iteration(const osplab::TransitionMatrix& P, int steps = 10000) {
  const auto rows = to_rows(P);
  const std::size_t n = rows.size();
  std::vector<double> x(n, 1.0 / static_cast<double>(n)), next(n), avg(n, 0.0);
  int counted = 0;
  for (int it = 0; it < steps; ++it) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) next[j] += x[i] * rows[i][j];
    x.swap(next);
    if (it >= steps / 2) {
      for (std::size_t j = 0; j < n; ++j) avg[j] += x[j];
      ++counted;
    }
  }
  for (auto& v : avg) v /= counted;
  return avg;
}

/// max_s d_TV(e_s P^n, mu), by propagating each point mass separately.
inline double worst_tv_by_propagation(const osplab::TransitionMatrix& P, const std::vector<double>& mu, int n) {
  const auto rows = to_rows(P);
  const std::size_t size = rows.size();
  double worst = 0.0;
  for (std::size_t s = 0; s < size; ++s) {
    std::vector<double> x(size, 0.0), next(size);
    x[s] = 1.0;
    for (int step = 0; step < n; ++step) {
      std::fill(next.begin(), next.end(), 0.0);
      for (std::size_t i = 0; i < size; ++i)
        for (std::size_t j = 0; j < size; ++j) next[j] += x[i] * rows[i][j];
      x.swap(next);
    }
    double tv = 0.0;
    for (std::size_t j = 0; j < size; ++j) tv += std::abs(x[j] - mu[j]);
    worst = std::max(worst, 0.5 * tv);
  }
  return worst;
}

/// Pseudo-spectral gap by building P* explicitly and taking the eigenvalues of the
/// (non-symmetric) matrix (P*)^k P^k with a general eigensolver. Requires mu > 0.
inline double pseudo_spectral_gap_dense(const osplab::TransitionMatrix& P, const std::vector<double>& mu,
                                        int k_max) {
  const auto n = static_cast<Eigen::Index>(P.size());
  Eigen::MatrixXd adj(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      adj(i, j) = mu[static_cast<std::size_t>(j)] * P.matrix()(j, i) / mu[static_cast<std::size_t>(i)];
  double best = 0.0;
  Eigen::MatrixXd pk = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd ak = Eigen::MatrixXd::Identity(n, n);
  for (int k = 1; k <= k_max; ++k) {
    pk = pk * P.matrix();
    ak = ak * adj;
    const Eigen::MatrixXd op = ak * pk;
    Eigen::EigenSolver<Eigen::MatrixXd> solver(op);
    std::vector<double> ev;
    for (Eigen::Index i = 0; i < n; ++i) ev.push_back(solver.eigenvalues()(i).real());
    std::sort(ev.rbegin(), ev.rend());
    const double second = n > 1 ? ev[1] : 0.0;
    best = std::max(best, (1.0 - second) / k);
  }
  return best;
}

/// Literal path construction with per-entry "used" marks and linear scans.
inline std::vector<std::size_t> reference_path(const osplab::ObservationLog& log, const osplab::Policy& pi,
                                               std::size_t start) {
  std::vector<bool> used(log.size(), false);
  std::vector<std::size_t> path;
  std::size_t state = start;
  for (;;) {
    std::size_t found = log.size();
    for (std::size_t pos = 0; pos < log.size(); ++pos) {
      if (!used[pos] && log[pos].s == state && log[pos].a == pi(state)) {
        found = pos;
        break;
      }
    }
    if (found == log.size()) break;
    used[found] = true;
    path.push_back(found);
    state = log[found].s_next;
  }
  return path;
}

inline osplab::ObservationLog random_log(std::mt19937_64& gen, std::size_t S, std::size_t A, std::size_t length) {
  osplab::ObservationLog log(S, A);
  std::uniform_int_distribution<std::size_t> state(0, S - 1), action(0, A - 1);
  std::uniform_int_distribution<int> bit(0, 1);
  std::size_t s = state(gen);
  for (std::size_t t = 0; t < length; ++t) {
    const std::size_t next = state(gen);
    log.append({s, action(gen), static_cast<double>(bit(gen)), next, t + 1});
    // Mostly contiguous trajectories, with occasional jumps.
    s = bit(gen) && bit(gen) ? state(gen) : next;
  }
  return log;
}

/// Random row-stochastic matrix with some zero entries. May or may not be ergodic.
inline osplab::TransitionMatrix random_chain(std::mt19937_64& gen, std::size_t n, double zero_prob) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::MatrixXd m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    double total = 0.0;
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      m(i, j) = u(gen) < zero_prob ? 0.0 : u(gen);
      total += m(i, j);
    }
    if (total == 0.0) {
      m(i, i) = 1.0;
      total = 1.0;
    }
    m.row(i) /= total;
    // Push rounding into the largest entry so the row sums to 1 tightly.
    Eigen::Index arg = 0;
    m.row(i).maxCoeff(&arg);
    m(i, arg) += 1.0 - m.row(i).sum();
  }
  return osplab::TransitionMatrix(m);
}

/// Validated random chains for property suites (deterministic in `seed`).
inline std::vector<osplab::TransitionMatrix> validated_chains(std::uint64_t seed, std::size_t count,
                                                              std::size_t max_size = 10) {
  std::mt19937_64 gen(seed);
  std::uniform_int_distribution<std::size_t> size(1, max_size);
  std::uniform_real_distribution<double> sparsity(0.0, 0.7);
  std::vector<osplab::TransitionMatrix> out;
  while (out.size() < count) {
    auto chain = random_chain(gen, size(gen), sparsity(gen));
    if (osplab::validate_uniform_ergodicity(chain).ok()) out.push_back(std::move(chain));
  }
  return out;
}

inline osplab::TransitionMatrix two_state(double a, double b) {
  Eigen::MatrixXd m(2, 2);
  m << 1.0 - a, a, b, 1.0 - b;
  return osplab::TransitionMatrix(m);
}

/// Closed form for a two-state chain: mu = (b, a) / (a + b).
inline std::vector<double> two_state_stationary(double a, double b) { return {b / (a + b), a / (a + b)}; }

/// Standalone phased UCB over A arms (S = 1 MDP). Replays the environment stream:
/// each pull consumes one draw for the (trivial) transition and one for the reward.
inline std::vector<std::size_t> phased_ucb_pulls(const std::vector<double>& means, std::uint64_t seed,
                                                 std::uint64_t horizon, double delta, int t_mix) {
  const std::size_t arms = means.size();
  std::vector<double> sums(arms, 0.0);
  std::vector<std::size_t> counts(arms, 0);
  std::vector<std::size_t> pulls;
  std::uint64_t counter = 0;
  const auto min_len = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(horizon) / arms) - 1e-12));
  while (pulls.size() < horizon) {
    const double t = static_cast<double>(pulls.size() + 1);
    std::size_t best = 0;
    double best_index = -std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < arms; ++a) {
      const double index = counts[a] == 0
                               ? std::numeric_limits<double>::infinity()
                               : sums[a] / counts[a] +
                                     std::sqrt(8.0 * t_mix * std::log(8.0 * t * horizon / delta) / counts[a]);
      if (index > best_index) {
        best_index = index;
        best = a;
      }
    }
    const std::size_t length = std::max(counts[best], min_len);
    for (std::size_t i = 0; i < length && pulls.size() < horizon; ++i) {
      ++counter;  // transition draw
      const double u = osplab::CounterRng::uniform_at(seed, counter++);
      sums[best] += u < means[best] ? 1.0 : 0.0;
      ++counts[best];
      pulls.push_back(best);
    }
  }
  return pulls;
}

}  // namespace oracle
