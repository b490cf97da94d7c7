#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <stdexcept>
#include <string>

namespace osplab {

/// Tolerance for row sums and distribution totals.
inline constexpr double kProbabilityTolerance = 1e-12;
/// Slack on the `<= 1/4` comparison in the mixing-time search.
inline constexpr double kMixingSlack = 1e-12;
inline constexpr int kDefaultMixingCap = 100000;

/// Raised when a chain has no unique stationary distribution.
class NotUniquelyErgodic : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when no n <= cap brings the worst-start TV distance below 1/4.
class MixingExceedsCap : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Row-stochastic n x n matrix; row s is p(.|s).
class TransitionMatrix {
 public:
  /// Throws std::invalid_argument if the matrix is not square and row-stochastic.
  explicit TransitionMatrix(Eigen::MatrixXd rows);

  std::size_t size() const noexcept { return static_cast<std::size_t>(rows_.rows()); }
  const Eigen::MatrixXd& matrix() const noexcept { return rows_; }
  double operator()(std::size_t from, std::size_t to) const {
    return rows_(static_cast<Eigen::Index>(from), static_cast<Eigen::Index>(to));
  }

 private:
  Eigen::MatrixXd rows_;
};

/// Probability vector over n states.
class Distribution {
 public:
  explicit Distribution(Eigen::VectorXd mass);

  std::size_t size() const noexcept { return static_cast<std::size_t>(mass_.size()); }
  const Eigen::VectorXd& mass() const noexcept { return mass_; }
  double operator[](std::size_t s) const { return mass_(static_cast<Eigen::Index>(s)); }

 private:
  Eigen::VectorXd mass_;
};

struct ChainAnalysis {
  Distribution stationary;
  int mixing_time = 0;
  double pseudo_spectral_gap = 0.0;
  double avg_reward = 0.0;
};

/// sup_A |P(A) - Q(A)|, i.e. half the L1 distance.
double tv_distance(const Distribution& p, const Distribution& q);

/// Solves the balance equations mu^T P = mu^T with sum(mu) = 1 directly.
/// Throws NotUniquelyErgodic when the solution is not unique.
Distribution stationary_distribution(const TransitionMatrix& P);

/// max_s d_TV(P^n(s,.), mu); n >= 0.
double worst_start_tv(const TransitionMatrix& P, const Distribution& mu, int n);

/// Smallest n with max_s d_TV(P^n(s,.), mu) <= 1/4 (plus kMixingSlack).
int mixing_time(const TransitionMatrix& P, const Distribution& mu, int cap = kDefaultMixingCap);

/// Pseudo-spectral gap: max over k = 1..k_max of gamma((P*)^k P^k) / k, where P*
/// is the adjoint of P in L2(mu). States with zero stationary mass are dropped;
/// throws std::domain_error if a positive-mass state leaks into a zero-mass one.
double pseudo_spectral_gap(const TransitionMatrix& P, const Distribution& mu, int k_max);

enum class ErgodicityViolation { none, multiple_recurrent_classes, periodic };

struct ErgodicityReport {
  ErgodicityViolation violation = ErgodicityViolation::none;
  std::size_t recurrent_classes = 0;
  /// Period of the (first) recurrent class; 1 when aperiodic.
  std::size_t period = 1;
  std::string message;

  bool ok() const noexcept { return violation == ErgodicityViolation::none; }
};

/// Uniform ergodicity test for a finite chain: exactly one closed communicating
/// class, and that class is aperiodic. Purely graph-based on the positive entries.
ErgodicityReport validate_uniform_ergodicity(const TransitionMatrix& P);

/// Full analysis of a validated chain with reward vector r. k_max for the
/// pseudo-spectral gap defaults to 2 * t_mix when 0 is passed.
ChainAnalysis analyze_chain(const TransitionMatrix& P, const Eigen::VectorXd& rewards,
                            int mixing_cap = kDefaultMixingCap, int gap_k_max = 0);

}  // namespace osplab
