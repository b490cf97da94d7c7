#pragma once

#include "osplab/chain_analysis.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace osplab {

enum class BoundKind { reward_mcdiarmid, reward_ci, tv_concentration, tv_expectation };

std::string to_string(BoundKind kind);

/// Two-sided 99% normal quantile used for every Monte-Carlo margin.
inline constexpr double kZ99 = 2.5758293035489004;
inline constexpr std::size_t kDefaultTrials = 10000;

struct TailCheckSpec {
  TransitionMatrix chain;
  Eigen::VectorXd rewards;
  /// Fixed start state, or every state with the worst one reported.
  std::optional<std::size_t> start_state;
  std::size_t n = 1;
  double epsilon = 0.1;
  double delta = 0.05;
  std::size_t trials = kDefaultTrials;
  std::uint64_t seed = 0;
  int mixing_cap = kDefaultMixingCap;
};

struct TailCheckReport {
  BoundKind kind = BoundKind::reward_mcdiarmid;
  std::size_t n = 0;
  double epsilon_or_delta = 0.0;
  std::size_t trials = 0;
  double empirical = 0.0;    // violation rate, or mean d_TV for tv_expectation
  double theoretical = 0.0;  // bound on that quantity
  double margin = 0.0;       // 99% Monte-Carlo half-width
  bool vacuous = false;
  bool pass = false;         // empirical <= theoretical + margin (always true when vacuous)
  std::size_t start_state = 0;
};

/// Per-trajectory statistics: mean reward and d_TV(mu, empirical distribution).
struct TrialStat {
  double reward_mean = 0.0;
  double tv = 0.0;
};

struct TrialSamples {
  std::size_t start_state = 0;
  std::vector<TrialStat> trials;
};

/// Simulates spec.trials trajectories X_1..X_n (X_1 = start) from each candidate
/// start state. Trial i of start s uses the stream seeded with seed ^ (s * trials + i).
std::vector<TrialSamples> simulate_trials(const TailCheckSpec& spec, const Distribution& mu);

// Bound formulas, natural logarithms throughout.
double mcdiarmid_tail_bound(double epsilon, std::size_t n, double t_mix);
double reward_ci_radius(double t_mix, double delta, std::size_t n);
double tv_radius(std::size_t num_states, double t_mix, double delta, std::size_t n);
double tv_expectation_bound(const Distribution& mu, std::size_t n, double beta);

/// Half-width of the Wilson score interval for `successes` out of `trials`.
double wilson_half_width(std::size_t successes, std::size_t trials, double z = kZ99);

TailCheckReport check_reward_concentration(const TailCheckSpec& spec);
TailCheckReport check_reward_ci(const TailCheckSpec& spec);
TailCheckReport check_tv_expectation(const TailCheckSpec& spec);
/// Tail check of d_TV against its radius, plus the mean-d_TV check on the same trials.
std::array<TailCheckReport, 2> check_tv_concentration(const TailCheckSpec& spec);

std::string report_to_json(const TailCheckReport& report);
std::string reports_to_json(const std::vector<TailCheckReport>& reports);

}  // namespace osplab
