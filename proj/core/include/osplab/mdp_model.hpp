#pragma once

#include "osplab/chain_analysis.hpp"
#include "osplab/rng.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace osplab {

enum class RewardKind { bernoulli, deterministic };

std::string to_string(RewardKind kind);
RewardKind reward_kind_from_string(const std::string& name);

using PolicyId = std::uint64_t;

/// Largest A^S accepted by anything that enumerates policies.
inline constexpr std::uint64_t kMaxPolicies = 1'000'000;

class EnumerationLimitExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A^S, throwing EnumerationLimitExceeded above kMaxPolicies.
std::uint64_t policy_count(std::size_t num_states, std::size_t num_actions);

/// Finite MDP with transition kernel p(s'|s,a) and mean rewards r(s,a) in [0,1].
/// Immutable after construction.
class MdpModel {
 public:
  /// `transitions` is laid out [s][a][s'], `mean_rewards` is [s][a].
  MdpModel(std::size_t num_states, std::size_t num_actions, std::vector<double> transitions,
           std::vector<double> mean_rewards, RewardKind reward_kind);

  std::size_t num_states() const noexcept { return num_states_; }
  std::size_t num_actions() const noexcept { return num_actions_; }
  RewardKind reward_kind() const noexcept { return reward_kind_; }

  std::span<const double> transition_row(std::size_t s, std::size_t a) const {
    return {transitions_.data() + (s * num_actions_ + a) * num_states_, num_states_};
  }
  double transition(std::size_t s, std::size_t a, std::size_t next) const {
    return transition_row(s, a)[next];
  }
  double mean_reward(std::size_t s, std::size_t a) const {
    return mean_rewards_[s * num_actions_ + a];
  }

  friend bool operator==(const MdpModel&, const MdpModel&) = default;

 private:
  std::size_t num_states_;
  std::size_t num_actions_;
  std::vector<double> transitions_;
  std::vector<double> mean_rewards_;
  RewardKind reward_kind_;
};

/// Deterministic stationary policy. The id is the mixed-radix number with
/// digit actions[s] at weight A^s (state 0 least significant).
class Policy {
 public:
  Policy(std::vector<std::size_t> actions, std::size_t num_actions);

  static Policy decode(PolicyId id, std::size_t num_states, std::size_t num_actions);

  PolicyId id() const noexcept { return id_; }
  const std::vector<std::size_t>& actions() const noexcept { return actions_; }
  std::size_t operator()(std::size_t state) const { return actions_[state]; }
  std::size_t num_states() const noexcept { return actions_.size(); }

  friend bool operator==(const Policy&, const Policy&) = default;

 private:
  std::vector<std::size_t> actions_;
  PolicyId id_ = 0;
};

std::vector<Policy> enumerate_policies(std::size_t num_states, std::size_t num_actions);

struct InducedChain {
  TransitionMatrix matrix;
  Eigen::VectorXd rewards;
};

/// Row s is p(.|s, pi(s)); rewards(s) = r(s, pi(s)).
InducedChain induced_chain(const MdpModel& m, const Policy& pi);

struct PolicyViolation {
  PolicyId policy = 0;
  ErgodicityReport report;
};

/// Empty result means every policy induces a uniformly ergodic chain.
std::vector<PolicyViolation> validate_mdp(const MdpModel& m);

struct MdpAnalysis {
  std::vector<ChainAnalysis> per_policy;  // indexed by PolicyId
  int mdp_mixing_time = 0;
  double rho_star = 0.0;
  PolicyId optimal_policy = 0;
  double mu_min = 1.0;
};

/// Average rewards closer than this count as tied when picking the optimal policy.
inline constexpr double kRhoTieTolerance = 1e-12;

/// Enumerates every policy. Ties in rho are broken by the smallest PolicyId, and
/// rho_star is the average reward of the chosen policy.
MdpAnalysis analyze_mdp(const MdpModel& m, int mixing_cap = kDefaultMixingCap);

/// Single-owner simulator state: current state plus its private random stream.
struct EnvState {
  std::size_t current_state = 0;
  CounterRng rng{0};

  EnvState() = default;
  EnvState(std::uint64_t seed, std::size_t initial_state) : current_state(initial_state), rng(seed) {}
};

struct StepOutcome {
  double reward = 0.0;
  std::size_t next_state = 0;
};

/// Inverse-CDF draw from a probability row; never returns a zero-probability index.
std::size_t sample_categorical(std::span<const double> probabilities, double u);

/// One environment step. Consumes exactly two draws: the transition first,
/// then the reward (drawn even for deterministic rewards).
StepOutcome env_step(const MdpModel& m, EnvState& env, std::size_t action);

/// Random MDP whose transition rows are flat-Dirichlet draws mixed with the
/// uniform distribution by weight `smoothing`; every entry is positive, so every
/// policy's chain is irreducible and aperiodic. Mean rewards are uniform in [0,1].
MdpModel generate_ergodic_mdp(std::size_t num_states, std::size_t num_actions, std::uint64_t seed,
                              double smoothing = 0.1, RewardKind kind = RewardKind::bernoulli);

}  // namespace osplab
