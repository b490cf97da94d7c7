#include "osplab/mdp_model.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace osplab {

std::string to_string(RewardKind kind) {
  return kind == RewardKind::bernoulli ? "bernoulli" : "deterministic";
}

RewardKind reward_kind_from_string(const std::string& name) {
  if (name == "bernoulli") return RewardKind::bernoulli;
  if (name == "deterministic") return RewardKind::deterministic;
  throw std::invalid_argument("unknown reward kind '" + name + "'");
}

std::uint64_t policy_count(std::size_t num_states, std::size_t num_actions) {
  if (num_states == 0 || num_actions == 0) throw std::invalid_argument("S and A must be >= 1");
  std::uint64_t count = 1;
  for (std::size_t s = 0; s < num_states; ++s) {
    if (count > kMaxPolicies / num_actions) {
      throw EnumerationLimitExceeded("A^S = " + std::to_string(num_actions) + "^" +
                                     std::to_string(num_states) + " exceeds the limit of " +
                                     std::to_string(kMaxPolicies) + " policies");
    }
    count *= num_actions;
  }
  return count;
}

MdpModel::MdpModel(std::size_t num_states, std::size_t num_actions, std::vector<double> transitions,
                   std::vector<double> mean_rewards, RewardKind reward_kind)
    : num_states_(num_states),
      num_actions_(num_actions),
      transitions_(std::move(transitions)),
      mean_rewards_(std::move(mean_rewards)),
      reward_kind_(reward_kind) {
  if (num_states_ == 0 || num_actions_ == 0) throw std::invalid_argument("S and A must be >= 1");
  if (transitions_.size() != num_states_ * num_actions_ * num_states_) {
    throw std::invalid_argument("transition tensor has wrong size");
  }
  if (mean_rewards_.size() != num_states_ * num_actions_) {
    throw std::invalid_argument("reward table has wrong size");
  }
  for (std::size_t s = 0; s < num_states_; ++s) {
    for (std::size_t a = 0; a < num_actions_; ++a) {
      double total = 0.0;
      for (double p : transition_row(s, a)) {
        if (!(p >= 0.0 && p <= 1.0)) {
          std::ostringstream msg;
          msg << "transition probability outside [0,1] at (" << s << "," << a << ")";
          throw std::invalid_argument(msg.str());
        }
        total += p;
      }
      if (std::abs(total - 1.0) > kProbabilityTolerance) {
        std::ostringstream msg;
        msg << "transition row (" << s << "," << a << ") sums to " << total;
        throw std::invalid_argument(msg.str());
      }
      const double r = mean_reward(s, a);
      if (!(r >= 0.0 && r <= 1.0)) {
        std::ostringstream msg;
        msg << "mean reward at (" << s << "," << a << ") outside [0,1]";
        throw std::invalid_argument(msg.str());
      }
    }
  }
}

Policy::Policy(std::vector<std::size_t> actions, std::size_t num_actions)
    : actions_(std::move(actions)) {
  if (actions_.empty()) throw std::invalid_argument("policy must cover at least one state");
  policy_count(actions_.size(), num_actions);
  PolicyId weight = 1;
  for (std::size_t a : actions_) {
    if (a >= num_actions) throw std::invalid_argument("policy action out of range");
    id_ += a * weight;
    weight *= num_actions;
  }
}

Policy Policy::decode(PolicyId id, std::size_t num_states, std::size_t num_actions) {
  if (id >= policy_count(num_states, num_actions)) {
    throw std::invalid_argument("policy id out of range");
  }
  std::vector<std::size_t> actions(num_states);
  for (auto& a : actions) {
    a = static_cast<std::size_t>(id % num_actions);
    id /= num_actions;
  }
  return Policy(std::move(actions), num_actions);
}

std::vector<Policy> enumerate_policies(std::size_t num_states, std::size_t num_actions) {
  const auto count = policy_count(num_states, num_actions);
  std::vector<Policy> out;
  out.reserve(count);
  for (PolicyId id = 0; id < count; ++id) out.push_back(Policy::decode(id, num_states, num_actions));
  return out;
}

InducedChain induced_chain(const MdpModel& m, const Policy& pi) {
  const auto n = static_cast<Eigen::Index>(m.num_states());
  if (pi.num_states() != m.num_states()) throw std::invalid_argument("policy/MDP state mismatch");
  Eigen::MatrixXd rows(n, n);
  Eigen::VectorXd rewards(n);
  for (Eigen::Index s = 0; s < n; ++s) {
    const auto a = pi(static_cast<std::size_t>(s));
    if (a >= m.num_actions()) throw std::invalid_argument("policy action out of range");
    const auto row = m.transition_row(static_cast<std::size_t>(s), a);
    for (Eigen::Index t = 0; t < n; ++t) rows(s, t) = row[static_cast<std::size_t>(t)];
    rewards(s) = m.mean_reward(static_cast<std::size_t>(s), a);
  }
  return {TransitionMatrix(std::move(rows)), std::move(rewards)};
}

std::vector<PolicyViolation> validate_mdp(const MdpModel& m) {
  std::vector<PolicyViolation> violations;
  const auto count = policy_count(m.num_states(), m.num_actions());
  for (PolicyId id = 0; id < count; ++id) {
    const auto chain = induced_chain(m, Policy::decode(id, m.num_states(), m.num_actions()));
    auto report = validate_uniform_ergodicity(chain.matrix);
    if (!report.ok()) violations.push_back({id, std::move(report)});
  }
  return violations;
}

MdpAnalysis analyze_mdp(const MdpModel& m, int mixing_cap) {
  const auto count = policy_count(m.num_states(), m.num_actions());
  MdpAnalysis out;
  out.per_policy.reserve(count);
  out.rho_star = -std::numeric_limits<double>::infinity();
  for (PolicyId id = 0; id < count; ++id) {
    const auto chain = induced_chain(m, Policy::decode(id, m.num_states(), m.num_actions()));
    auto analysis = analyze_chain(chain.matrix, chain.rewards, mixing_cap);
    out.mdp_mixing_time = std::max(out.mdp_mixing_time, analysis.mixing_time);
    out.rho_star = std::max(out.rho_star, analysis.avg_reward);
    for (std::size_t s = 0; s < analysis.stationary.size(); ++s) {
      if (analysis.stationary[s] > 0.0) out.mu_min = std::min(out.mu_min, analysis.stationary[s]);
    }
    out.per_policy.push_back(std::move(analysis));
  }
  for (PolicyId id = 0; id < count; ++id) {
    if (out.per_policy[id].avg_reward >= out.rho_star - kRhoTieTolerance) {
      out.optimal_policy = id;
      out.rho_star = out.per_policy[id].avg_reward;
      break;
    }
  }
  return out;
}

std::size_t sample_categorical(std::span<const double> probabilities, double u) {
  double cumulative = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    if (probabilities[i] <= 0.0) continue;
    cumulative += probabilities[i];
    last_positive = i;
    if (u < cumulative) return i;
  }
  return last_positive;
}

StepOutcome env_step(const MdpModel& m, EnvState& env, std::size_t action) {
  if (action >= m.num_actions()) throw std::invalid_argument("env_step: invalid action index");
  const auto s = env.current_state;
  const double u_transition = env.rng.next_uniform();
  const double u_reward = env.rng.next_uniform();
  StepOutcome out;
  out.next_state = sample_categorical(m.transition_row(s, action), u_transition);
  const double mean = m.mean_reward(s, action);
  out.reward = m.reward_kind() == RewardKind::bernoulli ? (u_reward < mean ? 1.0 : 0.0) : mean;
  env.current_state = out.next_state;
  return out;
}

MdpModel generate_ergodic_mdp(std::size_t num_states, std::size_t num_actions, std::uint64_t seed,
                              double smoothing, RewardKind kind) {
  if (num_states == 0 || num_actions == 0) throw std::invalid_argument("S and A must be >= 1");
  if (!(smoothing > 0.0 && smoothing < 1.0)) throw std::invalid_argument("smoothing must be in (0,1)");
  CounterRng rng(seed);
  const double uniform_mass = smoothing / static_cast<double>(num_states);
  std::vector<double> transitions(num_states * num_actions * num_states);
  std::vector<double> weights(num_states);
  // Draw order: rows in (s, a) order, S exponential variates per row; then rewards.
  for (std::size_t row = 0; row < num_states * num_actions; ++row) {
    double total = 0.0;
    for (auto& w : weights) {
      w = -std::log1p(-rng.next_uniform());
      total += w;
    }
    if (total <= 0.0) {
      std::fill(weights.begin(), weights.end(), 1.0);
      total = static_cast<double>(num_states);
    }
    for (std::size_t t = 0; t < num_states; ++t) {
      transitions[row * num_states + t] = std::min(1.0, (1.0 - smoothing) * weights[t] / total + uniform_mass);
    }
  }
  std::vector<double> rewards(num_states * num_actions);
  for (auto& r : rewards) r = rng.next_uniform();
  return MdpModel(num_states, num_actions, std::move(transitions), std::move(rewards), kind);
}

}  // namespace osplab
