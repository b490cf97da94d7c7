#include "osplab/osp.hpp"

#include "osplab/text_format.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace osplab {

void validate_config(const OspConfig& cfg) {
  if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) throw std::invalid_argument("delta must be in (0,1)");
  if (cfg.horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  if (cfg.t_mix_bound < 1) throw std::invalid_argument("t_mix bound must be >= 1");
}

double optimistic_value(double rho_hat, std::size_t n, std::uint64_t t, const OspConfig& cfg) {
  if (n == 0) return std::numeric_limits<double>::infinity();
  const double log_term =
      std::log(8.0 * static_cast<double>(t) * static_cast<double>(cfg.horizon) / cfg.delta);
  return rho_hat + std::sqrt(8.0 * cfg.t_mix_bound * log_term / static_cast<double>(n));
}

PolicyId select_policy(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("select_policy: no policies");
  PolicyId best = 0;
  for (PolicyId id = 1; id < values.size(); ++id) {
    if (values[id] > values[best]) best = id;
  }
  return best;
}

std::size_t phase_length(std::size_t n_prev, std::uint64_t horizon, std::size_t num_states,
                         std::size_t num_actions) {
  const std::uint64_t sa = static_cast<std::uint64_t>(num_states) * num_actions;
  // Smallest m with m^2 * S * A >= T.
  auto m = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(horizon) / static_cast<double>(sa)));
  while (m > 0 && (m - 1) * (m - 1) * sa >= horizon) --m;
  while (m * m * sa < horizon) ++m;
  return std::max<std::size_t>(n_prev, static_cast<std::size_t>(m));
}

void fill_regret_curve(RunResult& result, double rho_star) {
  result.rho_star = rho_star;
  result.regret_curve.resize(result.rewards.size());
  double collected = 0.0;
  for (std::size_t i = 0; i < result.rewards.size(); ++i) {
    collected += result.rewards[i];
    result.regret_curve[i] = static_cast<double>(i + 1) * rho_star - collected;
  }
}

RunResult run_osp(const MdpModel& m, const OspConfig& cfg, double rho_star) {
  validate_config(cfg);
  if (cfg.initial_state >= m.num_states() || cfg.fixed_start_state >= m.num_states()) {
    throw std::invalid_argument("start state out of range");
  }
  const auto policies = enumerate_policies(m.num_states(), m.num_actions());
  const auto T = cfg.horizon;

  EnvState env(cfg.seed, cfg.initial_state);
  ObservationLog log(m.num_states(), m.num_actions());
  std::vector<SamplePath> paths;
  paths.reserve(policies.size());
  for (const auto& pi : policies) paths.emplace_back(pi, cfg.initial_state);

  RunResult result;
  result.rewards.reserve(T);
  result.states.reserve(T);
  result.actions.reserve(T);
  result.phase_of_step.reserve(T);

  std::vector<double> values(policies.size());
  std::vector<std::optional<double>> estimates(policies.size());
  std::uint64_t steps = 0;
  for (std::size_t k = 1; steps < T; ++k) {
    const std::uint64_t t = steps + 1;
    const auto start = cfg.start_mode == StartStateMode::env ? env.current_state : cfg.fixed_start_state;
    for (std::size_t id = 0; id < policies.size(); ++id) {
      if (cfg.path_mode == PathMode::scratch || paths[id].start_state() != start) {
        paths[id] = construct_path(log, policies[id], start);
      } else {
        paths[id] = extend_path(std::move(paths[id]), log);
      }
      const auto estimate = path_reward_estimate(paths[id]);
      estimates[id] = estimate.mean;
      values[id] = optimistic_value(estimate.mean.value_or(0.0), estimate.n, t, cfg);
    }

    const PolicyId chosen = select_policy(values);
    PhaseRecord phase;
    phase.k = k;
    phase.policy = chosen;
    phase.n_prev = paths[chosen].size();
    phase.n_planned = phase_length(phase.n_prev, T, m.num_states(), m.num_actions());
    phase.n_executed = static_cast<std::size_t>(std::min<std::uint64_t>(phase.n_planned, T - steps));
    phase.rho_hat = estimates[chosen];
    phase.rho_tilde = values[chosen];
    phase.start_t = t;

    const auto& pi = policies[chosen];
    for (std::size_t tau = 0; tau < phase.n_executed; ++tau) {
      const auto s = env.current_state;
      const auto a = pi(s);
      const auto outcome = env_step(m, env, a);
      ++steps;
      log.append({s, a, outcome.reward, outcome.next_state, steps});
      result.rewards.push_back(outcome.reward);
      result.states.push_back(s);
      result.actions.push_back(a);
      result.phase_of_step.push_back(k);
    }
    if (phase.short_path()) ++result.K_minus;
    result.phases.push_back(std::move(phase));
  }
  result.K = result.phases.size();
  result.K_plus = result.K - result.K_minus;
  fill_regret_curve(result, rho_star);
  result.log = std::move(log);
  return result;
}

double regret_bound(double horizon, double t_mix, std::size_t num_states, std::size_t num_actions,
                    double delta) {
  const double sa = static_cast<double>(num_states) * static_cast<double>(num_actions);
  return 4.0 * std::log(8.0 * horizon * horizon / delta) * std::sqrt(t_mix * sa * horizon);
}

HorizonThreshold t_threshold(const MdpAnalysis& analysis, std::size_t num_states,
                             std::size_t num_actions, double horizon, double delta) {
  const double S = static_cast<double>(num_states);
  const double inner = 152.0 * analysis.mdp_mixing_time * std::log(8.0 * horizon * horizon / delta) /
                       (analysis.mu_min * analysis.mu_min);
  HorizonThreshold out;
  out.required = S * S * S * static_cast<double>(num_actions) * inner * inner;
  out.met = horizon >= out.required;
  return out;
}

double phase_count_bound(std::size_t num_states, std::size_t num_actions, double horizon) {
  const double sa = static_cast<double>(num_states) * static_cast<double>(num_actions);
  if (!(horizon > sa)) throw std::domain_error("phase_count_bound requires T > S A");
  return sa * std::log(horizon / sa) / std::log(4.0 / 3.0);
}

void write_phases_csv(const RunResult& result, std::ostream& out) {
  out << "k,policy_id,n_prev,n_planned,n_executed,rho_hat,rho_tilde,start_t\n";
  for (const auto& p : result.phases) {
    out << p.k << ',' << p.policy << ',' << p.n_prev << ',' << p.n_planned << ',' << p.n_executed
        << ',' << (p.rho_hat ? format_double(*p.rho_hat) : std::string("nan")) << ','
        << format_double(p.rho_tilde) << ',' << p.start_t << '\n';
  }
}

void write_trajectory_csv(const RunResult& result, std::ostream& out) {
  out << "t,s,a,r,cumulative_regret,phase_k\n";
  for (std::size_t i = 0; i < result.rewards.size(); ++i) {
    out << (i + 1) << ',' << result.states[i] << ',' << result.actions[i] << ','
        << format_double(result.rewards[i]) << ',' << format_double(result.regret_curve[i]) << ','
        << result.phase_of_step[i] << '\n';
  }
}

}  // namespace osplab
