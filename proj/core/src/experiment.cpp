#include "osplab/experiment.hpp"

#include "parallel.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace osplab {
namespace {

void record_step(RunResult& result, std::size_t s, std::size_t a, double r) {
  result.states.push_back(s);
  result.actions.push_back(a);
  result.rewards.push_back(r);
  result.phase_of_step.push_back(0);
}

void write_file(const std::filesystem::path& file, const std::string& contents) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  out << contents;
  if (!out) throw std::runtime_error("write failed for " + file.string());
}

}  // namespace

std::string to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::osp: return "osp";
    case Algorithm::oracle: return "oracle";
    case Algorithm::uniform_random: return "uniform_random";
  }
  return "unknown";
}

Algorithm algorithm_from_string(const std::string& name) {
  if (name == "osp") return Algorithm::osp;
  if (name == "oracle") return Algorithm::oracle;
  if (name == "uniform_random") return Algorithm::uniform_random;
  throw std::invalid_argument("unknown algorithm '" + name + "'");
}

RunResult run_fixed_policy(const MdpModel& m, const Policy& pi, std::uint64_t seed,
                           std::uint64_t horizon, std::size_t initial_state, double rho_star) {
  if (initial_state >= m.num_states()) throw std::invalid_argument("initial state out of range");
  EnvState env(seed, initial_state);
  RunResult result;
  for (std::uint64_t t = 0; t < horizon; ++t) {
    const auto s = env.current_state;
    const auto outcome = env_step(m, env, pi(s));
    record_step(result, s, pi(s), outcome.reward);
  }
  fill_regret_curve(result, rho_star);
  return result;
}

RunResult run_uniform_random(const MdpModel& m, std::uint64_t seed, std::uint64_t horizon,
                             std::size_t initial_state, double rho_star) {
  if (initial_state >= m.num_states()) throw std::invalid_argument("initial state out of range");
  EnvState env(seed, initial_state);
  CounterRng actions(derive_seed(seed, 1));
  RunResult result;
  for (std::uint64_t t = 0; t < horizon; ++t) {
    const auto s = env.current_state;
    const auto a = static_cast<std::size_t>(actions.next_below(m.num_actions()));
    const auto outcome = env_step(m, env, a);
    record_step(result, s, a, outcome.reward);
  }
  fill_regret_curve(result, rho_star);
  return result;
}

OspConfig osp_config_for(const ExperimentSpec& spec, const MdpAnalysis& analysis, std::uint64_t seed) {
  OspConfig cfg;
  cfg.delta = spec.delta;
  cfg.horizon = spec.horizon;
  cfg.t_mix_bound = spec.t_mix_override.value_or(analysis.mdp_mixing_time);
  cfg.start_mode = spec.start_mode;
  cfg.fixed_start_state = spec.fixed_start_state;
  cfg.initial_state = spec.initial_state;
  cfg.seed = seed;
  cfg.path_mode = spec.path_mode;
  return cfg;
}

RunResult run_single(const MdpModel& m, const MdpAnalysis& analysis, const ExperimentSpec& spec,
                     std::uint64_t seed) {
  switch (spec.algorithm) {
    case Algorithm::osp:
      return run_osp(m, osp_config_for(spec, analysis, seed), analysis.rho_star);
    case Algorithm::oracle:
      return run_fixed_policy(m, Policy::decode(analysis.optimal_policy, m.num_states(), m.num_actions()),
                              seed, spec.horizon, spec.initial_state, analysis.rho_star);
    case Algorithm::uniform_random:
      return run_uniform_random(m, seed, spec.horizon, spec.initial_state, analysis.rho_star);
  }
  throw std::logic_error("unhandled algorithm");
}

SweepSummary run_experiment(const MdpModel& m, const MdpAnalysis& analysis, const ExperimentSpec& spec) {
  if (spec.seeds.empty()) throw std::invalid_argument("at least one seed is required");
  if (spec.horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  if (!(spec.delta > 0.0 && spec.delta < 1.0)) throw std::invalid_argument("delta must be in (0,1)");
  policy_count(m.num_states(), m.num_actions());
  if (!spec.out_dir.empty()) std::filesystem::create_directories(spec.out_dir);

  const auto algo = to_string(spec.algorithm);
  std::vector<SeedOutcome> outcomes(spec.seeds.size());
  detail::parallel_for(spec.seeds.size(), [&](std::size_t i) {
    const auto seed = spec.seeds[i];
    const RunResult result = run_single(m, analysis, spec, seed);
    outcomes[i] = {seed, result.final_regret(), result.K};
    if (!spec.out_dir.empty()) {
      const auto stem = spec.out_dir / (algo + "_seed" + std::to_string(seed));
      std::ostringstream trajectory;
      write_trajectory_csv(result, trajectory);
      write_file(stem.string() + "_trajectory.csv", trajectory.str());
      std::ostringstream phases;
      write_phases_csv(result, phases);
      write_file(stem.string() + "_phases.csv", phases.str());
      if (spec.dump_log && result.log) {
        std::ostringstream log;
        write_log_csv(*result.log, log);
        write_file(stem.string() + "_log.csv", log.str());
      }
    }
  });

  SweepSummary summary;
  summary.algorithm = spec.algorithm;
  summary.horizon = spec.horizon;
  summary.delta = spec.delta;
  summary.t_mix = spec.t_mix_override.value_or(analysis.mdp_mixing_time);
  summary.num_states = m.num_states();
  summary.num_actions = m.num_actions();
  summary.rho_star = analysis.rho_star;
  summary.per_seed = outcomes;

  const double count = static_cast<double>(outcomes.size());
  double sum = 0.0;
  for (const auto& o : outcomes) sum += o.final_regret;
  summary.mean_regret = sum / count;
  double squares = 0.0;
  for (const auto& o : outcomes) squares += (o.final_regret - summary.mean_regret) * (o.final_regret - summary.mean_regret);
  summary.stddev_regret = outcomes.size() > 1 ? std::sqrt(squares / (count - 1.0)) : 0.0;

  const auto T = static_cast<double>(spec.horizon);
  summary.regret_bound = regret_bound(T, analysis.mdp_mixing_time, m.num_states(), m.num_actions(), spec.delta);
  summary.all_below_regret_bound = std::all_of(outcomes.begin(), outcomes.end(), [&](const SeedOutcome& o) {
    return o.final_regret <= summary.regret_bound;
  });
  summary.threshold = t_threshold(analysis, m.num_states(), m.num_actions(), T, spec.delta);
  for (const auto& o : outcomes) summary.max_phases = std::max(summary.max_phases, o.phases);
  if (T > static_cast<double>(m.num_states() * m.num_actions())) {
    summary.phase_count_bound = phase_count_bound(m.num_states(), m.num_actions(), T);
  }
  if (spec.algorithm != Algorithm::osp || !summary.threshold.met || !summary.phase_count_bound) {
    summary.phase_check = "not_applicable";
  } else {
    summary.phase_check =
        static_cast<double>(summary.max_phases) <= *summary.phase_count_bound ? "pass" : "fail";
  }

  if (!spec.out_dir.empty()) {
    write_file(spec.out_dir / (algo + "_summary.json"), summary_to_json(summary));
  }
  return summary;
}

std::string summary_to_json(const SweepSummary& s) {
  nlohmann::ordered_json j;
  j["algorithm"] = to_string(s.algorithm);
  j["horizon"] = s.horizon;
  j["delta"] = s.delta;
  j["t_mix"] = s.t_mix;
  j["num_states"] = s.num_states;
  j["num_actions"] = s.num_actions;
  j["rho_star"] = s.rho_star;
  auto seeds = nlohmann::ordered_json::array();
  for (const auto& o : s.per_seed) {
    nlohmann::ordered_json row;
    row["seed"] = o.seed;
    row["final_regret"] = o.final_regret;
    row["phases"] = o.phases;
    seeds.push_back(std::move(row));
  }
  j["per_seed"] = std::move(seeds);
  j["mean_regret"] = s.mean_regret;
  j["stddev_regret"] = s.stddev_regret;
  j["regret_bound"] = s.regret_bound;
  j["all_below_regret_bound"] = s.all_below_regret_bound;
  j["t_threshold_met"] = s.threshold.met;
  j["t_threshold_required"] = s.threshold.required;
  if (s.phase_count_bound) {
    j["phase_count_bound"] = *s.phase_count_bound;
  } else {
    j["phase_count_bound"] = nullptr;
  }
  j["max_phases"] = s.max_phases;
  j["phase_check"] = s.phase_check;
  return j.dump(2) + "\n";
}

}  // namespace osplab
