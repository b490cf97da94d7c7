#pragma once

#include "osplab/mdp_model.hpp"
#include "osplab/osp.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace osplab {

enum class Algorithm { osp, oracle, uniform_random };

std::string to_string(Algorithm algorithm);
Algorithm algorithm_from_string(const std::string& name);

struct ExperimentSpec {
  Algorithm algorithm = Algorithm::osp;
  std::uint64_t horizon = 1;
  double delta = 0.05;
  /// Mixing time fed to OSP; the MDP's true mixing time when empty.
  std::optional<int> t_mix_override;
  std::vector<std::uint64_t> seeds;
  StartStateMode start_mode = StartStateMode::env;
  std::size_t fixed_start_state = 0;
  std::size_t initial_state = 0;
  PathMode path_mode = PathMode::incremental;
  /// No files are written when empty.
  std::filesystem::path out_dir;
  /// Also write `<algo>_seed<seed>_log.csv` (OSP observation log).
  bool dump_log = false;
};

/// Plays one fixed policy for the whole horizon.
RunResult run_fixed_policy(const MdpModel& m, const Policy& pi, std::uint64_t seed,
                           std::uint64_t horizon, std::size_t initial_state, double rho_star);

/// Picks a uniformly random action each step. Actions come from a stream derived
/// from the seed, so the environment stream matches the other algorithms.
RunResult run_uniform_random(const MdpModel& m, std::uint64_t seed, std::uint64_t horizon,
                             std::size_t initial_state, double rho_star);

OspConfig osp_config_for(const ExperimentSpec& spec, const MdpAnalysis& analysis, std::uint64_t seed);

/// One seed of the experiment, dispatched on spec.algorithm.
RunResult run_single(const MdpModel& m, const MdpAnalysis& analysis, const ExperimentSpec& spec,
                     std::uint64_t seed);

struct SeedOutcome {
  std::uint64_t seed = 0;
  double final_regret = 0.0;
  std::size_t phases = 0;
};

struct SweepSummary {
  Algorithm algorithm = Algorithm::osp;
  std::uint64_t horizon = 0;
  double delta = 0.0;
  int t_mix = 0;
  std::size_t num_states = 0;
  std::size_t num_actions = 0;
  double rho_star = 0.0;
  std::vector<SeedOutcome> per_seed;
  double mean_regret = 0.0;
  double stddev_regret = 0.0;
  double regret_bound = 0.0;
  bool all_below_regret_bound = false;
  HorizonThreshold threshold;
  std::optional<double> phase_count_bound;  // empty when T <= S A
  std::size_t max_phases = 0;
  /// "pass", "fail", or "not_applicable" (horizon threshold unmet).
  std::string phase_check;
};

/// Runs every seed, writes `<algo>_seed<seed>_{trajectory,phases}.csv` and
/// `<algo>_summary.json` into spec.out_dir when set.
SweepSummary run_experiment(const MdpModel& m, const MdpAnalysis& analysis, const ExperimentSpec& spec);

std::string summary_to_json(const SweepSummary& summary);

}  // namespace osplab
