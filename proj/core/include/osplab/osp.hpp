#pragma once

#include "osplab/mdp_model.hpp"
#include "osplab/sample_path.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

namespace osplab {

enum class StartStateMode { env, fixed };
enum class PathMode { incremental, scratch };

struct OspConfig {
  double delta = 0.05;
  std::uint64_t horizon = 1;
  /// Mixing-time upper bound handed to the algorithm.
  int t_mix_bound = 1;
  StartStateMode start_mode = StartStateMode::env;
  std::size_t fixed_start_state = 0;
  /// Initial state of the environment.
  std::size_t initial_state = 0;
  std::uint64_t seed = 0;
  /// `scratch` rebuilds every path each phase; used as the oracle for `incremental`.
  PathMode path_mode = PathMode::incremental;
};

/// Throws std::invalid_argument unless delta in (0,1), horizon >= 1, t_mix_bound >= 1.
void validate_config(const OspConfig& cfg);

struct PhaseRecord {
  std::size_t k = 0;  // 1-based
  PolicyId policy = 0;
  std::size_t n_prev = 0;
  std::size_t n_planned = 0;
  std::size_t n_executed = 0;
  std::optional<double> rho_hat;
  double rho_tilde = 0.0;
  std::uint64_t start_t = 0;  // global step at which the phase's values were computed

  bool short_path() const noexcept { return n_planned > n_prev; }
  bool truncated() const noexcept { return n_executed < n_planned; }
};

struct RunResult {
  std::vector<double> rewards;
  std::vector<std::size_t> states;
  std::vector<std::size_t> actions;
  std::vector<std::size_t> phase_of_step;  // 0 for runs without phases
  std::vector<PhaseRecord> phases;
  std::vector<double> regret_curve;
  double rho_star = 0.0;
  std::size_t K = 0;
  std::size_t K_minus = 0;
  std::size_t K_plus = 0;
  /// Observation log of an OSP run.
  std::optional<ObservationLog> log;

  double final_regret() const { return regret_curve.empty() ? 0.0 : regret_curve.back(); }
};

/// rho_hat + sqrt(8 t_mix ln(8 t T / delta) / n); +infinity when n = 0.
double optimistic_value(double rho_hat, std::size_t n, std::uint64_t t, const OspConfig& cfg);

/// Argmax with ties (including infinities) broken by the smallest index.
PolicyId select_policy(std::span<const double> values);

/// max(n_prev, ceil(sqrt(T / (S A)))), computed in integers.
std::size_t phase_length(std::size_t n_prev, std::uint64_t horizon, std::size_t num_states,
                         std::size_t num_actions);

/// Optimistic sample-path learner. `rho_star` is used only for the regret curve.
RunResult run_osp(const MdpModel& m, const OspConfig& cfg, double rho_star);

/// Fills regret_curve[t-1] = t * rho_star - sum_{i<=t} r_i.
void fill_regret_curve(RunResult& result, double rho_star);

/// 4 ln(8T^2/delta) sqrt(t_mix S A T).
double regret_bound(double horizon, double t_mix, std::size_t num_states, std::size_t num_actions,
                    double delta);

struct HorizonThreshold {
  bool met = false;
  double required = 0.0;  // S^3 A (152 t_mix ln(8T^2/delta) / mu_min^2)^2
};

HorizonThreshold t_threshold(const MdpAnalysis& analysis, std::size_t num_states,
                             std::size_t num_actions, double horizon, double delta);

/// S A log_{4/3}(T / (S A)); throws std::domain_error when T <= S A.
double phase_count_bound(std::size_t num_states, std::size_t num_actions, double horizon);

/// k,policy_id,n_prev,n_planned,n_executed,rho_hat,rho_tilde,start_t
void write_phases_csv(const RunResult& result, std::ostream& out);
/// t,s,a,r,cumulative_regret,phase_k
void write_trajectory_csv(const RunResult& result, std::ostream& out);

}  // namespace osplab
