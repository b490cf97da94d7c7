// osplab: generate, analyze and simulate tabular MDPs with the optimistic
// sample-path learner, and run Monte-Carlo checks of Markov-chain concentration.
//
// Exit codes: 0 success, 1 usage error, 2 validation failure, 3 check failure.

#include "osplab/chain_analysis.hpp"
#include "osplab/concentration.hpp"
#include "osplab/experiment.hpp"
#include "osplab/mdp_io.hpp"
#include "osplab/mdp_model.hpp"
#include "osplab/osp.hpp"
#include "osplab/text_format.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitValidation = 2;
constexpr int kExitCheck = 3;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ValidationFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct MdpSource {
  std::string file;
  std::size_t states = 0;
  std::size_t actions = 0;
  std::uint64_t seed = 0;
  double smoothing = 0.1;
  std::string reward_kind = "bernoulli";
};

void add_generator_options(CLI::App& cmd, MdpSource& src) {
  cmd.add_option("--states", src.states, "Number of states for a generated MDP");
  cmd.add_option("--actions", src.actions, "Number of actions for a generated MDP");
  cmd.add_option("--seed", src.seed, "Generator seed");
  cmd.add_option("--smoothing", src.smoothing, "Weight of the uniform mixture in (0,1)");
  cmd.add_option("--reward-kind", src.reward_kind, "bernoulli or deterministic")
      ->check(CLI::IsMember({"bernoulli", "deterministic"}));
}

osplab::MdpModel resolve_mdp(const MdpSource& src) {
  if (!src.file.empty()) return osplab::load_mdp(src.file);
  if (src.states == 0 || src.actions == 0) {
    throw UsageError("either --mdp or both --states and --actions are required");
  }
  osplab::policy_count(src.states, src.actions);
  return osplab::generate_ergodic_mdp(src.states, src.actions, src.seed, src.smoothing,
                                      osplab::reward_kind_from_string(src.reward_kind));
}

void require_valid(const osplab::MdpModel& m) {
  const auto violations = osplab::validate_mdp(m);
  if (violations.empty()) return;
  std::ostringstream msg;
  msg << violations.size() << " policies violate uniform ergodicity; first: policy "
      << violations.front().policy << " (" << violations.front().report.message << ")";
  throw ValidationFailure(msg.str());
}

std::string policy_string(osplab::PolicyId id, std::size_t S, std::size_t A) {
  const auto pi = osplab::Policy::decode(id, S, A);
  std::string out;
  for (std::size_t s = 0; s < S; ++s) {
    if (s) out += ' ';
    out += std::to_string(pi(s));
  }
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

// ---------------------------------------------------------------- generate

int cmd_generate(const MdpSource& src, const std::string& out) {
  if (src.states == 0 || src.actions == 0) throw UsageError("--states and --actions are required");
  osplab::policy_count(src.states, src.actions);
  const auto m = osplab::generate_ergodic_mdp(src.states, src.actions, src.seed, src.smoothing,
                                              osplab::reward_kind_from_string(src.reward_kind));
  const auto json = osplab::mdp_to_json(m);
  if (out.empty()) {
    std::cout << json;
  } else {
    osplab::save_mdp(m, out);
  }
  const auto violations = osplab::validate_mdp(m);
  std::cerr << "validate: " << (violations.empty() ? "ok" : "FAILED") << " (" << m.num_states()
            << " states, " << m.num_actions() << " actions)\n";
  return violations.empty() ? kExitOk : kExitValidation;
}

// ----------------------------------------------------------------- analyze

int cmd_analyze(const MdpSource& src, std::uint64_t horizon, double delta, int cap, const std::string& out) {
  const auto m = resolve_mdp(src);
  require_valid(m);
  const auto analysis = osplab::analyze_mdp(m, cap);
  const auto S = m.num_states();
  const auto A = m.num_actions();

  std::cout << std::left << std::setw(10) << "policy" << std::setw(16) << "actions" << std::setw(14)
            << "rho" << std::setw(8) << "t_mix" << "beta\n";
  for (osplab::PolicyId id = 0; id < analysis.per_policy.size(); ++id) {
    const auto& pa = analysis.per_policy[id];
    std::cout << std::setw(10) << id << std::setw(16) << policy_string(id, S, A) << std::setw(14)
              << std::setprecision(8) << pa.avg_reward << std::setw(8) << pa.mixing_time
              << pa.pseudo_spectral_gap << '\n';
  }
  const auto threshold = osplab::t_threshold(analysis, S, A, static_cast<double>(horizon), delta);
  std::cout << "t_mix " << analysis.mdp_mixing_time << "\n"
            << "rho_star " << osplab::format_double(analysis.rho_star) << "\n"
            << "optimal_policy " << analysis.optimal_policy << " (" << policy_string(analysis.optimal_policy, S, A)
            << ")\n"
            << "mu_min " << osplab::format_double(analysis.mu_min) << "\n"
            << "t_threshold(T=" << horizon << ", delta=" << delta << ") "
            << osplab::format_double(threshold.required) << (threshold.met ? " (met)" : " (not met)") << "\n";

  if (!out.empty()) {
    nlohmann::ordered_json j;
    j["num_states"] = S;
    j["num_actions"] = A;
    auto rows = nlohmann::ordered_json::array();
    for (osplab::PolicyId id = 0; id < analysis.per_policy.size(); ++id) {
      const auto& pa = analysis.per_policy[id];
      nlohmann::ordered_json row;
      row["policy_id"] = id;
      row["actions"] = osplab::Policy::decode(id, S, A).actions();
      row["rho"] = pa.avg_reward;
      row["t_mix"] = pa.mixing_time;
      row["beta"] = pa.pseudo_spectral_gap;
      row["stationary"] = std::vector<double>(pa.stationary.mass().begin(), pa.stationary.mass().end());
      rows.push_back(std::move(row));
    }
    j["per_policy"] = std::move(rows);
    j["t_mix"] = analysis.mdp_mixing_time;
    j["rho_star"] = analysis.rho_star;
    j["optimal_policy"] = analysis.optimal_policy;
    j["mu_min"] = analysis.mu_min;
    j["horizon"] = horizon;
    j["delta"] = delta;
    j["t_threshold_required"] = threshold.required;
    j["t_threshold_met"] = threshold.met;
    write_text(out, j.dump(2) + "\n");
  }
  return kExitOk;
}

// --------------------------------------------------------------------- run

struct RunOptions {
  std::string algo = "osp";
  std::uint64_t horizon = 100000;
  double delta = 0.05;
  std::string tmix = "auto";
  std::vector<std::uint64_t> seeds{1};
  std::string out;
  std::string start_state = "env";
  std::string reconstruct = "incremental";
  std::size_t initial_state = 0;
  bool dump_log = false;
  int cap = osplab::kDefaultMixingCap;
};

void parse_start_state(const std::string& text, osplab::StartStateMode& mode, std::size_t& state) {
  if (text == "env") {
    mode = osplab::StartStateMode::env;
    return;
  }
  if (text.rfind("fixed:", 0) == 0) {
    mode = osplab::StartStateMode::fixed;
    try {
      state = std::stoul(text.substr(6));
    } catch (const std::exception&) {
      throw UsageError("bad --start-state value '" + text + "'");
    }
    return;
  }
  throw UsageError("--start-state must be 'env' or 'fixed:<s>'");
}

int cmd_run(const MdpSource& src, const RunOptions& opt) {
  const auto m = resolve_mdp(src);
  require_valid(m);
  const auto analysis = osplab::analyze_mdp(m, opt.cap);

  osplab::ExperimentSpec spec;
  spec.algorithm = osplab::algorithm_from_string(opt.algo);
  spec.horizon = opt.horizon;
  spec.delta = opt.delta;
  if (opt.tmix != "auto") {
    try {
      spec.t_mix_override = std::stoi(opt.tmix);
    } catch (const std::exception&) {
      throw UsageError("--tmix must be 'auto' or a positive integer");
    }
    if (*spec.t_mix_override < 1) throw UsageError("--tmix must be >= 1");
  }
  spec.seeds = opt.seeds;
  parse_start_state(opt.start_state, spec.start_mode, spec.fixed_start_state);
  if (spec.fixed_start_state >= m.num_states() || opt.initial_state >= m.num_states()) {
    throw UsageError("start state out of range");
  }
  spec.initial_state = opt.initial_state;
  spec.path_mode = opt.reconstruct == "scratch" ? osplab::PathMode::scratch : osplab::PathMode::incremental;
  spec.out_dir = opt.out;
  spec.dump_log = opt.dump_log;

  const auto summary = osplab::run_experiment(m, analysis, spec);
  std::cout << osplab::summary_to_json(summary);
  return summary.phase_check == "fail" ? kExitCheck : kExitOk;
}

// ----------------------------------------------------------- concentration

struct ConcentrationOptions {
  std::string kind = "all";
  std::size_t n = 1000;
  double epsilon = 0.1;
  double delta = 0.05;
  std::size_t trials = osplab::kDefaultTrials;
  std::uint64_t seed = 0;
  osplab::PolicyId policy = 0;
  std::vector<double> two_state;
  std::string start_state = "worst";
  std::string out;
};

int cmd_concentration(const MdpSource& src, const ConcentrationOptions& opt) {
  std::optional<osplab::TransitionMatrix> chain;
  Eigen::VectorXd rewards;
  if (!opt.two_state.empty()) {
    if (opt.two_state.size() != 2) throw UsageError("--two-state takes 'a,b'");
    const double a = opt.two_state[0];
    const double b = opt.two_state[1];
    Eigen::MatrixXd rows(2, 2);
    rows << 1.0 - a, a, b, 1.0 - b;
    chain.emplace(rows);
    rewards = Eigen::Vector2d(1.0, 0.0);
  } else {
    const auto m = resolve_mdp(src);
    if (opt.policy >= osplab::policy_count(m.num_states(), m.num_actions())) {
      throw UsageError("--policy out of range");
    }
    auto induced = osplab::induced_chain(m, osplab::Policy::decode(opt.policy, m.num_states(), m.num_actions()));
    chain.emplace(std::move(induced.matrix));
    rewards = std::move(induced.rewards);
  }
  const auto verdict = osplab::validate_uniform_ergodicity(*chain);
  if (!verdict.ok()) throw ValidationFailure("chain is not uniformly ergodic: " + verdict.message);

  osplab::TailCheckSpec spec{*chain, rewards};
  if (opt.start_state != "worst") {
    if (opt.start_state.rfind("fixed:", 0) != 0) throw UsageError("--start-state must be 'worst' or 'fixed:<s>'");
    spec.start_state = std::stoul(opt.start_state.substr(6));
  }
  spec.n = opt.n;
  spec.epsilon = opt.epsilon;
  spec.delta = opt.delta;
  spec.trials = opt.trials;
  spec.seed = opt.seed;

  std::vector<osplab::TailCheckReport> reports;
  if (opt.kind == "all" || opt.kind == "reward") reports.push_back(osplab::check_reward_concentration(spec));
  if (opt.kind == "all" || opt.kind == "ci") reports.push_back(osplab::check_reward_ci(spec));
  if (opt.kind == "all" || opt.kind == "tv") {
    for (auto& r : osplab::check_tv_concentration(spec)) reports.push_back(r);
  }
  const auto json = osplab::reports_to_json(reports);
  std::cout << json;
  if (!opt.out.empty()) write_text(opt.out, json);
  const bool failed = std::any_of(reports.begin(), reports.end(),
                                  [](const osplab::TailCheckReport& r) { return !r.vacuous && !r.pass; });
  return failed ? kExitCheck : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"osplab: optimistic sample-path RL on tabular MDPs"};
  app.require_subcommand(1);

  MdpSource gen_src;
  std::string gen_out;
  auto* generate = app.add_subcommand("generate", "Generate a random ergodic MDP as JSON");
  add_generator_options(*generate, gen_src);
  generate->add_option("--out", gen_out, "Output file (stdout when omitted)");

  MdpSource an_src;
  std::uint64_t an_horizon = 100000;
  double an_delta = 0.05;
  int an_cap = osplab::kDefaultMixingCap;
  std::string an_out;
  auto* analyze = app.add_subcommand("analyze", "Per-policy stationary analysis of an MDP");
  analyze->add_option("--mdp", an_src.file, "MDP JSON file")->check(CLI::ExistingFile);
  add_generator_options(*analyze, an_src);
  analyze->add_option("--horizon", an_horizon, "Horizon for the T-threshold report");
  analyze->add_option("--delta", an_delta, "Confidence for the T-threshold report");
  analyze->add_option("--mixing-cap", an_cap, "Mixing-time search cap");
  analyze->add_option("--out", an_out, "Write the report as JSON");

  MdpSource run_src;
  RunOptions run_opt;
  auto* run = app.add_subcommand("run", "Run OSP or a baseline over one or more seeds");
  run->add_option("--mdp", run_src.file, "MDP JSON file")->check(CLI::ExistingFile);
  add_generator_options(*run, run_src);
  run->add_option("--algo", run_opt.algo, "osp, oracle or uniform_random")
      ->check(CLI::IsMember({"osp", "oracle", "uniform_random"}));
  run->add_option("--horizon", run_opt.horizon, "Number of steps T")->check(CLI::PositiveNumber);
  run->add_option("--delta", run_opt.delta, "Confidence parameter in (0,1)")->check(CLI::Range(0.0, 1.0));
  run->add_option("--tmix", run_opt.tmix, "'auto' or a mixing-time bound");
  run->add_option("--seeds", run_opt.seeds, "Run seeds")->delimiter(',');
  run->add_option("--out", run_opt.out, "Output directory for CSV/JSON artifacts");
  run->add_option("--start-state", run_opt.start_state, "Path start state: env or fixed:<s>");
  run->add_option("--initial-state", run_opt.initial_state, "Environment initial state");
  run->add_option("--reconstruct-paths", run_opt.reconstruct, "incremental or scratch")
      ->check(CLI::IsMember({"incremental", "scratch"}));
  run->add_flag("--dump-log", run_opt.dump_log, "Also write the observation log CSV");
  run->add_option("--mixing-cap", run_opt.cap, "Mixing-time search cap");

  MdpSource conc_src;
  ConcentrationOptions conc_opt;
  auto* concentration = app.add_subcommand("concentration", "Monte-Carlo checks of the concentration bounds");
  concentration->add_option("--mdp", conc_src.file, "MDP JSON file")->check(CLI::ExistingFile);
  add_generator_options(*concentration, conc_src);
  concentration->add_option("--policy", conc_opt.policy, "Policy whose induced chain is checked");
  concentration->add_option("--two-state", conc_opt.two_state, "Two-state chain 'a,b' with rewards (1,0)")
      ->delimiter(',');
  concentration->add_option("--kind", conc_opt.kind, "all, reward, ci or tv")
      ->check(CLI::IsMember({"all", "reward", "ci", "tv"}));
  concentration->add_option("--n", conc_opt.n, "Trajectory length")->check(CLI::PositiveNumber);
  concentration->add_option("--epsilon", conc_opt.epsilon, "Deviation threshold");
  concentration->add_option("--delta", conc_opt.delta, "Confidence parameter");
  concentration->add_option("--trials", conc_opt.trials, "Monte-Carlo repetitions")->check(CLI::PositiveNumber);
  concentration->add_option("--start-state", conc_opt.start_state, "worst or fixed:<s>");
  concentration->add_option("--out", conc_opt.out, "Write the report JSON here too");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*generate) return cmd_generate(gen_src, gen_out);
    if (*analyze) return cmd_analyze(an_src, an_horizon, an_delta, an_cap, an_out);
    if (*run) return cmd_run(run_src, run_opt);
    if (*concentration) {
      // --seed drives both MDP generation and trajectory simulation.
      conc_opt.seed = conc_src.seed;
      return cmd_concentration(conc_src, conc_opt);
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const osplab::EnumerationLimitExceeded& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const osplab::MdpSchemaError& e) {
    std::cerr << "invalid MDP: " << e.what() << '\n';
    return kExitValidation;
  } catch (const ValidationFailure& e) {
    std::cerr << "validation failure: " << e.what() << '\n';
    return kExitValidation;
  } catch (const osplab::NotUniquelyErgodic& e) {
    std::cerr << "validation failure: " << e.what() << '\n';
    return kExitValidation;
  } catch (const osplab::MixingExceedsCap& e) {
    std::cerr << "validation failure: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
