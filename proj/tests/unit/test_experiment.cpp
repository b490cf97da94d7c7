#include "doctest.h"

#include "osplab/experiment.hpp"

#include "json.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

using namespace osplab;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

fs::path scratch_dir(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("osplab_test_experiment_" + name);
  fs::remove_all(dir);
  return dir;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& file) {
  std::ifstream in(file);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    rows.push_back(std::move(fields));
  }
  return rows;
}

}  // namespace

TEST_CASE("algorithm names round-trip") {
  for (auto a : {Algorithm::osp, Algorithm::oracle, Algorithm::uniform_random}) {
    CHECK(algorithm_from_string(to_string(a)) == a);
  }
  CHECK_THROWS_AS(algorithm_from_string("greedy"), std::invalid_argument);
}

TEST_CASE("baselines") {
  const auto m = generate_ergodic_mdp(3, 2, 4);
  const auto analysis = analyze_mdp(m);
  const auto opt = Policy::decode(analysis.optimal_policy, 3, 2);

  const auto fixed = run_fixed_policy(m, opt, 9, 500, 1, analysis.rho_star);
  CHECK(fixed.states.front() == 1);
  for (std::size_t t = 0; t < fixed.actions.size(); ++t) CHECK(fixed.actions[t] == opt(fixed.states[t]));
  CHECK(fixed.phases.empty());
  CHECK(fixed.K == 0);

  const auto uniform = run_uniform_random(m, 9, 4000, 0, analysis.rho_star);
  std::vector<std::size_t> counts(2, 0);
  for (auto a : uniform.actions) ++counts[a];
  CHECK(std::abs(static_cast<double>(counts[0]) / 4000.0 - 0.5) < 0.05);
  CHECK(uniform.regret_curve.size() == 4000);
  CHECK_THROWS_AS(run_uniform_random(m, 9, 10, 3, 0.0), std::invalid_argument);
}

TEST_CASE("oracle regret is sublinear while uniform play is linear") {
  const auto m = generate_ergodic_mdp(3, 2, 4);
  const auto analysis = analyze_mdp(m);
  const auto opt = Policy::decode(analysis.optimal_policy, 3, 2);
  // Average gap of the uniform-random chain is strictly positive unless all policies tie.
  double worst_rho = analysis.rho_star;
  for (const auto& p : analysis.per_policy) worst_rho = std::min(worst_rho, p.avg_reward);
  REQUIRE(analysis.rho_star - worst_rho > 0.05);

  const std::uint64_t T = 200000;
  double oracle_regret = 0.0;
  double uniform_regret = 0.0;
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    oracle_regret += run_fixed_policy(m, opt, seed, T, 0, analysis.rho_star).final_regret() / 4;
    uniform_regret += run_uniform_random(m, seed, T, 0, analysis.rho_star).final_regret() / 4;
  }
  CHECK(std::abs(oracle_regret) / static_cast<double>(T) < 0.01);
  CHECK(uniform_regret / static_cast<double>(T) > 0.01);
}

TEST_CASE("experiment artifacts are deterministic and consistent") {
  const auto m = generate_ergodic_mdp(2, 2, 7);
  const auto analysis = analyze_mdp(m);
  ExperimentSpec spec;
  spec.horizon = 3000;
  spec.delta = 0.05;
  spec.seeds = {1, 2, 3};
  spec.dump_log = true;

  const auto dir_a = scratch_dir("a");
  const auto dir_b = scratch_dir("b");
  spec.out_dir = dir_a;
  const auto summary = run_experiment(m, analysis, spec);
  spec.out_dir = dir_b;
  run_experiment(m, analysis, spec);

  std::size_t files = 0;
  for (const auto& entry : fs::directory_iterator(dir_a)) {
    ++files;
    CHECK(slurp(entry.path()) == slurp(dir_b / entry.path().filename()));
  }
  CHECK(files == 3 * 3 + 1);

  const auto json = nlohmann::json::parse(slurp(dir_a / "osp_summary.json"));
  CHECK(json["algorithm"] == "osp");
  CHECK(json["per_seed"].size() == 3);
  CHECK(json["phase_check"] == "not_applicable");

  double sum = 0.0;
  for (std::size_t i = 0; i < spec.seeds.size(); ++i) {
    const auto seed = spec.seeds[i];
    const auto trajectory = read_csv(dir_a / ("osp_seed" + std::to_string(seed) + "_trajectory.csv"));
    REQUIRE(trajectory.size() == spec.horizon + 1);
    CHECK(trajectory.front() == std::vector<std::string>{"t", "s", "a", "r", "cumulative_regret", "phase_k"});
    double rewards = 0.0;
    for (std::size_t t = 1; t < trajectory.size(); ++t) rewards += std::stod(trajectory[t][3]);
    const double regret = std::stod(trajectory.back()[4]);
    CHECK(regret == doctest::Approx(spec.horizon * analysis.rho_star - rewards).epsilon(1e-9));
    CHECK(json["per_seed"][i]["final_regret"].get<double>() == doctest::Approx(regret).epsilon(1e-12));

    const auto phases = read_csv(dir_a / ("osp_seed" + std::to_string(seed) + "_phases.csv"));
    CHECK(json["per_seed"][i]["phases"].get<std::size_t>() == phases.size() - 1);
    CHECK(std::stoul(trajectory.back()[5]) == phases.size() - 1);
    sum += regret;

    const auto log = read_csv(dir_a / ("osp_seed" + std::to_string(seed) + "_log.csv"));
    CHECK(log.size() == spec.horizon + 1);
  }
  CHECK(json["mean_regret"].get<double>() == doctest::Approx(sum / 3).epsilon(1e-12));
  CHECK(summary.mean_regret == json["mean_regret"].get<double>());
  fs::remove_all(dir_a);
  fs::remove_all(dir_b);
}

TEST_CASE("t_mix override reaches the learner") {
  const auto m = generate_ergodic_mdp(2, 2, 7);
  const auto analysis = analyze_mdp(m);
  ExperimentSpec spec;
  spec.horizon = 100;
  spec.seeds = {1};
  spec.t_mix_override = 7;
  CHECK(osp_config_for(spec, analysis, 5).t_mix_bound == 7);
  CHECK(osp_config_for(spec, analysis, 5).seed == 5);
  spec.t_mix_override.reset();
  CHECK(osp_config_for(spec, analysis, 5).t_mix_bound == analysis.mdp_mixing_time);
}

TEST_CASE("run_experiment validation") {
  const auto m = generate_ergodic_mdp(2, 2, 7);
  const auto analysis = analyze_mdp(m);
  ExperimentSpec spec;
  spec.horizon = 100;
  CHECK_THROWS_AS(run_experiment(m, analysis, spec), std::invalid_argument);
  spec.seeds = {1};
  spec.delta = 1.5;
  CHECK_THROWS_AS(run_experiment(m, analysis, spec), std::invalid_argument);
}
