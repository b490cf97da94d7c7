#include "doctest.h"
#include "oracles.hpp"

#include "osplab/experiment.hpp"
#include "osplab/osp.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

using namespace osplab;

namespace {

OspConfig config(std::uint64_t T, int t_mix, double delta, std::uint64_t seed) {
  OspConfig cfg;
  cfg.horizon = T;
  cfg.t_mix_bound = t_mix;
  cfg.delta = delta;
  cfg.seed = seed;
  return cfg;
}

}  // namespace

TEST_CASE("optimistic_value") {
  OspConfig cfg = config(1, 1, 8.0, 0);
  CHECK(std::isinf(optimistic_value(0.3, 0, 1, cfg)));
  CHECK(optimistic_value(0.3, 5, 1, cfg) == 0.3);  // ln(8 * 1 * 1 / 8) = 0

  cfg.delta = 8.0 / std::exp(1.0);
  CHECK(optimistic_value(0.25, 8, 1, cfg) == doctest::Approx(1.25).epsilon(1e-14));
}

TEST_CASE("select_policy") {
  const double inf = std::numeric_limits<double>::infinity();
  CHECK(select_policy(std::vector<double>{inf, inf, inf}) == 0);
  CHECK(select_policy(std::vector<double>{0.3, 0.7, 0.7}) == 1);
  CHECK(select_policy(std::vector<double>{0.1}) == 0);
  CHECK(select_policy(std::vector<double>{0.9, inf, 0.3, inf}) == 1);
  CHECK_THROWS_AS(select_policy(std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("phase_length") {
  CHECK(phase_length(0, 4, 2, 2) == 1);
  CHECK(phase_length(3, 4, 2, 2) == 3);
  CHECK(phase_length(3, 400, 2, 2) == 10);
  CHECK(phase_length(50, 400, 2, 2) == 50);
  CHECK(phase_length(0, 401, 2, 2) == 11);
  CHECK(phase_length(0, 10000, 1, 3) == 58);  // ceil(57.735)
}

TEST_CASE("regret_bound") {
  // 4 ln(1.6e10) * 200, evaluated independently.
  CHECK(regret_bound(1e4, 1, 2, 2, 0.05) == doctest::Approx(18796.683647348953).epsilon(1e-12));
  for (double T : {1e3, 1e4, 1e5, 1e6}) {
    const double ratio = regret_bound(4 * T, 3, 2, 2, 0.05) / regret_bound(T, 3, 2, 2, 0.05);
    CHECK(ratio > 2.0);
    CHECK(ratio == doctest::Approx(2.0 * std::log(8.0 * 16.0 * T * T / 0.05) / std::log(8.0 * T * T / 0.05)));
  }
  CHECK(regret_bound(1e4, 2, 3, 2, 0.01) > regret_bound(1e4, 2, 3, 2, 0.05));
}

TEST_CASE("t_threshold") {
  const auto m = generate_ergodic_mdp(2, 2, 7);
  const auto analysis = analyze_mdp(m);
  CHECK(!t_threshold(analysis, 2, 2, 10, 0.05).met);
  // S^3 A (152 t_mix ln(8T^2/delta) / mu_min^2)^2 for the fixture, computed independently.
  CHECK(t_threshold(analysis, 2, 2, 1e5, 0.05).required == doctest::Approx(8597417945301.48).epsilon(1e-9));

  MdpAnalysis single;
  single.mdp_mixing_time = 3;
  single.mu_min = 1.0;
  const auto th = t_threshold(single, 1, 3, 1e6, 0.1);
  CHECK(th.required == doctest::Approx(3.0 * std::pow(152.0 * 3.0 * std::log(8e12 / 0.1), 2)).epsilon(1e-12));
}

TEST_CASE("phase_count_bound") {
  CHECK(phase_count_bound(1, 1, 4.0 / 3.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(phase_count_bound(2, 2, 400) == doctest::Approx(64.03138223720877).epsilon(1e-12));
  CHECK(phase_count_bound(2, 2, 401) > phase_count_bound(2, 2, 400));
  CHECK_THROWS_AS(phase_count_bound(2, 2, 4), std::domain_error);
}

TEST_CASE("run_osp bookkeeping invariants") {
  const auto m = generate_ergodic_mdp(2, 2, 7);
  const auto analysis = analyze_mdp(m);
  const auto cfg = config(20000, analysis.mdp_mixing_time, 0.05, 3);
  const auto r = run_osp(m, cfg, analysis.rho_star);

  CHECK(r.rewards.size() == cfg.horizon);
  CHECK(r.K == r.phases.size());
  CHECK(r.K == r.K_minus + r.K_plus);
  std::size_t executed = 0;
  const auto min_len = phase_length(0, cfg.horizon, 2, 2);
  for (std::size_t i = 0; i < r.phases.size(); ++i) {
    const auto& p = r.phases[i];
    CHECK(p.k == i + 1);
    CHECK(p.start_t == executed + 1);
    CHECK(p.n_planned == std::max(p.n_prev, min_len));
    CHECK(p.n_executed <= p.n_planned);
    if (i + 1 < r.phases.size()) CHECK(p.n_executed == p.n_planned);
    CHECK(std::isinf(p.rho_tilde) == (p.n_prev == 0));
    if (p.rho_hat) CHECK(p.rho_tilde >= *p.rho_hat);
    executed += p.n_executed;
  }
  CHECK(executed == cfg.horizon);

  const double collected = std::accumulate(r.rewards.begin(), r.rewards.end(), 0.0);
  CHECK(r.final_regret() == doctest::Approx(cfg.horizon * analysis.rho_star - collected).epsilon(1e-12));

  REQUIRE(r.log.has_value());
  CHECK(r.log->size() == cfg.horizon);
  for (std::size_t i = 0; i + 1 < r.log->size(); ++i) CHECK((*r.log)[i].s_next == (*r.log)[i + 1].s);
}

TEST_CASE("run_osp is deterministic and path modes agree") {
  const auto m = generate_ergodic_mdp(3, 2, 11);
  const auto analysis = analyze_mdp(m);
  for (auto mode : {StartStateMode::env, StartStateMode::fixed}) {
    auto cfg = config(5000, analysis.mdp_mixing_time, 0.1, 8);
    cfg.start_mode = mode;
    cfg.fixed_start_state = 2;
    const auto a = run_osp(m, cfg, analysis.rho_star);
    const auto b = run_osp(m, cfg, analysis.rho_star);
    cfg.path_mode = PathMode::scratch;
    const auto c = run_osp(m, cfg, analysis.rho_star);
    CHECK(a.rewards == b.rewards);
    CHECK(a.actions == c.actions);
    CHECK(a.rewards == c.rewards);
    REQUIRE(a.phases.size() == c.phases.size());
    for (std::size_t i = 0; i < a.phases.size(); ++i) {
      CHECK(a.phases[i].policy == c.phases[i].policy);
      CHECK(a.phases[i].n_prev == c.phases[i].n_prev);
      CHECK(a.phases[i].rho_tilde == c.phases[i].rho_tilde);
    }
  }
}

TEST_CASE("run_osp with one action reduces to that policy's trajectory") {
  const MdpModel m(3, 1, {0.2, 0.5, 0.3, 0.6, 0.1, 0.3, 0.3, 0.3, 0.4}, {0.9, 0.1, 0.5}, RewardKind::bernoulli);
  const auto analysis = analyze_mdp(m);
  const auto r = run_osp(m, config(3000, analysis.mdp_mixing_time, 0.05, 21), analysis.rho_star);
  const auto fixed = run_fixed_policy(m, Policy({0, 0, 0}, 1), 21, 3000, 0, analysis.rho_star);
  for (const auto& p : r.phases) CHECK(p.policy == 0);
  CHECK(r.rewards == fixed.rewards);
  CHECK(r.final_regret() == fixed.final_regret());
}

TEST_CASE("run_osp with one state matches a standalone phased UCB") {
  const std::vector<double> means{0.3, 0.5, 0.45};
  const MdpModel m(1, 3, {1.0, 1.0, 1.0}, means, RewardKind::bernoulli);
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto r = run_osp(m, config(4000, 1, 0.05, seed), 0.5);
    CHECK(r.actions == oracle::phased_ucb_pulls(means, seed, 4000, 0.05, 1));
  }
}

TEST_CASE("run_osp rejects bad input") {
  const auto m = generate_ergodic_mdp(2, 2, 1);
  auto cfg = config(100, 1, 0.05, 0);
  cfg.delta = 1.0;
  CHECK_THROWS_AS(run_osp(m, cfg, 0.0), std::invalid_argument);
  cfg = config(0, 1, 0.05, 0);
  CHECK_THROWS_AS(run_osp(m, cfg, 0.0), std::invalid_argument);
  cfg = config(100, 0, 0.05, 0);
  CHECK_THROWS_AS(run_osp(m, cfg, 0.0), std::invalid_argument);
  cfg = config(100, 1, 0.05, 0);
  cfg.initial_state = 5;
  CHECK_THROWS_AS(run_osp(m, cfg, 0.0), std::invalid_argument);

  const MdpModel wide(20, 2, std::vector<double>(20 * 2 * 20, 0.05), std::vector<double>(40, 0.5),
                      RewardKind::bernoulli);
  CHECK_THROWS_AS(run_osp(wide, config(10, 1, 0.05, 0), 0.0), EnumerationLimitExceeded);
}

TEST_CASE("phase CSV serializes infinity as inf") {
  const auto m = generate_ergodic_mdp(2, 2, 7);
  const auto r = run_osp(m, config(400, 2, 0.05, 1), 0.5);
  std::ostringstream csv;
  write_phases_csv(r, csv);
  const auto text = csv.str();
  CHECK(text.rfind("k,policy_id,n_prev,n_planned,n_executed,rho_hat,rho_tilde,start_t\n", 0) == 0);
  CHECK(text.find("1,0,0,10,10,nan,inf,1\n") != std::string::npos);
}
