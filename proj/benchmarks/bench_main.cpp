#include "osplab/chain_analysis.hpp"
#include "osplab/mdp_model.hpp"
#include "osplab/osp.hpp"
#include "osplab/sample_path.hpp"

#include <benchmark/benchmark.h>

namespace {

osplab::ObservationLog simulated_log(const osplab::MdpModel& m, std::size_t length, std::uint64_t seed) {
  osplab::ObservationLog log(m.num_states(), m.num_actions());
  osplab::EnvState env(seed, 0);
  osplab::CounterRng actions(osplab::derive_seed(seed, 1));
  for (std::size_t t = 0; t < length; ++t) {
    const auto s = env.current_state;
    const auto a = static_cast<std::size_t>(actions.next_below(m.num_actions()));
    const auto outcome = osplab::env_step(m, env, a);
    log.append({s, a, outcome.reward, outcome.next_state, t + 1});
  }
  return log;
}

void BM_EnvStep(benchmark::State& state) {
  const auto m = osplab::generate_ergodic_mdp(static_cast<std::size_t>(state.range(0)), 4, 1);
  osplab::EnvState env(3, 0);
  for (auto _ : state) benchmark::DoNotOptimize(osplab::env_step(m, env, 1));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_EnvStep)->Arg(2)->Arg(16)->Arg(128);

void BM_ConstructPath(benchmark::State& state) {
  const auto m = osplab::generate_ergodic_mdp(8, 4, 1);
  const auto log = simulated_log(m, static_cast<std::size_t>(state.range(0)), 5);
  const auto pi = osplab::Policy::decode(1234, 8, 4);
  for (auto _ : state) benchmark::DoNotOptimize(osplab::construct_path(log, pi, 0));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ConstructPath)->Range(1 << 10, 1 << 18);

void BM_ExtendPath(benchmark::State& state) {
  const auto m = osplab::generate_ergodic_mdp(8, 4, 1);
  const auto length = static_cast<std::size_t>(state.range(0));
  const auto log = simulated_log(m, length, 5);
  osplab::ObservationLog head(8, 4);
  for (std::size_t i = 0; i + 1000 < length; ++i) head.append(log[i]);
  const auto pi = osplab::Policy::decode(1234, 8, 4);
  const auto existing = osplab::construct_path(head, pi, 0);
  for (auto _ : state) benchmark::DoNotOptimize(osplab::extend_path(existing, log));
}
BENCHMARK(BM_ExtendPath)->Range(1 << 12, 1 << 18);

void BM_AnalyzeMdp(benchmark::State& state) {
  const auto S = static_cast<std::size_t>(state.range(0));
  const auto m = osplab::generate_ergodic_mdp(S, 2, 1);
  for (auto _ : state) benchmark::DoNotOptimize(osplab::analyze_mdp(m));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(osplab::policy_count(S, 2)));
}
BENCHMARK(BM_AnalyzeMdp)->DenseRange(2, 8, 2)->Unit(benchmark::kMillisecond);

void BM_PseudoSpectralGap(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto m = osplab::generate_ergodic_mdp(n, 1, 2, 0.02);
  const auto chain = osplab::induced_chain(m, osplab::Policy::decode(0, n, 1));
  const auto mu = osplab::stationary_distribution(chain.matrix);
  const int t_mix = osplab::mixing_time(chain.matrix, mu);
  for (auto _ : state) benchmark::DoNotOptimize(osplab::pseudo_spectral_gap(chain.matrix, mu, 2 * t_mix));
}
BENCHMARK(BM_PseudoSpectralGap)->RangeMultiplier(2)->Range(4, 64)->Unit(benchmark::kMicrosecond);

void BM_RunOsp(benchmark::State& state) {
  const auto m = osplab::generate_ergodic_mdp(3, 2, 7);
  const auto analysis = osplab::analyze_mdp(m);
  osplab::OspConfig cfg;
  cfg.horizon = static_cast<std::uint64_t>(state.range(0));
  cfg.t_mix_bound = analysis.mdp_mixing_time;
  for (auto _ : state) benchmark::DoNotOptimize(osplab::run_osp(m, cfg, analysis.rho_star));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RunOsp)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
