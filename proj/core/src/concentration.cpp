#include "osplab/concentration.hpp"

#include "osplab/mdp_model.hpp"
#include "osplab/rng.hpp"
#include "parallel.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace osplab {
namespace {

struct ChainFacts {
  Distribution mu;
  int t_mix;
  double beta;
  double rho;
};

ChainFacts chain_facts(const TailCheckSpec& spec) {
  auto analysis = analyze_chain(spec.chain, spec.rewards, spec.mixing_cap);
  return {std::move(analysis.stationary), analysis.mixing_time, analysis.pseudo_spectral_gap,
          analysis.avg_reward};
}

void validate_spec(const TailCheckSpec& spec) {
  if (spec.n < 1) throw std::invalid_argument("n must be >= 1");
  if (spec.trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (static_cast<std::size_t>(spec.rewards.size()) != spec.chain.size()) {
    throw std::invalid_argument("reward vector size mismatch");
  }
  if (spec.start_state && *spec.start_state >= spec.chain.size()) {
    throw std::invalid_argument("start state out of range");
  }
}

// Worst start state by violation count; ties keep the smaller state.
TailCheckReport rate_report(BoundKind kind, const TailCheckSpec& spec, double parameter,
                            const std::vector<TrialSamples>& samples, double theoretical,
                            bool vacuous, const std::function<bool(const TrialStat&)>& violated) {
  TailCheckReport report;
  report.kind = kind;
  report.n = spec.n;
  report.epsilon_or_delta = parameter;
  report.trials = spec.trials;
  report.theoretical = theoretical;
  report.vacuous = vacuous;
  std::size_t worst = 0;
  bool first = true;
  for (const auto& per_start : samples) {
    const auto count = static_cast<std::size_t>(
        std::count_if(per_start.trials.begin(), per_start.trials.end(), violated));
    if (first || count > worst) {
      worst = count;
      report.start_state = per_start.start_state;
      first = false;
    }
  }
  report.empirical = static_cast<double>(worst) / static_cast<double>(spec.trials);
  report.margin = wilson_half_width(worst, spec.trials);
  report.pass = vacuous || report.empirical <= report.theoretical + report.margin;
  return report;
}

TailCheckReport mean_tv_report(const TailCheckSpec& spec, const std::vector<TrialSamples>& samples,
                               double theoretical) {
  TailCheckReport report;
  report.kind = BoundKind::tv_expectation;
  report.n = spec.n;
  report.epsilon_or_delta = 0.0;
  report.trials = spec.trials;
  report.theoretical = theoretical;
  report.vacuous = theoretical >= 1.0;
  bool first = true;
  for (const auto& per_start : samples) {
    double sum = 0.0;
    for (const auto& trial : per_start.trials) sum += trial.tv;
    const double mean = sum / static_cast<double>(spec.trials);
    double squares = 0.0;
    for (const auto& trial : per_start.trials) squares += (trial.tv - mean) * (trial.tv - mean);
    const double sd = spec.trials > 1 ? std::sqrt(squares / static_cast<double>(spec.trials - 1)) : 0.0;
    if (first || mean > report.empirical) {
      report.empirical = mean;
      report.margin = kZ99 * sd / std::sqrt(static_cast<double>(spec.trials));
      report.start_state = per_start.start_state;
      first = false;
    }
  }
  report.pass = report.vacuous || report.empirical <= report.theoretical + report.margin;
  return report;
}

}  // namespace

std::string to_string(BoundKind kind) {
  switch (kind) {
    case BoundKind::reward_mcdiarmid: return "reward_mcdiarmid";
    case BoundKind::reward_ci: return "reward_ci";
    case BoundKind::tv_concentration: return "tv_concentration";
    case BoundKind::tv_expectation: return "tv_expectation";
  }
  return "unknown";
}

std::vector<TrialSamples> simulate_trials(const TailCheckSpec& spec, const Distribution& mu) {
  validate_spec(spec);
  const std::size_t S = spec.chain.size();
  std::vector<std::vector<double>> rows(S);
  for (std::size_t s = 0; s < S; ++s) {
    rows[s].resize(S);
    for (std::size_t t = 0; t < S; ++t) rows[s][t] = spec.chain(s, t);
  }

  std::vector<std::size_t> starts;
  if (spec.start_state) {
    starts.push_back(*spec.start_state);
  } else {
    for (std::size_t s = 0; s < S; ++s) starts.push_back(s);
  }

  std::vector<TrialSamples> out(starts.size());
  for (std::size_t i = 0; i < starts.size(); ++i) {
    out[i].start_state = starts[i];
    out[i].trials.resize(spec.trials);
  }

  const double inv_n = 1.0 / static_cast<double>(spec.n);
  detail::parallel_for(starts.size() * spec.trials, [&](std::size_t job) {
    const std::size_t which = job / spec.trials;
    const std::size_t trial = job % spec.trials;
    const std::size_t start = starts[which];
    CounterRng rng(spec.seed ^ static_cast<std::uint64_t>(start * spec.trials + trial));
    std::vector<std::size_t> visits(S, 0);
    std::size_t state = start;
    double reward_sum = 0.0;
    for (std::size_t step = 0; step < spec.n; ++step) {
      if (step > 0) state = sample_categorical(rows[state], rng.next_uniform());
      ++visits[state];
      reward_sum += spec.rewards(static_cast<Eigen::Index>(state));
    }
    double tv = 0.0;
    for (std::size_t s = 0; s < S; ++s) tv += std::abs(static_cast<double>(visits[s]) * inv_n - mu[s]);
    out[which].trials[trial] = {reward_sum * inv_n, 0.5 * tv};
  });
  return out;
}

double mcdiarmid_tail_bound(double epsilon, std::size_t n, double t_mix) {
  return 2.0 * std::exp(-2.0 * epsilon * epsilon * static_cast<double>(n) / (9.0 * t_mix));
}

double reward_ci_radius(double t_mix, double delta, std::size_t n) {
  return std::sqrt(9.0 * t_mix * std::log(2.0 / delta) / (2.0 * static_cast<double>(n)));
}

double tv_radius(std::size_t num_states, double t_mix, double delta, std::size_t n) {
  return std::sqrt(38.0 * static_cast<double>(num_states) * t_mix * std::log(2.0 / delta) /
                   static_cast<double>(n));
}

double tv_expectation_bound(const Distribution& mu, std::size_t n, double beta) {
  double total = 0.0;
  for (std::size_t s = 0; s < mu.size(); ++s) {
    total += std::min(std::sqrt(8.0 * mu[s] / (static_cast<double>(n) * beta)), mu[s]);
  }
  return total;
}

double wilson_half_width(std::size_t successes, std::size_t trials, double z) {
  if (trials == 0) throw std::invalid_argument("wilson_half_width: no trials");
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  return z / (1.0 + z2 / n) * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
}

TailCheckReport check_reward_concentration(const TailCheckSpec& spec) {
  if (!(spec.epsilon > 0.0)) throw std::invalid_argument("epsilon must be > 0");
  const auto facts = chain_facts(spec);
  const auto samples = simulate_trials(spec, facts.mu);
  const double bound = mcdiarmid_tail_bound(spec.epsilon, spec.n, facts.t_mix);
  return rate_report(BoundKind::reward_mcdiarmid, spec, spec.epsilon, samples, bound, bound >= 1.0,
                     [&](const TrialStat& s) { return std::abs(s.reward_mean - facts.rho) >= spec.epsilon; });
}

TailCheckReport check_reward_ci(const TailCheckSpec& spec) {
  if (!(spec.delta > 0.0)) throw std::invalid_argument("delta must be > 0");
  const auto facts = chain_facts(spec);
  const auto samples = simulate_trials(spec, facts.mu);
  const double radius = reward_ci_radius(facts.t_mix, spec.delta, spec.n);
  return rate_report(BoundKind::reward_ci, spec, spec.delta, samples, spec.delta, spec.delta >= 1.0,
                     [&](const TrialStat& s) { return std::abs(s.reward_mean - facts.rho) > radius; });
}

TailCheckReport check_tv_expectation(const TailCheckSpec& spec) {
  const auto facts = chain_facts(spec);
  const auto samples = simulate_trials(spec, facts.mu);
  return mean_tv_report(spec, samples, tv_expectation_bound(facts.mu, spec.n, facts.beta));
}

std::array<TailCheckReport, 2> check_tv_concentration(const TailCheckSpec& spec) {
  if (!(spec.delta > 0.0)) throw std::invalid_argument("delta must be > 0");
  const auto facts = chain_facts(spec);
  const auto samples = simulate_trials(spec, facts.mu);
  const double radius = tv_radius(spec.chain.size(), facts.t_mix, spec.delta, spec.n);
  return {rate_report(BoundKind::tv_concentration, spec, spec.delta, samples, spec.delta,
                      spec.delta >= 1.0, [&](const TrialStat& s) { return s.tv > radius; }),
          mean_tv_report(spec, samples, tv_expectation_bound(facts.mu, spec.n, facts.beta))};
}

namespace {

nlohmann::ordered_json report_json(const TailCheckReport& r) {
  nlohmann::ordered_json j;
  j["bound_kind"] = to_string(r.kind);
  j["n"] = r.n;
  j["epsilon_or_delta"] = r.epsilon_or_delta;
  j["trials"] = r.trials;
  j["empirical"] = r.empirical;
  j["theoretical"] = r.theoretical;
  j["margin"] = r.margin;
  j["vacuous"] = r.vacuous;
  j["pass"] = r.pass;
  return j;
}

}  // namespace

std::string report_to_json(const TailCheckReport& report) { return report_json(report).dump(2) + "\n"; }

std::string reports_to_json(const std::vector<TailCheckReport>& reports) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& r : reports) arr.push_back(report_json(r));
  return arr.dump(2) + "\n";
}

}  // namespace osplab
