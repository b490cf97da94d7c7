#include "osplab/sample_path.hpp"

#include "osplab/text_format.hpp"

#include <unordered_set>

namespace osplab {

ObservationLog::ObservationLog(std::size_t num_states, std::size_t num_actions)
    : num_states_(num_states), num_actions_(num_actions), index_(num_states * num_actions) {
  if (num_states == 0 || num_actions == 0) throw std::invalid_argument("S and A must be >= 1");
}

void ObservationLog::append(const Observation& obs) {
  if (obs.s >= num_states_ || obs.s_next >= num_states_ || obs.a >= num_actions_) {
    throw std::invalid_argument("observation index out of range");
  }
  if (!(obs.r >= 0.0 && obs.r <= 1.0)) throw std::invalid_argument("observation reward outside [0,1]");
  index_[obs.s * num_actions_ + obs.a].push_back(seq_.size());
  seq_.push_back(obs);
}

void write_log_csv(const ObservationLog& log, std::ostream& out) {
  out << "t,s,a,r,s_next\n";
  for (const auto& o : log.observations()) {
    out << o.t << ',' << o.s << ',' << o.a << ',' << format_double(o.r) << ',' << o.s_next << '\n';
  }
}

SamplePath::SamplePath(Policy policy, std::size_t start_state)
    : policy_(std::move(policy)),
      start_state_(start_state),
      terminal_(start_state),
      cursors_(policy_.num_states(), 0) {
  if (start_state >= policy_.num_states()) throw std::invalid_argument("start state out of range");
}

std::vector<Observation> SamplePath::steps(const ObservationLog& log) const {
  std::vector<Observation> out;
  out.reserve(positions_.size());
  for (auto pos : positions_) out.push_back(log[pos]);
  return out;
}

SamplePath construct_path(const ObservationLog& log, const Policy& pi, std::size_t start) {
  return extend_path(SamplePath(pi, start), log);
}

SamplePath extend_path(SamplePath path, const ObservationLog& log) {
  const auto& pi = path.policy_;
  if (pi.num_states() != log.num_states()) throw PathIntegrityError("policy/log state mismatch");
  if (path.log_size_ > log.size()) throw PathIntegrityError("log is shorter than the path's source log");
  if (!path.positions_.empty()) {
    const auto last = path.positions_.back();
    if (last >= log.size() || log[last].s_next != path.terminal_ || log[last].a != pi(log[last].s)) {
      throw PathIntegrityError("path is inconsistent with the log prefix");
    }
  }
  std::size_t consumed = 0;
  for (std::size_t s = 0; s < pi.num_states(); ++s) {
    if (path.cursors_[s] > log.occurrences(s, pi(s)).size()) {
      throw PathIntegrityError("path uses more observations than the log holds");
    }
    consumed += path.cursors_[s];
  }
  if (consumed != path.positions_.size()) throw PathIntegrityError("path cursors are inconsistent");

  auto current = path.terminal_;
  for (;;) {
    const auto candidates = log.occurrences(current, pi(current));
    auto& cursor = path.cursors_[current];
    if (cursor == candidates.size()) break;
    const auto pos = candidates[cursor++];
    path.positions_.push_back(pos);
    path.reward_sum_ += log[pos].r;
    current = log[pos].s_next;
  }
  path.terminal_ = current;
  path.log_size_ = log.size();
  return path;
}

RewardEstimate path_reward_estimate(const SamplePath& path) {
  if (path.empty()) return {};
  return {path.reward_sum() / static_cast<double>(path.size()), path.size()};
}

PathInvariants check_path_invariants(const SamplePath& path, const ObservationLog& log) {
  PathInvariants out;
  const auto& pi = path.policy();
  const auto& positions = path.positions();
  std::unordered_set<std::size_t> used;
  std::size_t expected_state = path.start_state();
  for (auto pos : positions) {
    if (pos >= log.size()) {
      out.chain_consistent = out.policy_consistent = out.unique = false;
      return out;
    }
    const auto& o = log[pos];
    if (o.s != expected_state) out.chain_consistent = false;
    if (o.a != pi(o.s)) out.policy_consistent = false;
    if (!used.insert(pos).second) out.unique = false;
    expected_state = o.s_next;
  }
  if (expected_state != path.terminal_state()) out.chain_consistent = false;
  for (std::size_t pos = 0; pos < log.size(); ++pos) {
    const auto& o = log[pos];
    if (o.s == expected_state && o.a == pi(o.s) && !used.contains(pos)) {
      out.non_extendible = false;
      break;
    }
  }
  return out;
}

}  // namespace osplab
