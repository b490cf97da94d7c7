#pragma once

#include "osplab/mdp_model.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <vector>

namespace osplab {

struct Observation {
  std::size_t s = 0;
  std::size_t a = 0;
  double r = 0.0;
  std::size_t s_next = 0;
  std::uint64_t t = 0;  // global time index of collection

  friend bool operator==(const Observation&, const Observation&) = default;
};

/// Append-only observation sequence with a per-(s,a) index of log positions.
class ObservationLog {
 public:
  ObservationLog(std::size_t num_states, std::size_t num_actions);

  void append(const Observation& obs);

  std::size_t size() const noexcept { return seq_.size(); }
  bool empty() const noexcept { return seq_.empty(); }
  const Observation& operator[](std::size_t pos) const { return seq_[pos]; }
  std::span<const Observation> observations() const noexcept { return seq_; }

  /// Log positions of observations with this (s, a), in log order.
  std::span<const std::size_t> occurrences(std::size_t s, std::size_t a) const {
    return index_[s * num_actions_ + a];
  }

  std::size_t num_states() const noexcept { return num_states_; }
  std::size_t num_actions() const noexcept { return num_actions_; }

 private:
  std::size_t num_states_;
  std::size_t num_actions_;
  std::vector<Observation> seq_;
  std::vector<std::vector<std::size_t>> index_;
};

/// Writes `t,s,a,r,s_next` rows.
void write_log_csv(const ObservationLog& log, std::ostream& out);

class PathIntegrityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Policy-consistent chain of distinct log entries that cannot be extended.
///
/// Because each step at state s takes the earliest unused (s, pi(s)) entry, the
/// used entries for every state form a prefix of that state's occurrence list;
/// the path keeps one cursor per state into those lists.
class SamplePath {
 public:
  SamplePath(Policy policy, std::size_t start_state);

  const Policy& policy() const noexcept { return policy_; }
  std::size_t start_state() const noexcept { return start_state_; }
  std::size_t terminal_state() const noexcept { return terminal_; }
  std::size_t size() const noexcept { return positions_.size(); }
  bool empty() const noexcept { return positions_.empty(); }
  double reward_sum() const noexcept { return reward_sum_; }

  /// Log positions of the steps, in path order.
  const std::vector<std::size_t>& positions() const noexcept { return positions_; }
  std::vector<Observation> steps(const ObservationLog& log) const;

  friend bool operator==(const SamplePath&, const SamplePath&) = default;

 private:
  friend SamplePath extend_path(SamplePath existing, const ObservationLog& log);

  Policy policy_;
  std::size_t start_state_;
  std::size_t terminal_;
  std::vector<std::size_t> positions_;
  std::vector<std::size_t> cursors_;  // used prefix length of occurrences(s, pi(s))
  double reward_sum_ = 0.0;
  std::size_t log_size_ = 0;           // log length at the last construct/extend
};

/// Path construction: from `start`, repeatedly append the earliest unused
/// observation of the form (current, pi(current), ., .) and move to its s_next.
SamplePath construct_path(const ObservationLog& log, const Policy& pi, std::size_t start);

/// Resumes construction from the terminal state of `existing` on a log that
/// extends the one it was built from. Equal to construct_path on the full log.
SamplePath extend_path(SamplePath existing, const ObservationLog& log);

struct RewardEstimate {
  std::optional<double> mean;  // empty for an empty path
  std::size_t n = 0;
};

RewardEstimate path_reward_estimate(const SamplePath& path);

struct PathInvariants {
  bool chain_consistent = true;
  bool policy_consistent = true;
  bool unique = true;
  bool non_extendible = true;

  bool all() const noexcept { return chain_consistent && policy_consistent && unique && non_extendible; }
};

/// Checks the four path invariants by direct inspection of the full log.
PathInvariants check_path_invariants(const SamplePath& path, const ObservationLog& log);

}  // namespace osplab
