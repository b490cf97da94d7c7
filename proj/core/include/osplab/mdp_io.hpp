#pragma once

#include "osplab/mdp_model.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>

namespace osplab {

/// Schema violation in an MDP document; `path()` is a JSON pointer to the offending value.
class MdpSchemaError : public std::runtime_error {
 public:
  MdpSchemaError(std::string path, const std::string& what)
      : std::runtime_error(path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

/// {"num_states", "num_actions", "transitions" [S][A][S], "mean_rewards" [S][A], "reward_kind"}
MdpModel parse_mdp_json(const std::string& text);
std::string mdp_to_json(const MdpModel& m);

MdpModel load_mdp(const std::filesystem::path& file);
void save_mdp(const MdpModel& m, const std::filesystem::path& file);

}  // namespace osplab
