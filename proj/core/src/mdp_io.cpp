#include "osplab/mdp_io.hpp"

#include "json.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace osplab {
namespace {

using nlohmann::json;

const json& require(const json& doc, const char* key) {
  if (!doc.contains(key)) throw MdpSchemaError(std::string("/") + key, "missing field");
  return doc.at(key);
}

std::size_t read_count(const json& value, const std::string& path) {
  if (!value.is_number_integer() || value.get<long long>() < 1) {
    throw MdpSchemaError(path, "expected a positive integer");
  }
  return static_cast<std::size_t>(value.get<long long>());
}

const json& require_array(const json& value, std::size_t size, const std::string& path) {
  if (!value.is_array()) throw MdpSchemaError(path, "expected an array");
  if (value.size() != size) {
    throw MdpSchemaError(path, "expected " + std::to_string(size) + " entries, got " +
                                   std::to_string(value.size()));
  }
  return value;
}

double read_probability(const json& value, const std::string& path) {
  if (!value.is_number()) throw MdpSchemaError(path, "expected a number");
  const double x = value.get<double>();
  if (!(x >= 0.0 && x <= 1.0)) throw MdpSchemaError(path, "value outside [0,1]");
  return x;
}

}  // namespace

MdpModel parse_mdp_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw MdpSchemaError("", std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw MdpSchemaError("", "expected an object");

  const auto S = read_count(require(doc, "num_states"), "/num_states");
  const auto A = read_count(require(doc, "num_actions"), "/num_actions");

  const auto& kind_value = require(doc, "reward_kind");
  if (!kind_value.is_string()) throw MdpSchemaError("/reward_kind", "expected a string");
  RewardKind kind;
  try {
    kind = reward_kind_from_string(kind_value.get<std::string>());
  } catch (const std::invalid_argument& e) {
    throw MdpSchemaError("/reward_kind", e.what());
  }

  std::vector<double> transitions;
  transitions.reserve(S * A * S);
  const auto& tensor = require_array(require(doc, "transitions"), S, "/transitions");
  for (std::size_t s = 0; s < S; ++s) {
    const std::string sp = "/transitions/" + std::to_string(s);
    const auto& per_action = require_array(tensor[s], A, sp);
    for (std::size_t a = 0; a < A; ++a) {
      const std::string ap = sp + "/" + std::to_string(a);
      const auto& row = require_array(per_action[a], S, ap);
      double total = 0.0;
      for (std::size_t t = 0; t < S; ++t) {
        const double p = read_probability(row[t], ap + "/" + std::to_string(t));
        total += p;
        transitions.push_back(p);
      }
      if (std::abs(total - 1.0) > kProbabilityTolerance) {
        std::ostringstream msg;
        msg << "row sums to " << total;
        throw MdpSchemaError(ap, msg.str());
      }
    }
  }

  std::vector<double> rewards;
  rewards.reserve(S * A);
  const auto& table = require_array(require(doc, "mean_rewards"), S, "/mean_rewards");
  for (std::size_t s = 0; s < S; ++s) {
    const std::string sp = "/mean_rewards/" + std::to_string(s);
    const auto& row = require_array(table[s], A, sp);
    for (std::size_t a = 0; a < A; ++a) {
      rewards.push_back(read_probability(row[a], sp + "/" + std::to_string(a)));
    }
  }
  return MdpModel(S, A, std::move(transitions), std::move(rewards), kind);
}

std::string mdp_to_json(const MdpModel& m) {
  json doc;
  doc["num_states"] = m.num_states();
  doc["num_actions"] = m.num_actions();
  json tensor = json::array();
  json table = json::array();
  for (std::size_t s = 0; s < m.num_states(); ++s) {
    json per_action = json::array();
    json reward_row = json::array();
    for (std::size_t a = 0; a < m.num_actions(); ++a) {
      const auto row = m.transition_row(s, a);
      per_action.push_back(json(std::vector<double>(row.begin(), row.end())));
      reward_row.push_back(m.mean_reward(s, a));
    }
    tensor.push_back(std::move(per_action));
    table.push_back(std::move(reward_row));
  }
  doc["transitions"] = std::move(tensor);
  doc["mean_rewards"] = std::move(table);
  doc["reward_kind"] = to_string(m.reward_kind());
  return doc.dump(2) + "\n";
}

MdpModel load_mdp(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open " + file.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_mdp_json(buffer.str());
}

void save_mdp(const MdpModel& m, const std::filesystem::path& file) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  out << mdp_to_json(m);
  if (!out) throw std::runtime_error("write failed for " + file.string());
}

}  // namespace osplab
