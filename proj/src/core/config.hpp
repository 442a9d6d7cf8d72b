#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "core/ensemble.hpp"
#include "core/oracle.hpp"
#include "core/strategies.hpp"

namespace oim {

struct MemberSpec {
  std::string name;
  // Per-member overrides of [strategy] keys.
  std::vector<std::pair<std::string, std::string>> overrides;
};

struct ExperimentConfig {
  // Edge-list path, or "synthetic:ba:<nodes>:<attach>[:<seed>]".
  std::string graph = "";
  bool undirected = true;
  std::size_t feature_dim = 10;
  std::size_t k = 10;
  std::size_t rounds = 100;
  std::size_t repetitions = 3;
  double eta = 1.0;
  std::uint64_t master_seed = 1;
  std::size_t optimal_mc_samples = 10000;
  std::size_t threads = 1;
  std::string output = "";

  std::string strategy = "ensemble_rand_mean";
  std::vector<MemberSpec> members;
  StrategyParams params;
  double gamma = 0.1;
  FeedbackMode feedback = FeedbackMode::kShared;

  OracleConfig oracle;

  // Throws kArgument on any violated invariant.
  void validate() const;
};

// One settable key. Keys are unique across sections, so every key doubles as
// a CLI flag name.
struct ConfigKey {
  std::string section;
  std::string name;
  std::string help;
  std::function<void(ExperimentConfig&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

const std::vector<ConfigKey>& config_keys();

// Throws kArgument for unknown keys, kParse for malformed values.
void set_config_value(ExperimentConfig& cfg, const std::string& key, const std::string& value);

// INI-style file: [experiment], [strategy], [oracle] sections of key = value.
ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig parse_config(const std::string& text);

// section -> key -> value, in registry order.
std::vector<std::pair<std::string, std::string>> config_entries(const ExperimentConfig& cfg);

// "exploit_mean, explore_rand(explore_hi=1)" -> member specs.
std::vector<MemberSpec> parse_member_list(const std::string& text);
std::string format_member_list(const std::vector<MemberSpec>& members);

}  // namespace oim
