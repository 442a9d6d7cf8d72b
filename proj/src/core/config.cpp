#include "core/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <boost/algorithm/string/trim.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include "core/error.hpp"

namespace oim {

namespace {

std::string trimmed(std::string s) {
  boost::algorithm::trim(s);
  return s;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const char* kind) {
  throw_error(ErrorCode::kParse, fmt::format("{}: expected {}, got \"{}\"", key, kind, value));
}

std::uint64_t to_u64(const std::string& key, const std::string& raw) {
  const std::string value = trimmed(raw);
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (value.empty() || ec != std::errc() || ptr != value.data() + value.size()) {
    bad_value(key, raw, "a nonnegative integer");
  }
  return out;
}

std::size_t to_size(const std::string& key, const std::string& raw) {
  return static_cast<std::size_t>(to_u64(key, raw));
}

double to_double(const std::string& key, const std::string& raw) {
  const std::string value = trimmed(raw);
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (value.empty() || ec != std::errc() || ptr != value.data() + value.size()) {
    bad_value(key, raw, "a number");
  }
  return out;
}

bool to_bool(const std::string& key, const std::string& raw) {
  const std::string value = trimmed(raw);
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  bad_value(key, raw, "a boolean");
}

std::string num(double v) { return fmt::format("{}", v); }

std::vector<ConfigKey> build_keys() {
  std::vector<ConfigKey> keys;
  auto add = [&](std::string section, std::string name, std::string help,
                 std::function<void(ExperimentConfig&, const std::string&)> set,
                 std::function<std::string(const ExperimentConfig&)> get) {
    keys.push_back({std::move(section), std::move(name), std::move(help), std::move(set),
                    std::move(get)});
  };
#define OIM_SIZE_KEY(section, key, field, help)                                              \
  add(section, key, help, [](ExperimentConfig& c, const std::string& v) { c.field = to_size(key, v); }, \
      [](const ExperimentConfig& c) { return std::to_string(c.field); })
#define OIM_DOUBLE_KEY(section, key, field, help)                                               \
  add(section, key, help, [](ExperimentConfig& c, const std::string& v) { c.field = to_double(key, v); }, \
      [](const ExperimentConfig& c) { return num(c.field); })

  add("experiment", "graph", "edge-list path or synthetic:ba:<nodes>:<attach>[:<seed>]",
      [](ExperimentConfig& c, const std::string& v) { c.graph = trimmed(v); },
      [](const ExperimentConfig& c) { return c.graph; });
  add("experiment", "undirected", "expand each input pair into two directed edges",
      [](ExperimentConfig& c, const std::string& v) { c.undirected = to_bool("undirected", v); },
      [](const ExperimentConfig& c) { return std::string(c.undirected ? "true" : "false"); });
  OIM_SIZE_KEY("experiment", "feature_dim", feature_dim, "edge feature dimension d");
  OIM_SIZE_KEY("experiment", "k", k, "seed budget per round");
  OIM_SIZE_KEY("experiment", "rounds", rounds, "rounds T per repetition");
  OIM_SIZE_KEY("experiment", "repetitions", repetitions, "independent repetitions");
  OIM_DOUBLE_KEY("experiment", "eta", eta, "regret scale in (0,1]");
  add("experiment", "master_seed", "master random seed",
      [](ExperimentConfig& c, const std::string& v) { c.master_seed = to_u64("master_seed", v); },
      [](const ExperimentConfig& c) { return std::to_string(c.master_seed); });
  OIM_SIZE_KEY("experiment", "optimal_mc_samples", optimal_mc_samples,
               "simulations used to evaluate the optimal seed set");
  OIM_SIZE_KEY("experiment", "threads", threads, "worker threads (0 = hardware)");
  add("experiment", "output", "output prefix for <prefix>.csv and <prefix>.json",
      [](ExperimentConfig& c, const std::string& v) { c.output = trimmed(v); },
      [](const ExperimentConfig& c) { return c.output; });

  add("strategy", "strategy", "strategy name",
      [](ExperimentConfig& c, const std::string& v) { c.strategy = trimmed(v); },
      [](const ExperimentConfig& c) { return c.strategy; });
  add("strategy", "members", "ensemble members, e.g. exploit_mean, explore_rand(explore_hi=1)",
      [](ExperimentConfig& c, const std::string& v) { c.members = parse_member_list(v); },
      [](const ExperimentConfig& c) { return format_member_list(c.members); });
  OIM_DOUBLE_KEY("strategy", "gamma", gamma, "exp3 exploration rate in (0,1]");
  add("strategy", "feedback", "ensemble feedback routing: shared or chosen",
      [](ExperimentConfig& c, const std::string& v) {
        const std::string m = trimmed(v);
        if (m == "shared") c.feedback = FeedbackMode::kShared;
        else if (m == "chosen") c.feedback = FeedbackMode::kChosenOnly;
        else bad_value("feedback", v, "shared or chosen");
      },
      [](const ExperimentConfig& c) {
        return std::string(c.feedback == FeedbackMode::kShared ? "shared" : "chosen");
      });
  OIM_DOUBLE_KEY("strategy", "mean_default", params.mean_default,
                 "empirical-mean value for unobserved edges");
  OIM_DOUBLE_KEY("strategy", "explore_lo", params.explore_lo, "random exploration lower bound");
  OIM_DOUBLE_KEY("strategy", "explore_hi", params.explore_hi, "random exploration upper bound");
  OIM_DOUBLE_KEY("strategy", "cucb_coeff", params.cucb_coeff, "cucb exploration coefficient");
  OIM_DOUBLE_KEY("strategy", "epsilon_c", params.epsilon_c, "epsilon-greedy rate c in c/t");
  OIM_DOUBLE_KEY("strategy", "prior_alpha", params.prior.alpha, "beta prior alpha");
  OIM_DOUBLE_KEY("strategy", "prior_beta", params.prior.beta, "beta prior beta");
  OIM_DOUBLE_KEY("strategy", "lambda", params.lambda, "ridge regularization");
  OIM_DOUBLE_KEY("strategy", "delta", params.delta, "confidence level delta");
  OIM_DOUBLE_KEY("strategy", "noise_r", params.noise_r, "sub-gaussian noise scale R");
  add("strategy", "gram_all_edges", "add every edge to the gram matrix each round",
      [](ExperimentConfig& c, const std::string& v) {
        c.params.gram_all_edges = to_bool("gram_all_edges", v);
      },
      [](const ExperimentConfig& c) {
        return std::string(c.params.gram_all_edges ? "true" : "false");
      });
  add("strategy", "linear_target", "linear regression target: sampled or bit (empty = default)",
      [](ExperimentConfig& c, const std::string& v) { c.params.linear_target = trimmed(v); },
      [](const ExperimentConfig& c) { return c.params.linear_target; });

  add("oracle", "method", "auto, greedy_celf or ris",
      [](ExperimentConfig& c, const std::string& v) { c.oracle.method = parse_oracle_method(trimmed(v)); },
      [](const ExperimentConfig& c) { return oracle_method_name(c.oracle.method); });
  OIM_SIZE_KEY("oracle", "mc_samples", oracle.mc_samples, "live-edge worlds per greedy evaluation");
  OIM_DOUBLE_KEY("oracle", "epsilon", oracle.epsilon, "RIS accuracy epsilon");
  OIM_DOUBLE_KEY("oracle", "ell", oracle.ell, "RIS confidence exponent l");
  OIM_SIZE_KEY("oracle", "rr_set_floor", oracle.rr_set_floor, "minimum RR sets per selection");
  OIM_SIZE_KEY("oracle", "rr_set_cap", oracle.rr_set_cap, "maximum RR sets per selection");
  OIM_SIZE_KEY("oracle", "ris_edge_threshold", oracle.ris_edge_threshold,
               "auto method uses RIS above this many edges");
#undef OIM_SIZE_KEY
#undef OIM_DOUBLE_KEY
  return keys;
}

std::vector<std::string> split_top_level(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string current;
  int depth = 0;
  for (char c : text) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == sep && depth == 0) {
      parts.push_back(trimmed(current));
      current.clear();
    } else {
      current += c;
    }
  }
  if (!trimmed(current).empty() || !parts.empty()) parts.push_back(trimmed(current));
  return parts;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (k < 1) throw_error(ErrorCode::kArgument, "k must be >= 1");
  if (rounds < 1) throw_error(ErrorCode::kArgument, "rounds must be >= 1");
  if (repetitions < 1) throw_error(ErrorCode::kArgument, "repetitions must be >= 1");
  if (!(eta > 0.0 && eta <= 1.0)) {
    throw_error(ErrorCode::kArgument, fmt::format("eta {} not in (0,1]", eta));
  }
  if (feature_dim < 1) throw_error(ErrorCode::kArgument, "feature_dim must be >= 1");
  if (optimal_mc_samples < 1) throw_error(ErrorCode::kArgument, "optimal_mc_samples must be >= 1");
  if (!(gamma > 0.0 && gamma <= 1.0)) {
    throw_error(ErrorCode::kArgument, fmt::format("gamma {} not in (0,1]", gamma));
  }
  if (graph.empty()) throw_error(ErrorCode::kArgument, "no graph configured");
  OracleConfig o = oracle;
  o.k = k;
  o.validate();
}

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = build_keys();
  return keys;
}

void set_config_value(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  for (const ConfigKey& k : config_keys()) {
    if (k.name == key) {
      k.set(cfg, value);
      return;
    }
  }
  throw_error(ErrorCode::kArgument, fmt::format("unknown config key \"{}\"", key));
}

ExperimentConfig parse_config(const std::string& text) {
  // boost's INI reader only knows ';' comments.
  std::istringstream raw(text);
  std::ostringstream cleaned;
  std::string line;
  while (std::getline(raw, line)) {
    const std::string t = trimmed(line);
    if (!t.empty() && t.front() == '#') continue;
    cleaned << line << '\n';
  }
  boost::property_tree::ptree tree;
  std::istringstream in(cleaned.str());
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw_error(ErrorCode::kParse, fmt::format("config line {}: {}", e.line(), e.message()));
  }

  ExperimentConfig cfg;
  auto apply = [&](const std::string& section, const std::string& key, const std::string& value) {
    for (const ConfigKey& k : config_keys()) {
      if (k.name != key) continue;
      if (!section.empty() && k.section != section) {
        throw_error(ErrorCode::kParse,
                    fmt::format("key \"{}\" belongs in [{}], found in [{}]", key, k.section, section));
      }
      k.set(cfg, value);
      return;
    }
    throw_error(ErrorCode::kParse, fmt::format("unknown config key \"{}\"", key));
  };
  for (const auto& [name, node] : tree) {
    if (node.empty()) {
      apply("", name, node.data());
    } else {
      for (const auto& [key, leaf] : node) apply(name, key, leaf.data());
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw_error(ErrorCode::kIo, fmt::format("cannot open config {}", path.string()));
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::vector<std::pair<std::string, std::string>> config_entries(const ExperimentConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const ConfigKey& k : config_keys()) out.emplace_back(k.name, k.get(cfg));
  return out;
}

std::vector<MemberSpec> parse_member_list(const std::string& text) {
  std::vector<MemberSpec> members;
  for (const std::string& part : split_top_level(text, ',')) {
    if (part.empty()) throw_error(ErrorCode::kParse, fmt::format("empty member in \"{}\"", text));
    MemberSpec spec;
    const auto open = part.find('(');
    if (open == std::string::npos) {
      spec.name = part;
    } else {
      if (part.back() != ')') {
        throw_error(ErrorCode::kParse, fmt::format("unbalanced parentheses in \"{}\"", part));
      }
      spec.name = trimmed(part.substr(0, open));
      const std::string inner = part.substr(open + 1, part.size() - open - 2);
      for (std::string assignment : split_top_level(inner, ';')) {
        for (const std::string& kv : split_top_level(assignment, ',')) {
          const auto eq = kv.find('=');
          if (eq == std::string::npos) {
            throw_error(ErrorCode::kParse, fmt::format("expected key=value, got \"{}\"", kv));
          }
          spec.overrides.emplace_back(trimmed(kv.substr(0, eq)), trimmed(kv.substr(eq + 1)));
        }
      }
    }
    members.push_back(std::move(spec));
  }
  return members;
}

std::string format_member_list(const std::vector<MemberSpec>& members) {
  std::string out;
  for (std::size_t i = 0; i < members.size(); ++i) {
    if (i > 0) out += ", ";
    out += members[i].name;
    if (!members[i].overrides.empty()) {
      out += '(';
      for (std::size_t j = 0; j < members[i].overrides.size(); ++j) {
        if (j > 0) out += "; ";
        out += members[i].overrides[j].first + "=" + members[i].overrides[j].second;
      }
      out += ')';
    }
  }
  return out;
}

}  // namespace oim
