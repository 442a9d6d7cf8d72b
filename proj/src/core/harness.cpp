#include "core/harness.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "core/cascade.hpp"
#include "core/ensemble.hpp"
#include "core/error.hpp"
#include "core/parallel.hpp"
#include "core/strategies.hpp"

namespace oim {

namespace {

using Clock = std::chrono::steady_clock;

constexpr std::string_view kSyntheticPrefix = "synthetic:ba:";

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw_error(ErrorCode::kIo, fmt::format("cannot open {}", path.string()));
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

DirectedGraph make_graph(const ExperimentConfig& cfg, std::string& hash) {
  if (cfg.graph.rfind(kSyntheticPrefix, 0) == 0) {
    std::vector<std::size_t> parts;
    std::stringstream ss(cfg.graph.substr(kSyntheticPrefix.size()));
    std::string item;
    while (std::getline(ss, item, ':')) {
      try {
        parts.push_back(std::stoull(item));
      } catch (const std::exception&) {
        throw_error(ErrorCode::kParse, fmt::format("bad synthetic graph spec \"{}\"", cfg.graph));
      }
    }
    if (parts.size() < 2 || parts.size() > 3) {
      throw_error(ErrorCode::kParse, fmt::format("bad synthetic graph spec \"{}\"", cfg.graph));
    }
    const std::uint64_t seed = parts.size() == 3 ? parts[2] : cfg.master_seed;
    hash = git_blob_hash(cfg.graph);
    return generate_preferential_attachment(parts[0], parts[1], seed);
  }
  const std::string text = read_file(cfg.graph);
  hash = git_blob_hash(text);
  std::istringstream in(text);
  return load_edge_list(in, LoadOptions{cfg.undirected}).graph;
}

std::vector<NodeId> random_seeds(std::size_t node_count, std::size_t k, Rng& rng) {
  std::vector<NodeId> nodes(node_count);
  std::iota(nodes.begin(), nodes.end(), NodeId{0});
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(node_count - i));
    std::swap(nodes[i], nodes[j]);
  }
  nodes.resize(k);
  return nodes;
}

StrategyParams member_params(const ExperimentConfig& cfg, const MemberSpec& member) {
  ExperimentConfig scratch = cfg;
  for (const auto& [key, value] : member.overrides) {
    const auto& keys = config_keys();
    auto it = std::find_if(keys.begin(), keys.end(), [&](const ConfigKey& k) { return k.name == key; });
    if (it == keys.end() || it->section != "strategy") {
      throw_error(ErrorCode::kArgument,
                  fmt::format("member {}: \"{}\" is not a strategy parameter", member.name, key));
    }
    it->set(scratch, value);
  }
  return scratch.params;
}

std::vector<MemberSpec> resolve_members(const ExperimentConfig& cfg) {
  if (cfg.strategy == "ensemble_rand_mean") {
    return {{"exploit_mean", {}}, {"explore_rand", {}}};
  }
  if (cfg.strategy == "ensemble_rand_linthompson") {
    return {{"linthompson_ucb", {}}, {"explore_rand", {}}};
  }
  if (cfg.members.empty()) throw_error(ErrorCode::kArgument, "ensemble needs a members list");
  return cfg.members;
}

bool is_ensemble(const std::string& name) {
  return name == "ensemble" || name == "ensemble_rand_mean" || name == "ensemble_rand_linthompson";
}

std::unique_ptr<Strategy> build_learner(const ExperimentConfig& cfg, const Environment& env) {
  const std::size_t m = env.graph.edge_count();
  if (is_ensemble(cfg.strategy)) {
    std::vector<std::unique_ptr<Strategy>> members;
    for (const MemberSpec& spec : resolve_members(cfg)) {
      members.push_back(make_strategy(spec.name, m, cfg.feature_dim, member_params(cfg, spec)));
    }
    return std::make_unique<Ensemble>(cfg.strategy, std::move(members), cfg.gamma, cfg.feedback);
  }
  return make_strategy(cfg.strategy, m, cfg.feature_dim, cfg.params);
}

std::vector<RoundRecord> run_repetition(const ExperimentConfig& cfg, const Environment& env,
                                        std::size_t rep, std::size_t oracle_threads) {
  const std::uint64_t root = derive_seed(cfg.master_seed, rep + 1);
  Rng strategy_rng = Rng::stream(root, tag_of("strategy"));
  Rng oracle_rng = Rng::stream(root, tag_of("oracle"));
  Rng cascade_rng = Rng::stream(root, tag_of("cascade"));

  OracleConfig oracle = cfg.oracle;
  oracle.k = cfg.k;
  oracle.threads = oracle_threads;

  const bool random_policy = cfg.strategy == "random";
  const bool oracle_true = cfg.strategy == "oracle_true";
  std::unique_ptr<Strategy> learner;
  if (!random_policy && !oracle_true) learner = build_learner(cfg, env);
  auto* ensemble = dynamic_cast<Ensemble*>(learner.get());

  RoundContext ctx;
  ctx.graph = &env.graph;
  ctx.features = env.features ? &*env.features : nullptr;

  const double target = cfg.eta * env.baseline.f_opt;
  std::vector<RoundRecord> records;
  records.reserve(cfg.rounds);
  for (std::size_t t = 1; t <= cfg.rounds; ++t) {
    const auto start = Clock::now();
    ctx.round = t;
    RoundRecord rec;
    rec.round = t;
    if (random_policy) {
      rec.seeds = random_seeds(env.graph.node_count(), cfg.k, strategy_rng);
    } else if (oracle_true) {
      rec.seeds = select_seeds(env.graph, env.truth.probabilities(), oracle, oracle_rng).seeds;
    } else {
      if (ensemble) rec.member_probs = ensemble->state().probs;
      const Estimate estimate = learner->estimate(ctx, strategy_rng);
      if (ensemble) rec.chosen_member = ensemble->last_chosen();
      rec.seeds = select_seeds(env.graph, estimate, oracle, oracle_rng).seeds;
    }
    const CascadeOutcome outcome =
        simulate_cascade(env.graph, env.truth.probabilities(), rec.seeds, cascade_rng);
    if (learner) learner->observe(ctx, outcome, strategy_rng);
    rec.spread = outcome.spread();
    rec.observed_edges = outcome.observed_edges.size();
    rec.regret = target - static_cast<double>(rec.spread);
    rec.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
    records.push_back(std::move(rec));
  }
  return records;
}

std::string csv_number(double v) { return fmt::format("{}", v); }

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

OptimalBaseline compute_optimal_baseline(const DirectedGraph& graph, const TrueModel& truth,
                                         const OracleConfig& oracle, std::size_t mc_samples,
                                         Rng& rng) {
  OptimalBaseline out;
  out.seeds = select_seeds(graph, truth.probabilities(), oracle, rng).seeds;
  if (graph.edge_count() <= kMaxExactEdges) {
    out.f_opt = exact_spread(graph, truth.probabilities(), out.seeds);
    out.exact = true;
  } else {
    out.f_opt = monte_carlo_spread(graph, truth.probabilities(), out.seeds, mc_samples, rng,
                                   oracle.threads);
  }
  return out;
}

Environment prepare_environment(const ExperimentConfig& cfg, bool with_features) {
  cfg.validate();
  Environment env;
  env.graph = make_graph(cfg, env.graph_hash);
  if (cfg.k > env.graph.node_count()) {
    throw_error(ErrorCode::kArgument,
                fmt::format("k = {} exceeds node count {}", cfg.k, env.graph.node_count()));
  }
  env.truth = assign_weighted_cascade(env.graph);
  if (with_features) env.features = laplacian_features(env.graph, cfg.feature_dim);

  OracleConfig oracle = cfg.oracle;
  oracle.k = cfg.k;
  oracle.threads = resolve_threads(cfg.threads);
  Rng rng = Rng::stream(cfg.master_seed, tag_of("baseline"));
  env.baseline = compute_optimal_baseline(env.graph, env.truth, oracle, cfg.optimal_mc_samples, rng);
  return env;
}

std::vector<std::string> harness_strategy_names() {
  std::vector<std::string> names = base_strategy_names();
  for (const char* extra :
       {"random", "oracle_true", "ensemble", "ensemble_rand_mean", "ensemble_rand_linthompson"}) {
    names.emplace_back(extra);
  }
  return names;
}

bool strategy_needs_features(const ExperimentConfig& cfg) {
  auto linear = [](const std::string& n) {
    return n == "imlinucb" || n == "linthompson" || n == "linthompson_ucb";
  };
  if (is_ensemble(cfg.strategy)) {
    const auto members = resolve_members(cfg);
    return std::any_of(members.begin(), members.end(),
                       [&](const MemberSpec& m) { return linear(m.name); });
  }
  return linear(cfg.strategy);
}

RunSummary run_experiment(const ExperimentConfig& cfg) {
  const auto start = Clock::now();
  const Environment env = prepare_environment(cfg, strategy_needs_features(cfg));
  RunSummary summary = run_experiment(cfg, env);
  summary.runtime_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return summary;
}

RunSummary run_experiment(const ExperimentConfig& cfg, const Environment& env) {
  cfg.validate();
  const auto names = harness_strategy_names();
  if (std::find(names.begin(), names.end(), cfg.strategy) == names.end()) {
    throw_error(ErrorCode::kArgument, fmt::format("unknown strategy \"{}\"", cfg.strategy));
  }
  if (strategy_needs_features(cfg) && !env.features) {
    throw_error(ErrorCode::kArgument, fmt::format("{} needs edge features", cfg.strategy));
  }
  const auto start = Clock::now();

  RunSummary summary;
  summary.strategy = cfg.strategy;
  summary.f_opt = env.baseline.f_opt;
  summary.optimal_seeds = env.baseline.seeds;
  summary.eta = cfg.eta;
  summary.graph_hash = env.graph_hash;
  if (is_ensemble(cfg.strategy)) {
    for (const MemberSpec& m : resolve_members(cfg)) summary.member_names.push_back(m.name);
  }

  const std::size_t threads = resolve_threads(cfg.threads);
  const std::size_t rep_workers = std::min(threads, cfg.repetitions);
  const std::size_t oracle_threads = std::max<std::size_t>(1, threads / rep_workers);
  summary.repetitions.resize(cfg.repetitions);
  parallel_for(cfg.repetitions, rep_workers, [&](std::size_t rep) {
    summary.repetitions[rep] = run_repetition(cfg, env, rep, oracle_threads);
  });

  const double reps = static_cast<double>(cfg.repetitions);
  const std::size_t members = summary.member_names.size();
  summary.mean_spread.assign(cfg.rounds, 0.0);
  summary.mean_regret.assign(cfg.rounds, 0.0);
  summary.cum_regret.assign(cfg.rounds, 0.0);
  summary.member_probs.assign(cfg.rounds, std::vector<double>(members, 0.0));
  for (std::size_t t = 0; t < cfg.rounds; ++t) {
    for (const auto& trace : summary.repetitions) {
      summary.mean_spread[t] += static_cast<double>(trace[t].spread);
      summary.mean_regret[t] += trace[t].regret;
      for (std::size_t i = 0; i < members && i < trace[t].member_probs.size(); ++i) {
        summary.member_probs[t][i] += trace[t].member_probs[i];
      }
    }
    summary.mean_spread[t] /= reps;
    summary.mean_regret[t] /= reps;
    for (double& p : summary.member_probs[t]) p /= reps;
    summary.cum_regret[t] = summary.mean_regret[t] + (t > 0 ? summary.cum_regret[t - 1] : 0.0);
  }
  summary.runtime_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return summary;
}

std::string format_summary_csv(const RunSummary& summary) {
  std::string out = "round,mean_spread,mean_regret,cum_regret";
  for (const auto& name : summary.member_names) out += ",prob_" + name;
  out += '\n';
  for (std::size_t t = 0; t < summary.mean_spread.size(); ++t) {
    out += fmt::format("{},{},{},{}", t + 1, csv_number(summary.mean_spread[t]),
                       csv_number(summary.mean_regret[t]), csv_number(summary.cum_regret[t]));
    for (double p : summary.member_probs[t]) out += "," + csv_number(p);
    out += '\n';
  }
  return out;
}

std::string format_summary_json(const RunSummary& summary, const ExperimentConfig& cfg) {
  nlohmann::ordered_json doc;
  nlohmann::ordered_json config;
  for (const auto& [key, value] : config_entries(cfg)) config[key] = value;
  doc["config"] = config;
  doc["strategy"] = summary.strategy;
  doc["members"] = summary.member_names;
  doc["inputs"] = {{"graph_sha1", summary.graph_hash},
                   {"config_sha1", git_blob_hash(config.dump())}};
  doc["baseline"] = {{"f_opt", summary.f_opt}, {"seeds", summary.optimal_seeds}};
  doc["rounds"] = summary.mean_spread.size();
  doc["repetitions"] = summary.repetitions.size();
  doc["final_cum_regret"] = summary.cum_regret.empty() ? 0.0 : summary.cum_regret.back();
  doc["runtime_seconds"] = summary.runtime_seconds;
  return doc.dump(2) + "\n";
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw_error(ErrorCode::kIo, fmt::format("cannot write {}", path.string()));
  out << text;
  out.flush();
  if (!out) throw_error(ErrorCode::kIo, fmt::format("write to {} failed", path.string()));
}

EmittedFiles emit_results(const RunSummary& summary, const ExperimentConfig& cfg,
                          const std::filesystem::path& prefix) {
  EmittedFiles files{prefix, prefix};
  files.csv += ".csv";
  files.json += ".json";
  write_text_file(files.csv, format_summary_csv(summary));
  write_text_file(files.json, format_summary_json(summary, cfg));
  return files;
}

std::string merge_plot_data(const std::vector<std::string>& inputs) {
  if (inputs.empty()) throw_error(ErrorCode::kArgument, "plot-data needs at least one CSV");
  struct Table {
    std::string label;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
  };
  std::vector<Table> tables;
  std::size_t max_rows = 0;
  for (const std::string& input : inputs) {
    Table table;
    std::string path = input;
    const auto eq = input.find('=');
    if (eq != std::string::npos) {
      table.label = input.substr(0, eq);
      path = input.substr(eq + 1);
    } else {
      table.label = std::filesystem::path(path).stem().string();
    }
    std::istringstream in(read_file(path));
    std::string line;
    if (!std::getline(in, line)) throw_error(ErrorCode::kParse, fmt::format("{} is empty", path));
    table.columns = split_csv_line(line);
    if (table.columns.empty() || table.columns.front() != "round") {
      throw_error(ErrorCode::kParse, fmt::format("{}: first column must be \"round\"", path));
    }
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      auto cells = split_csv_line(line);
      cells.resize(table.columns.size());
      table.rows.push_back(std::move(cells));
    }
    max_rows = std::max(max_rows, table.rows.size());
    tables.push_back(std::move(table));
  }

  std::string out = "round";
  for (const Table& table : tables)
    for (std::size_t c = 1; c < table.columns.size(); ++c) out += "," + table.label + "_" + table.columns[c];
  out += '\n';
  for (std::size_t r = 0; r < max_rows; ++r) {
    out += std::to_string(r + 1);
    for (const Table& table : tables) {
      for (std::size_t c = 1; c < table.columns.size(); ++c) {
        out += ',';
        if (r < table.rows.size()) out += table.rows[r][c];
      }
    }
    out += '\n';
  }
  return out;
}

std::string git_blob_hash(std::string_view content) {
  const std::string header = fmt::format("blob {}", content.size());
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (ctx == nullptr) throw_error(ErrorCode::kInternal, "cannot allocate digest context");
  const bool ok = EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr) == 1 &&
                  EVP_DigestUpdate(ctx, header.data(), header.size() + 1) == 1 &&
                  EVP_DigestUpdate(ctx, content.data(), content.size()) == 1 &&
                  EVP_DigestFinal_ex(ctx, digest, &length) == 1;
  EVP_MD_CTX_free(ctx);
  if (!ok) throw_error(ErrorCode::kInternal, "sha1 digest failed");
  std::string hex;
  for (unsigned int i = 0; i < length; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

}  // namespace oim
