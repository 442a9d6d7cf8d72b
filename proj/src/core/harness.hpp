#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "core/config.hpp"
#include "core/graph.hpp"
#include "core/oracle.hpp"

namespace oim {

struct OptimalBaseline {
  std::vector<NodeId> seeds;
  double f_opt = 0.0;
  // f_opt came from enumeration rather than simulation.
  bool exact = false;
};

// Oracle on the true probabilities once; f_opt is exact on enumeration-sized
// graphs and a Monte-Carlo mean over `mc_samples` cascades otherwise.
OptimalBaseline compute_optimal_baseline(const DirectedGraph& graph, const TrueModel& truth,
                                         const OracleConfig& oracle, std::size_t mc_samples,
                                         Rng& rng);

// Everything a run needs that does not depend on the strategy.
struct Environment {
  DirectedGraph graph;
  TrueModel truth;
  std::optional<FeatureMap> features;
  OptimalBaseline baseline;
  // SHA-1 (git blob style) of the graph source.
  std::string graph_hash;
};

// Loads or generates the configured graph, assigns weighted-cascade
// probabilities, builds features when `with_features`, and computes the
// optimal baseline.
Environment prepare_environment(const ExperimentConfig& cfg, bool with_features);

struct RoundRecord {
  std::size_t round = 0;
  std::vector<NodeId> seeds;
  std::size_t spread = 0;
  double regret = 0.0;
  std::optional<std::size_t> chosen_member;
  // Ensemble probabilities used to draw this round's member.
  std::vector<double> member_probs;
  // Edges whose statistics the round's feedback touched.
  std::size_t observed_edges = 0;
  double wall_ms = 0.0;
};

struct RunSummary {
  std::string strategy;
  std::vector<std::string> member_names;
  double f_opt = 0.0;
  std::vector<NodeId> optimal_seeds;
  double eta = 1.0;
  std::vector<double> mean_spread;
  std::vector<double> mean_regret;
  std::vector<double> cum_regret;
  // [round][member] mean over repetitions.
  std::vector<std::vector<double>> member_probs;
  std::vector<std::vector<RoundRecord>> repetitions;
  double runtime_seconds = 0.0;
  std::string graph_hash;
};

// Names accepted for `strategy`: every base strategy, "random",
// "oracle_true", "ensemble" (uses `members`), "ensemble_rand_mean" and
// "ensemble_rand_linthompson".
std::vector<std::string> harness_strategy_names();
bool strategy_needs_features(const ExperimentConfig& cfg);

RunSummary run_experiment(const ExperimentConfig& cfg);
RunSummary run_experiment(const ExperimentConfig& cfg, const Environment& env);

// CSV: round, mean_spread, mean_regret, cum_regret, prob_<member>...
std::string format_summary_csv(const RunSummary& summary);
// JSON sidecar: config echo, input hashes, runtime, baseline.
std::string format_summary_json(const RunSummary& summary, const ExperimentConfig& cfg);

struct EmittedFiles {
  std::filesystem::path csv;
  std::filesystem::path json;
};
EmittedFiles emit_results(const RunSummary& summary, const ExperimentConfig& cfg,
                          const std::filesystem::path& prefix);

// Aligns several result CSVs by row index. Each input is "path" or
// "label=path"; output columns are round then <label>_<column>.
std::string merge_plot_data(const std::vector<std::string>& inputs);

// git-style blob hash: sha1("blob <size>\0" + content), lowercase hex.
std::string git_blob_hash(std::string_view content);

void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace oim
