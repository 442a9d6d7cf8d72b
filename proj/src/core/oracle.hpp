#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "core/graph.hpp"
#include "core/rng.hpp"

namespace oim {

enum class OracleMethod { kAuto, kGreedyCelf, kRis };

OracleMethod parse_oracle_method(const std::string& name);
std::string oracle_method_name(OracleMethod method);

struct OracleConfig {
  std::size_t k = 10;
  OracleMethod method = OracleMethod::kAuto;
  // Live-edge worlds per greedy marginal evaluation.
  std::size_t mc_samples = 200;
  double epsilon = 0.5;
  double ell = 1.0;
  std::size_t rr_set_floor = 1000;
  std::size_t rr_set_cap = 100000;
  // kAuto picks RIS above this many edges.
  std::size_t ris_edge_threshold = 1000;
  std::size_t threads = 1;

  void validate() const;
};

struct SeedSelection {
  std::vector<NodeId> seeds;
  double estimated_spread = 0.0;
  std::size_t rr_sets = 0;
};

using SetEvaluator = std::function<double(std::span<const NodeId>)>;

// CELF lazy-forward greedy over nodes [0, node_count). Ties go to the
// smallest node id. Exact for any evaluator; the (1 - 1/e) bound needs a
// monotone submodular one.
SeedSelection lazy_greedy(std::size_t node_count, std::size_t k, const SetEvaluator& value);

// Greedy on the mean spread over cfg.mc_samples fixed live-edge worlds.
SeedSelection select_seeds_greedy(const DirectedGraph& graph, std::span<const double> estimate,
                                  const OracleConfig& cfg, Rng& rng);

// Reverse-reachable-set sampling with max-coverage selection.
SeedSelection select_seeds_ris(const DirectedGraph& graph, std::span<const double> estimate,
                               const OracleConfig& cfg, Rng& rng);

// Dispatch on cfg.method; estimates are clamped to [0,1] first.
SeedSelection select_seeds(const DirectedGraph& graph, std::span<const double> estimate,
                           const OracleConfig& cfg, Rng& rng);

// min(cap, max(floor, ceil((k + ell) * n * ln(n) / epsilon^2))).
std::size_t ris_sample_count(std::size_t node_count, const OracleConfig& cfg);

// A flat collection of RR sets.
struct RRSets {
  std::vector<std::size_t> offsets{0};
  std::vector<NodeId> nodes;

  std::size_t size() const { return offsets.size() - 1; }
  std::span<const NodeId> set(std::size_t i) const {
    return {nodes.data() + offsets[i], nodes.data() + offsets[i + 1]};
  }
};

// Generated in blocks with pre-assigned streams, so the output does not
// depend on `threads`.
RRSets sample_rr_sets(const DirectedGraph& graph, std::span<const double> probability,
                      std::size_t count, Rng& rng, std::size_t threads = 1);

std::vector<double> clamp_probabilities(std::span<const double> raw);

}  // namespace oim
