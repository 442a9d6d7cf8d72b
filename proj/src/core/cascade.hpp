#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "core/graph.hpp"
#include "core/rng.hpp"

namespace oim {

// One independent-cascade diffusion with edge-level semi-bandit feedback.
struct CascadeOutcome {
  // Activation order; seeds first.
  std::vector<NodeId> activated;
  // Every out-edge of every activated node, with its sampled bit.
  std::vector<EdgeId> observed_edges;
  std::vector<std::uint8_t> activation_bit;

  std::size_t spread() const { return activated.size(); }
};

inline constexpr std::size_t kMaxExactEdges = 20;

// Breadth-first IC diffusion: a node's out-edges are each sampled once when
// the node activates. Edges into already-active nodes are still sampled and
// reported. Duplicate seeds are ignored; an empty seed set throws kArgument.
CascadeOutcome simulate_cascade(const DirectedGraph& graph, std::span<const double> probability,
                                std::span<const NodeId> seeds, Rng& rng);

// Expected spread by enumerating all 2^|E| live-edge patterns. Throws
// kCapacity above kMaxExactEdges.
double exact_spread(const DirectedGraph& graph, std::span<const double> probability,
                    std::span<const NodeId> seeds);

// Mean spread over `samples` cascades. Run i draws from its own stream
// derived from one value of `rng`, so the result is independent of `threads`.
double monte_carlo_spread(const DirectedGraph& graph, std::span<const double> probability,
                          std::span<const NodeId> seeds, std::size_t samples, Rng& rng,
                          std::size_t threads = 1);

// Reachability in a fixed live-edge world: edge e is live iff
// hashed_uniform(world_key, e) < probability[e]. Reusing a key gives the same
// world for any seed set, which makes the spread monotone and submodular
// across calls.
class WorldSampler {
 public:
  explicit WorldSampler(const DirectedGraph& graph);

  std::size_t reach_count(std::span<const double> probability, std::span<const NodeId> seeds,
                          std::uint64_t world_key);
  std::vector<NodeId> reachable(std::span<const double> probability,
                                std::span<const NodeId> seeds, std::uint64_t world_key);

 private:
  const DirectedGraph* graph_;
  std::vector<std::uint32_t> stamp_;
  std::uint32_t epoch_ = 0;
  std::vector<NodeId> queue_;
};

void validate_seeds(const DirectedGraph& graph, std::span<const NodeId> seeds);

}  // namespace oim
