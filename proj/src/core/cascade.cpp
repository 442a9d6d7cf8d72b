#include "core/cascade.hpp"

#include <fmt/format.h>

#include "core/error.hpp"
#include "core/parallel.hpp"

namespace oim {

void validate_seeds(const DirectedGraph& graph, std::span<const NodeId> seeds) {
  if (seeds.empty()) throw_error(ErrorCode::kArgument, "seed set is empty");
  for (NodeId s : seeds) {
    if (s >= graph.node_count()) {
      throw_error(ErrorCode::kArgument,
                  fmt::format("seed {} out of range for {} nodes", s, graph.node_count()));
    }
  }
}

namespace {

void check_probabilities(const DirectedGraph& graph, std::span<const double> probability) {
  if (probability.size() != graph.edge_count()) {
    throw_error(ErrorCode::kDimension,
                fmt::format("{} probabilities for {} edges", probability.size(),
                            graph.edge_count()));
  }
}

}  // namespace

CascadeOutcome simulate_cascade(const DirectedGraph& graph, std::span<const double> probability,
                                std::span<const NodeId> seeds, Rng& rng) {
  validate_seeds(graph, seeds);
  check_probabilities(graph, probability);

  CascadeOutcome out;
  std::vector<std::uint8_t> active(graph.node_count(), 0);
  for (NodeId s : seeds) {
    if (!active[s]) {
      active[s] = 1;
      out.activated.push_back(s);
    }
  }
  for (std::size_t head = 0; head < out.activated.size(); ++head) {
    const NodeId u = out.activated[head];
    for (EdgeId e : graph.out_edges(u)) {
      const bool live = rng.bernoulli(probability[e]);
      out.observed_edges.push_back(e);
      out.activation_bit.push_back(live ? 1 : 0);
      const NodeId v = graph.edge(e).target;
      if (live && !active[v]) {
        active[v] = 1;
        out.activated.push_back(v);
      }
    }
  }
  return out;
}

double exact_spread(const DirectedGraph& graph, std::span<const double> probability,
                    std::span<const NodeId> seeds) {
  validate_seeds(graph, seeds);
  check_probabilities(graph, probability);
  const std::size_t m = graph.edge_count();
  if (m > kMaxExactEdges) {
    throw_error(ErrorCode::kCapacity,
                fmt::format("exact spread enumerates at most {} edges, graph has {}",
                            kMaxExactEdges, m));
  }

  std::vector<std::uint8_t> active(graph.node_count());
  std::vector<NodeId> queue;
  double total = 0.0;
  for (std::uint64_t pattern = 0; pattern < (std::uint64_t{1} << m); ++pattern) {
    double weight = 1.0;
    for (std::size_t e = 0; e < m && weight > 0.0; ++e) {
      weight *= ((pattern >> e) & 1U) ? probability[e] : 1.0 - probability[e];
    }
    if (weight == 0.0) continue;

    std::fill(active.begin(), active.end(), 0);
    queue.clear();
    for (NodeId s : seeds) {
      if (!active[s]) {
        active[s] = 1;
        queue.push_back(s);
      }
    }
    for (std::size_t head = 0; head < queue.size(); ++head) {
      for (EdgeId e : graph.out_edges(queue[head])) {
        const NodeId v = graph.edge(e).target;
        if (((pattern >> e) & 1U) && !active[v]) {
          active[v] = 1;
          queue.push_back(v);
        }
      }
    }
    total += weight * static_cast<double>(queue.size());
  }
  return total;
}

double monte_carlo_spread(const DirectedGraph& graph, std::span<const double> probability,
                          std::span<const NodeId> seeds, std::size_t samples, Rng& rng,
                          std::size_t threads) {
  if (samples == 0) throw_error(ErrorCode::kArgument, "monte carlo needs at least one sample");
  validate_seeds(graph, seeds);
  check_probabilities(graph, probability);

  const std::uint64_t base = rng.next();
  std::vector<std::size_t> spreads(samples);
  parallel_for(samples, threads, [&](std::size_t i) {
    Rng run = Rng::stream(base, i);
    spreads[i] = simulate_cascade(graph, probability, seeds, run).spread();
  });
  std::uint64_t sum = 0;
  for (std::size_t s : spreads) sum += s;
  return static_cast<double>(sum) / static_cast<double>(samples);
}

WorldSampler::WorldSampler(const DirectedGraph& graph)
    : graph_(&graph), stamp_(graph.node_count(), 0) {}

std::size_t WorldSampler::reach_count(std::span<const double> probability,
                                      std::span<const NodeId> seeds, std::uint64_t world_key) {
  if (++epoch_ == 0) {
    std::fill(stamp_.begin(), stamp_.end(), 0);
    epoch_ = 1;
  }
  queue_.clear();
  for (NodeId s : seeds) {
    if (stamp_[s] != epoch_) {
      stamp_[s] = epoch_;
      queue_.push_back(s);
    }
  }
  for (std::size_t head = 0; head < queue_.size(); ++head) {
    for (EdgeId e : graph_->out_edges(queue_[head])) {
      const NodeId v = graph_->edge(e).target;
      if (stamp_[v] != epoch_ && hashed_uniform(world_key, e) < probability[e]) {
        stamp_[v] = epoch_;
        queue_.push_back(v);
      }
    }
  }
  return queue_.size();
}

std::vector<NodeId> WorldSampler::reachable(std::span<const double> probability,
                                            std::span<const NodeId> seeds,
                                            std::uint64_t world_key) {
  reach_count(probability, seeds, world_key);
  return queue_;
}

}  // namespace oim
