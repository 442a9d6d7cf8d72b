#include "core/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include <fmt/format.h>

#include "core/cascade.hpp"
#include "core/error.hpp"
#include "core/parallel.hpp"

namespace oim {

namespace {

constexpr std::size_t kRRBlock = 1024;

void check_k(const DirectedGraph& graph, const OracleConfig& cfg) {
  cfg.validate();
  if (cfg.k > graph.node_count()) {
    throw_error(ErrorCode::kArgument,
                fmt::format("seed budget {} exceeds node count {}", cfg.k, graph.node_count()));
  }
}

}  // namespace

OracleMethod parse_oracle_method(const std::string& name) {
  if (name == "auto") return OracleMethod::kAuto;
  if (name == "greedy_celf" || name == "greedy") return OracleMethod::kGreedyCelf;
  if (name == "ris" || name == "tim") return OracleMethod::kRis;
  throw_error(ErrorCode::kArgument, fmt::format("unknown oracle method \"{}\"", name));
}

std::string oracle_method_name(OracleMethod method) {
  switch (method) {
    case OracleMethod::kAuto: return "auto";
    case OracleMethod::kGreedyCelf: return "greedy_celf";
    case OracleMethod::kRis: return "ris";
  }
  return "auto";
}

void OracleConfig::validate() const {
  if (k < 1) throw_error(ErrorCode::kArgument, "seed budget k must be >= 1");
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw_error(ErrorCode::kArgument, fmt::format("oracle epsilon {} not in (0,1)", epsilon));
  }
  if (!(ell > 0.0)) throw_error(ErrorCode::kArgument, "oracle ell must be positive");
  if (mc_samples < 1) throw_error(ErrorCode::kArgument, "oracle mc_samples must be >= 1");
  if (rr_set_cap < 1) throw_error(ErrorCode::kArgument, "rr_set_cap must be >= 1");
}

std::vector<double> clamp_probabilities(std::span<const double> raw) {
  std::vector<double> out(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const double p = raw[i];
    out[i] = std::isnan(p) ? 0.0 : std::clamp(p, 0.0, 1.0);
  }
  return out;
}

SeedSelection lazy_greedy(std::size_t node_count, std::size_t k, const SetEvaluator& value) {
  if (k > node_count) {
    throw_error(ErrorCode::kArgument,
                fmt::format("seed budget {} exceeds node count {}", k, node_count));
  }
  struct Entry {
    double gain;
    NodeId node;
    std::size_t round;
  };
  // Max gain first, then smallest id.
  auto worse = [](const Entry& a, const Entry& b) {
    if (a.gain != b.gain) return a.gain < b.gain;
    return a.node > b.node;
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(worse)> heap(worse);

  SeedSelection out;
  double current = 0.0;
  std::vector<NodeId> trial(1);
  for (NodeId v = 0; v < node_count; ++v) {
    trial[0] = v;
    heap.push({value(trial), v, 0});
  }
  while (out.seeds.size() < k) {
    Entry top = heap.top();
    heap.pop();
    if (top.round == out.seeds.size()) {
      out.seeds.push_back(top.node);
      // Re-evaluated rather than accumulated so gains stay consistent with value().
      current = value(out.seeds);
      continue;
    }
    trial = out.seeds;
    trial.push_back(top.node);
    top.gain = value(trial) - current;
    top.round = out.seeds.size();
    heap.push(top);
  }
  out.estimated_spread = current;
  return out;
}

SeedSelection select_seeds_greedy(const DirectedGraph& graph, std::span<const double> estimate,
                                  const OracleConfig& cfg, Rng& rng) {
  check_k(graph, cfg);
  const std::vector<double> p = clamp_probabilities(estimate);
  const std::uint64_t base = rng.next();
  std::vector<std::uint64_t> worlds(cfg.mc_samples);
  for (std::size_t j = 0; j < worlds.size(); ++j) worlds[j] = derive_seed(base, j);

  WorldSampler sampler(graph);
  auto value = [&](std::span<const NodeId> set) {
    std::uint64_t total = 0;
    for (std::uint64_t w : worlds) total += sampler.reach_count(p, set, w);
    return static_cast<double>(total) / static_cast<double>(worlds.size());
  };
  return lazy_greedy(graph.node_count(), cfg.k, value);
}

std::size_t ris_sample_count(std::size_t node_count, const OracleConfig& cfg) {
  const double n = static_cast<double>(node_count);
  const double raw = n > 1.0 ? std::ceil((static_cast<double>(cfg.k) + cfg.ell) * n *
                                         std::log(n) / (cfg.epsilon * cfg.epsilon))
                             : 0.0;
  const auto wanted = static_cast<std::size_t>(std::min(raw, 1e15));
  return std::min(cfg.rr_set_cap, std::max(cfg.rr_set_floor, wanted));
}

RRSets sample_rr_sets(const DirectedGraph& graph, std::span<const double> probability,
                      std::size_t count, Rng& rng, std::size_t threads) {
  const std::size_t n = graph.node_count();
  const std::uint64_t base = rng.next();
  const std::size_t blocks = (count + kRRBlock - 1) / kRRBlock;
  std::vector<RRSets> parts(blocks);

  // Contiguous in-neighbour lists with their probabilities.
  std::vector<std::size_t> in_offsets(n + 1, 0);
  std::vector<NodeId> in_source;
  std::vector<double> in_prob;
  in_source.reserve(graph.edge_count());
  in_prob.reserve(graph.edge_count());
  for (NodeId v = 0; v < n; ++v) {
    for (EdgeId e : graph.in_edges(v)) {
      in_source.push_back(graph.edge(e).source);
      in_prob.push_back(probability[e]);
    }
    in_offsets[v + 1] = in_source.size();
  }

  parallel_for(blocks, threads, [&](std::size_t b) {
    Rng stream = Rng::stream(base, b);
    RRSets& part = parts[b];
    std::vector<std::uint32_t> stamp(n, 0);
    std::uint32_t epoch = 0;
    const std::size_t begin = b * kRRBlock;
    const std::size_t end = std::min(count, begin + kRRBlock);
    for (std::size_t i = begin; i < end; ++i) {
      ++epoch;
      const std::size_t start = part.nodes.size();
      const auto root = static_cast<NodeId>(stream.below(n));
      stamp[root] = epoch;
      part.nodes.push_back(root);
      for (std::size_t head = start; head < part.nodes.size(); ++head) {
        const NodeId v = part.nodes[head];
        for (std::size_t j = in_offsets[v]; j < in_offsets[v + 1]; ++j) {
          const NodeId u = in_source[j];
          if (stamp[u] == epoch) continue;
          const double pe = in_prob[j];
          if (pe >= 1.0 || (pe > 0.0 && stream.bernoulli(pe))) {
            stamp[u] = epoch;
            part.nodes.push_back(u);
          }
        }
      }
      part.offsets.push_back(part.nodes.size());
    }
  });

  RRSets out;
  out.offsets.reserve(count + 1);
  for (const RRSets& part : parts) {
    const std::size_t shift = out.nodes.size();
    out.nodes.insert(out.nodes.end(), part.nodes.begin(), part.nodes.end());
    for (std::size_t i = 1; i < part.offsets.size(); ++i) out.offsets.push_back(part.offsets[i] + shift);
  }
  return out;
}

SeedSelection select_seeds_ris(const DirectedGraph& graph, std::span<const double> estimate,
                               const OracleConfig& cfg, Rng& rng) {
  check_k(graph, cfg);
  const std::vector<double> p = clamp_probabilities(estimate);
  const std::size_t n = graph.node_count();
  const std::size_t theta = ris_sample_count(n, cfg);
  const RRSets rr = sample_rr_sets(graph, p, theta, rng, cfg.threads);

  // node -> RR sets containing it
  std::vector<std::size_t> member_offsets(n + 1, 0);
  for (NodeId v : rr.nodes) ++member_offsets[v + 1];
  for (std::size_t v = 0; v < n; ++v) member_offsets[v + 1] += member_offsets[v];
  std::vector<std::uint32_t> members(rr.nodes.size());
  {
    std::vector<std::size_t> cursor(member_offsets.begin(), member_offsets.end() - 1);
    for (std::size_t i = 0; i < rr.size(); ++i)
      for (NodeId v : rr.set(i)) members[cursor[v]++] = static_cast<std::uint32_t>(i);
  }

  std::vector<std::size_t> coverage(n);
  for (std::size_t v = 0; v < n; ++v) coverage[v] = member_offsets[v + 1] - member_offsets[v];
  std::vector<std::uint8_t> covered(rr.size(), 0);
  std::vector<std::uint8_t> chosen(n, 0);

  SeedSelection out;
  out.rr_sets = rr.size();
  std::size_t covered_count = 0;
  for (std::size_t round = 0; round < cfg.k; ++round) {
    std::size_t best = n;
    for (std::size_t v = 0; v < n; ++v) {
      if (chosen[v]) continue;
      if (best == n || coverage[v] > coverage[best]) best = v;
    }
    chosen[best] = 1;
    out.seeds.push_back(static_cast<NodeId>(best));
    for (std::size_t j = member_offsets[best]; j < member_offsets[best + 1]; ++j) {
      const std::uint32_t set_id = members[j];
      if (covered[set_id]) continue;
      covered[set_id] = 1;
      ++covered_count;
      for (NodeId u : rr.set(set_id)) --coverage[u];
    }
  }
  out.estimated_spread = rr.size() == 0 ? 0.0
                                        : static_cast<double>(n) * static_cast<double>(covered_count) /
                                              static_cast<double>(rr.size());
  return out;
}

SeedSelection select_seeds(const DirectedGraph& graph, std::span<const double> estimate,
                           const OracleConfig& cfg, Rng& rng) {
  OracleMethod method = cfg.method;
  if (method == OracleMethod::kAuto) {
    method = graph.edge_count() > cfg.ris_edge_threshold ? OracleMethod::kRis
                                                         : OracleMethod::kGreedyCelf;
  }
  if (method == OracleMethod::kRis) return select_seeds_ris(graph, estimate, cfg, rng);
  return select_seeds_greedy(graph, estimate, cfg, rng);
}

}  // namespace oim
