#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace oim {

using NodeId = std::uint32_t;
using EdgeId = std::uint32_t;

struct Edge {
  NodeId source;
  NodeId target;
  friend bool operator==(const Edge&, const Edge&) = default;
};

// Immutable directed topology in CSR form. Edge ids are positions in the
// edge list; out/in adjacency lists hold edge ids.
class DirectedGraph {
 public:
  DirectedGraph() = default;

  // Throws kArgument on self-loops, duplicate pairs or out-of-range ids.
  DirectedGraph(std::size_t node_count, std::vector<Edge> edges);

  std::size_t node_count() const { return node_count_; }
  std::size_t edge_count() const { return edges_.size(); }

  const Edge& edge(EdgeId e) const { return edges_[e]; }
  std::span<const Edge> edges() const { return edges_; }

  std::span<const EdgeId> out_edges(NodeId v) const {
    return {out_ids_.data() + out_offsets_[v], out_ids_.data() + out_offsets_[v + 1]};
  }
  std::span<const EdgeId> in_edges(NodeId v) const {
    return {in_ids_.data() + in_offsets_[v], in_ids_.data() + in_offsets_[v + 1]};
  }
  std::size_t out_degree(NodeId v) const { return out_offsets_[v + 1] - out_offsets_[v]; }
  std::size_t in_degree(NodeId v) const { return in_offsets_[v + 1] - in_offsets_[v]; }

 private:
  std::size_t node_count_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::size_t> out_offsets_{0};
  std::vector<EdgeId> out_ids_;
  std::vector<std::size_t> in_offsets_{0};
  std::vector<EdgeId> in_ids_;
};

struct LoadOptions {
  // Expand every input pair into both directions (undirected datasets).
  bool symmetrize = false;
};

struct RejectedLine {
  std::size_t line;
  std::string reason;
};

struct LoadReport {
  std::size_t lines_read = 0;
  std::size_t duplicate_count = 0;
  std::vector<RejectedLine> rejected;
};

struct LoadResult {
  DirectedGraph graph;
  LoadReport report;
};

// Whitespace-separated "source target" pairs, '#' comment lines. Malformed
// lines throw kParse with the line number; self-loops are skipped and
// recorded in the report.
LoadResult load_edge_list(std::istream& in, const LoadOptions& options = {});
LoadResult load_edge_list_file(const std::filesystem::path& path, const LoadOptions& options = {});

// Ground-truth influence probabilities, validated to lie in [0,1].
class TrueModel {
 public:
  TrueModel() = default;
  explicit TrueModel(std::vector<double> probability);

  std::span<const double> probabilities() const { return probability_; }
  double operator[](EdgeId e) const { return probability_[e]; }
  std::size_t size() const { return probability_.size(); }

 private:
  std::vector<double> probability_;
};

// p(u,v) = 1 / in_degree(v).
TrueModel assign_weighted_cascade(const DirectedGraph& graph);

struct FeatureMap {
  // node_count x d, row u is the embedding of u.
  Eigen::MatrixXd node_embedding;
  // edge_count x d, row e is node_embedding(source) .* node_embedding(target).
  Eigen::MatrixXd edge_feature;
  // Laplacian eigenvalues matching the embedding columns, ascending.
  Eigen::VectorXd eigenvalues;

  std::size_t dimension() const { return static_cast<std::size_t>(node_embedding.cols()); }
};

struct LaplacianOptions {
  std::size_t dense_threshold = 2000;
  double tolerance = 1e-8;
  std::size_t max_iterations = 5000;
  std::uint64_t seed = 0x5eed;
};

// Combinatorial Laplacian D - A of the symmetrized, unweighted adjacency.
Eigen::MatrixXd symmetrized_laplacian(const DirectedGraph& graph);

FeatureMap laplacian_features(const DirectedGraph& graph, std::size_t d,
                              const LaplacianOptions& options = {});

// Edge features from given node embeddings (rows).
Eigen::MatrixXd edge_features_from_embeddings(const DirectedGraph& graph,
                                              const Eigen::MatrixXd& node_embedding);

// Undirected Barabasi-Albert graph with `attach` links per new node, each
// link emitted in both directions.
DirectedGraph generate_preferential_attachment(std::size_t node_count, std::size_t attach,
                                               std::uint64_t seed);

}  // namespace oim
