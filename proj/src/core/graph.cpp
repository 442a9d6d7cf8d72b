#include "core/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <unordered_set>

#include <Eigen/Eigenvalues>
#include <Eigen/Sparse>
#include <fmt/format.h>

#include "core/error.hpp"
#include "core/rng.hpp"

namespace oim {

namespace {

std::uint64_t pair_key(NodeId u, NodeId v) {
  return (static_cast<std::uint64_t>(u) << 32) | v;
}

void build_csr(std::size_t n, std::span<const Edge> edges, bool by_source,
               std::vector<std::size_t>& offsets, std::vector<EdgeId>& ids) {
  offsets.assign(n + 1, 0);
  for (const Edge& e : edges) ++offsets[(by_source ? e.source : e.target) + 1];
  std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
  ids.resize(edges.size());
  std::vector<std::size_t> cursor(offsets.begin(), offsets.end() - 1);
  for (EdgeId id = 0; id < edges.size(); ++id) {
    const Edge& e = edges[id];
    ids[cursor[by_source ? e.source : e.target]++] = id;
  }
}

bool parse_node(std::string_view token, NodeId& out) {
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size()) return false;
  if (value >= 0xffffffffULL) return false;
  out = static_cast<NodeId>(value);
  return true;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) tokens.push_back(line.substr(i, j - i));
    i = j;
  }
  return tokens;
}

// Makes the largest-magnitude entry of each column positive.
void fix_signs(Eigen::MatrixXd& vectors) {
  for (Eigen::Index c = 0; c < vectors.cols(); ++c) {
    Eigen::Index best = 0;
    vectors.col(c).cwiseAbs().maxCoeff(&best);
    if (vectors(best, c) < 0.0) vectors.col(c) *= -1.0;
  }
}

Eigen::SparseMatrix<double> sparse_laplacian(const DirectedGraph& graph) {
  const auto n = static_cast<Eigen::Index>(graph.node_count());
  std::unordered_set<std::uint64_t> seen;
  std::vector<Eigen::Triplet<double>> triplets;
  Eigen::VectorXd degree = Eigen::VectorXd::Zero(n);
  for (const Edge& e : graph.edges()) {
    const NodeId a = std::min(e.source, e.target);
    const NodeId b = std::max(e.source, e.target);
    if (!seen.insert(pair_key(a, b)).second) continue;
    triplets.emplace_back(a, b, -1.0);
    triplets.emplace_back(b, a, -1.0);
    degree[a] += 1.0;
    degree[b] += 1.0;
  }
  for (Eigen::Index v = 0; v < n; ++v) triplets.emplace_back(v, v, degree[v]);
  Eigen::SparseMatrix<double> lap(n, n);
  lap.setFromTriplets(triplets.begin(), triplets.end());
  return lap;
}

struct EigenPairs {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};

// Block shift-invert subspace iteration with Rayleigh-Ritz extraction for
// the d smallest eigenpairs of a sparse symmetric positive semidefinite matrix.
EigenPairs smallest_eigenpairs_iterative(const Eigen::SparseMatrix<double>& lap, std::size_t d,
                                         const LaplacianOptions& options) {
  const Eigen::Index n = lap.rows();
  const Eigen::Index block = std::min<Eigen::Index>(n, 2 * static_cast<Eigen::Index>(d) + 8);
  const double shift = 1e-3;

  Eigen::SparseMatrix<double> shifted = lap;
  for (Eigen::Index v = 0; v < n; ++v) shifted.coeffRef(v, v) += shift;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(shifted);
  if (solver.info() != Eigen::Success) {
    throw_error(ErrorCode::kNumeric, "laplacian factorization failed");
  }

  Rng rng(options.seed);
  Eigen::MatrixXd basis(n, block);
  for (Eigen::Index j = 0; j < block; ++j)
    for (Eigen::Index i = 0; i < n; ++i) basis(i, j) = rng.normal();

  const auto dd = static_cast<Eigen::Index>(d);
  for (std::size_t it = 0; it < options.max_iterations; ++it) {
    Eigen::MatrixXd next = solver.solve(basis);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(next);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, block);
    Eigen::MatrixXd lq = lap * q;
    Eigen::MatrixXd projected = q.transpose() * lq;
    projected = 0.5 * (projected + projected.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ritz(projected);
    basis = q * ritz.eigenvectors();
    Eigen::MatrixXd residual =
        lq * ritz.eigenvectors() - basis * ritz.eigenvalues().asDiagonal();
    double worst = 0.0;
    for (Eigen::Index c = 0; c < dd; ++c) worst = std::max(worst, residual.col(c).norm());
    if (worst < options.tolerance) {
      return {ritz.eigenvalues().head(dd), basis.leftCols(dd)};
    }
  }
  throw_error(ErrorCode::kNumeric,
              fmt::format("laplacian eigensolver did not reach residual {} in {} iterations",
                          options.tolerance, options.max_iterations));
}

}  // namespace

DirectedGraph::DirectedGraph(std::size_t node_count, std::vector<Edge> edges)
    : node_count_(node_count), edges_(std::move(edges)) {
  if (edges_.size() >= 0xffffffffULL) {
    throw_error(ErrorCode::kCapacity, "too many edges");
  }
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(edges_.size() * 2);
  for (const Edge& e : edges_) {
    if (e.source >= node_count_ || e.target >= node_count_) {
      throw_error(ErrorCode::kArgument,
                  fmt::format("edge ({}, {}) out of range for {} nodes", e.source, e.target,
                              node_count_));
    }
    if (e.source == e.target) {
      throw_error(ErrorCode::kArgument, fmt::format("self-loop on node {}", e.source));
    }
    if (!seen.insert(pair_key(e.source, e.target)).second) {
      throw_error(ErrorCode::kArgument,
                  fmt::format("duplicate edge ({}, {})", e.source, e.target));
    }
  }
  build_csr(node_count_, edges_, true, out_offsets_, out_ids_);
  build_csr(node_count_, edges_, false, in_offsets_, in_ids_);
}

LoadResult load_edge_list(std::istream& in, const LoadOptions& options) {
  LoadReport report;
  std::vector<Edge> edges;
  std::unordered_set<std::uint64_t> seen;
  std::size_t node_count = 0;
  std::string line;
  std::size_t line_no = 0;

  auto add = [&](NodeId u, NodeId v) {
    if (!seen.insert(pair_key(u, v)).second) {
      ++report.duplicate_count;
      return;
    }
    edges.push_back({u, v});
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto tokens = split_ws(line);
    if (tokens.empty() || tokens.front().front() == '#') continue;
    ++report.lines_read;
    NodeId u = 0;
    NodeId v = 0;
    if (tokens.size() != 2 || !parse_node(tokens[0], u) || !parse_node(tokens[1], v)) {
      throw_error(ErrorCode::kParse,
                  fmt::format("line {}: expected \"source target\", got \"{}\"", line_no, line));
    }
    node_count = std::max<std::size_t>(node_count, std::max(u, v) + std::size_t{1});
    if (u == v) {
      report.rejected.push_back({line_no, fmt::format("self-loop on node {}", u)});
      continue;
    }
    add(u, v);
    if (options.symmetrize) add(v, u);
  }
  return {DirectedGraph(node_count, std::move(edges)), std::move(report)};
}

LoadResult load_edge_list_file(const std::filesystem::path& path, const LoadOptions& options) {
  std::ifstream in(path);
  if (!in) throw_error(ErrorCode::kIo, fmt::format("cannot open graph file {}", path.string()));
  return load_edge_list(in, options);
}

TrueModel::TrueModel(std::vector<double> probability) : probability_(std::move(probability)) {
  for (std::size_t e = 0; e < probability_.size(); ++e) {
    const double p = probability_[e];
    if (!(p >= 0.0 && p <= 1.0)) {
      throw_error(ErrorCode::kArgument, fmt::format("probability {} of edge {} outside [0,1]", p, e));
    }
  }
}

TrueModel assign_weighted_cascade(const DirectedGraph& graph) {
  std::vector<double> p(graph.edge_count());
  for (EdgeId e = 0; e < graph.edge_count(); ++e) {
    p[e] = 1.0 / static_cast<double>(graph.in_degree(graph.edge(e).target));
  }
  return TrueModel(std::move(p));
}

Eigen::MatrixXd symmetrized_laplacian(const DirectedGraph& graph) {
  return Eigen::MatrixXd(sparse_laplacian(graph));
}

Eigen::MatrixXd edge_features_from_embeddings(const DirectedGraph& graph,
                                              const Eigen::MatrixXd& node_embedding) {
  Eigen::MatrixXd features(graph.edge_count(), node_embedding.cols());
  for (EdgeId e = 0; e < graph.edge_count(); ++e) {
    const Edge& edge = graph.edge(e);
    features.row(e) = node_embedding.row(edge.source).cwiseProduct(node_embedding.row(edge.target));
  }
  return features;
}

FeatureMap laplacian_features(const DirectedGraph& graph, std::size_t d,
                              const LaplacianOptions& options) {
  if (d == 0 || d > graph.node_count()) {
    throw_error(ErrorCode::kDimension,
                fmt::format("feature dimension {} must be in [1, {}]", d, graph.node_count()));
  }
  EigenPairs pairs;
  if (graph.node_count() < options.dense_threshold) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(symmetrized_laplacian(graph));
    if (solver.info() != Eigen::Success) {
      throw_error(ErrorCode::kNumeric, "dense laplacian eigensolver failed");
    }
    const auto dd = static_cast<Eigen::Index>(d);
    pairs = {solver.eigenvalues().head(dd), solver.eigenvectors().leftCols(dd)};
  } else {
    pairs = smallest_eigenpairs_iterative(sparse_laplacian(graph), d, options);
  }
  fix_signs(pairs.vectors);

  FeatureMap map;
  map.node_embedding = std::move(pairs.vectors);
  map.eigenvalues = std::move(pairs.values);
  map.edge_feature = edge_features_from_embeddings(graph, map.node_embedding);
  return map;
}

DirectedGraph generate_preferential_attachment(std::size_t node_count, std::size_t attach,
                                               std::uint64_t seed) {
  if (attach == 0 || node_count <= attach) {
    throw_error(ErrorCode::kArgument, "preferential attachment needs node_count > attach >= 1");
  }
  Rng rng(seed);
  std::vector<Edge> edges;
  // Endpoint multiset: sampling from it is degree-proportional.
  std::vector<NodeId> endpoints;
  // Seed clique on the first attach + 1 nodes.
  for (NodeId u = 0; u <= attach; ++u) {
    for (NodeId v = u + 1; v <= attach; ++v) {
      edges.push_back({u, v});
      edges.push_back({v, u});
      endpoints.push_back(u);
      endpoints.push_back(v);
    }
  }
  for (auto u = static_cast<NodeId>(attach + 1); u < node_count; ++u) {
    std::vector<NodeId> targets;
    while (targets.size() < attach) {
      NodeId v = endpoints[rng.below(endpoints.size())];
      if (std::find(targets.begin(), targets.end(), v) == targets.end()) targets.push_back(v);
    }
    for (NodeId v : targets) {
      edges.push_back({u, v});
      edges.push_back({v, u});
      endpoints.push_back(u);
      endpoints.push_back(v);
    }
  }
  return DirectedGraph(node_count, std::move(edges));
}

}  // namespace oim
