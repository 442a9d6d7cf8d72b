#pragma once

// Independent reference computations used as test oracles. None of these
// share code with the library paths they check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "core/graph.hpp"

namespace oim::testing {

inline DirectedGraph make_graph(std::size_t n, std::vector<std::pair<NodeId, NodeId>> pairs) {
  std::vector<Edge> edges;
  for (auto [u, v] : pairs) edges.push_back({u, v});
  return DirectedGraph(n, std::move(edges));
}

// a=0, b=1, c=2, d=3: a->b, a->c, b->d, c->d.
inline DirectedGraph diamond() { return make_graph(4, {{0, 1}, {0, 2}, {1, 3}, {2, 3}}); }

// Plain DFS reachability over the edges marked live in `mask`.
inline std::size_t reach_under_mask(std::size_t n, const std::vector<std::pair<NodeId, NodeId>>& edges,
                                    std::uint64_t mask, const std::vector<NodeId>& seeds) {
  std::vector<char> on(n, 0);
  std::vector<NodeId> stack;
  for (NodeId s : seeds)
    if (!on[s]) {
      on[s] = 1;
      stack.push_back(s);
    }
  while (!stack.empty()) {
    NodeId u = stack.back();
    stack.pop_back();
    for (std::size_t i = 0; i < edges.size(); ++i) {
      if (!((mask >> i) & 1u) || edges[i].first != u) continue;
      NodeId v = edges[i].second;
      if (!on[v]) {
        on[v] = 1;
        stack.push_back(v);
      }
    }
  }
  return static_cast<std::size_t>(std::count(on.begin(), on.end(), 1));
}

// Expected spread by brute-force enumeration of live-edge masks.
inline double brute_spread(std::size_t n, const std::vector<std::pair<NodeId, NodeId>>& edges,
                           const std::vector<double>& p, const std::vector<NodeId>& seeds) {
  double total = 0.0;
  const std::uint64_t patterns = std::uint64_t{1} << edges.size();
  for (std::uint64_t mask = 0; mask < patterns; ++mask) {
    double prob = 1.0;
    for (std::size_t i = 0; i < edges.size(); ++i) prob *= ((mask >> i) & 1u) ? p[i] : 1.0 - p[i];
    if (prob == 0.0) continue;
    total += prob * static_cast<double>(reach_under_mask(n, edges, mask, seeds));
  }
  return total;
}

// Best value over all k-subsets of [0, n).
inline double best_subset_value(std::size_t n, std::size_t k,
                                const std::function<double(const std::vector<NodeId>&)>& value) {
  double best = -1.0;
  std::vector<NodeId> pick;
  std::function<void(NodeId)> rec = [&](NodeId start) {
    if (pick.size() == k) {
      best = std::max(best, value(pick));
      return;
    }
    for (NodeId v = start; v < n; ++v) {
      pick.push_back(v);
      rec(v + 1);
      pick.pop_back();
    }
  };
  rec(0);
  return best;
}

using DenseMatrix = std::vector<std::vector<double>>;

// Cyclic Jacobi rotations; returns (eigenvalues ascending, eigenvectors as columns).
inline std::pair<std::vector<double>, DenseMatrix> jacobi_eigen(DenseMatrix a) {
  const std::size_t n = a.size();
  DenseMatrix v(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) v[i][i] = 1.0;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += a[i][j] * a[i][j];
    if (off < 1e-30) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (std::abs(a[p][q]) < 1e-300) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v[k][p], vkq = v[k][q];
          v[k][p] = c * vkp - s * vkq;
          v[k][q] = s * vkp + c * vkq;
        }
      }
    }
  }
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return a[x][x] < a[y][y]; });
  std::vector<double> values;
  DenseMatrix vectors(n, std::vector<double>(n));
  for (std::size_t c = 0; c < n; ++c) {
    values.push_back(a[order[c]][order[c]]);
    for (std::size_t r = 0; r < n; ++r) vectors[r][c] = v[r][order[c]];
  }
  return {values, vectors};
}

// Gaussian elimination with partial pivoting for a x = b.
inline std::vector<double> gauss_solve(DenseMatrix a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    std::swap(a[col], a[piv]);
    std::swap(b[col], b[piv]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r][col] / a[col][col];
      for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t c = i + 1; c < n; ++c) s -= a[i][c] * x[c];
    x[i] = s / a[i][i];
  }
  return x;
}

// Determinant by elimination.
inline double gauss_det(DenseMatrix a) {
  const std::size_t n = a.size();
  double det = 1.0;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    if (piv != col) {
      std::swap(a[col], a[piv]);
      det = -det;
    }
    det *= a[col][col];
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r][col] / a[col][col];
      for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
    }
  }
  return det;
}

// Regularized incomplete beta via continued fraction (Lentz), for posterior
// quantile checks.
inline double incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  auto cf = [](double aa, double bb, double xx) {
    const double tiny = 1e-300;
    double c = 1.0, d = 1.0 - (aa + bb) * xx / (aa + 1.0);
    if (std::abs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m < 10000; ++m) {
      const double m2 = 2.0 * m;
      double num = m * (bb - m) * xx / ((aa + m2 - 1.0) * (aa + m2));
      d = 1.0 + num * d;
      if (std::abs(d) < tiny) d = tiny;
      c = 1.0 + num / c;
      if (std::abs(c) < tiny) c = tiny;
      d = 1.0 / d;
      h *= d * c;
      num = -(aa + m) * (aa + bb + m) * xx / ((aa + m2) * (aa + m2 + 1.0));
      d = 1.0 + num * d;
      if (std::abs(d) < tiny) d = tiny;
      c = 1.0 + num / c;
      if (std::abs(c) < tiny) c = tiny;
      d = 1.0 / d;
      const double delta = d * c;
      h *= delta;
      if (std::abs(delta - 1.0) < 1e-15) break;
    }
    return h;
  };
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
                           b * std::log1p(-x);
  if (x < (a + 1.0) / (a + b + 2.0)) return std::exp(log_front) * cf(a, b, x) / a;
  return 1.0 - std::exp(log_front) * cf(b, a, 1.0 - x) / b;
}

}  // namespace oim::testing
