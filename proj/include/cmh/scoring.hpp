#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <queue>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cmh/error.hpp"
#include "cmh/graph.hpp"
#include "cmh/partition.hpp"

namespace cmh {

/// Rank 1 is the smallest value; equal values rank by ascending node id.
/// Values within a relative 1e-12 of their sorted predecessor count as equal,
/// so floating-point noise in e.g. betweenness does not split true ties.
inline std::vector<std::size_t> rank_scores(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> snapped(values.begin(), values.end());
  for (std::size_t pos = 1; pos < order.size(); ++pos) {
    const double prev = snapped[order[pos - 1]];
    const double cur = values[order[pos]];
    if (cur - prev <= 1e-12 * std::max({1.0, std::abs(prev), std::abs(cur)})) snapped[order[pos]] = prev;
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (snapped[a] != snapped[b]) return snapped[a] < snapped[b];
    return a < b;
  });
  std::vector<std::size_t> rank(values.size());
  for (std::size_t pos = 0; pos < order.size(); ++pos) rank[order[pos]] = pos + 1;
  return rank;
}

/// (r - 1) / (n - 1); a single node maps to 0.
inline std::vector<double> normalise_ranks(std::span<const std::size_t> ranks) {
  std::vector<double> out(ranks.size(), 0.0);
  if (ranks.size() < 2) return out;
  const double denom = static_cast<double>(ranks.size() - 1);
  for (std::size_t v = 0; v < ranks.size(); ++v) out[v] = static_cast<double>(ranks[v] - 1) / denom;
  return out;
}

inline std::vector<double> rank_normalised(std::span<const double> values) {
  return normalise_ranks(rank_scores(values));
}

/// Brandes shortest-path betweenness, undirected, each unordered pair once.
template <GraphLike G>
std::vector<double> betweenness(const G& g) {
  const std::size_t n = g.node_count();
  std::vector<double> bc(n, 0.0);
  std::vector<std::vector<NodeId>> preds(n);
  std::vector<double> sigma(n), delta(n);
  std::vector<long long> dist(n);
  std::vector<NodeId> stack;
  stack.reserve(n);
  std::queue<NodeId> queue;

  for (NodeId s = 0; s < n; ++s) {
    for (std::size_t v = 0; v < n; ++v) {
      preds[v].clear();
      sigma[v] = 0.0;
      delta[v] = 0.0;
      dist[v] = -1;
    }
    stack.clear();
    sigma[s] = 1.0;
    dist[s] = 0;
    queue.push(s);
    while (!queue.empty()) {
      const NodeId v = queue.front();
      queue.pop();
      stack.push_back(v);
      g.for_each_neighbor(v, [&](NodeId w) {
        if (dist[w] < 0) {
          dist[w] = dist[v] + 1;
          queue.push(w);
        }
        if (dist[w] == dist[v] + 1) {
          sigma[w] += sigma[v];
          preds[w].push_back(v);
        }
      });
    }
    while (!stack.empty()) {
      const NodeId w = stack.back();
      stack.pop_back();
      for (NodeId v : preds[w]) delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
      if (w != s) bc[w] += delta[w];
    }
  }
  for (auto& x : bc) x /= 2.0;
  return bc;
}

/// Power iteration until the L1 change drops to `tol`. Isolated nodes spread
/// their mass uniformly.
template <GraphLike G>
std::vector<double> pagerank(const G& g, double damping = 0.85, double tol = 1e-10,
                             std::size_t max_iterations = 100000) {
  if (!(damping > 0.0 && damping < 1.0)) throw ConfigError("pagerank damping must be in (0,1)");
  const std::size_t n = g.node_count();
  if (n == 0) return {};
  std::vector<double> x(n, 1.0 / static_cast<double>(n)), next(n);
  for (std::size_t it = 0; it < max_iterations; ++it) {
    double dangling = 0.0;
    for (NodeId v = 0; v < n; ++v) {
      if (g.degree(v) == 0) dangling += x[v];
    }
    const double base = (1.0 - damping) / static_cast<double>(n) +
                        damping * dangling / static_cast<double>(n);
    std::fill(next.begin(), next.end(), base);
    for (NodeId v = 0; v < n; ++v) {
      const std::size_t d = g.degree(v);
      if (d == 0) continue;
      const double share = damping * x[v] / static_cast<double>(d);
      g.for_each_neighbor(v, [&](NodeId w) { next[w] += share; });
    }
    double change = 0.0;
    for (std::size_t v = 0; v < n; ++v) change += std::abs(next[v] - x[v]);
    x.swap(next);
    if (change <= tol) break;
  }
  return x;
}

struct CommunityDegrees {
  std::vector<double> intra;
  std::vector<double> inter;
};

template <GraphLike G>
CommunityDegrees community_degrees(const G& g, const Partition& part) {
  if (part.node_count() != g.node_count()) throw Error("partition/graph size mismatch");
  CommunityDegrees out{std::vector<double>(g.node_count(), 0.0),
                       std::vector<double>(g.node_count(), 0.0)};
  for (NodeId v = 0; v < g.node_count(); ++v) {
    const auto c = part.community_index(v);
    g.for_each_neighbor(v, [&](NodeId w) {
      if (part.community_index(w) == c) out.intra[v] += 1.0;
    });
    out.inter[v] = static_cast<double>(g.degree(v)) - out.intra[v];
  }
  return out;
}

/// Structural properties in weight order: betweenness, degree, intra-, inter-community degree.
inline constexpr std::size_t kPropertyCount = 4;
using ScoreWeights = std::array<double, kPropertyCount>;

inline void validate_weights(const ScoreWeights& a) {
  double sum = 0.0;
  for (double w : a) {
    if (!(w >= 0.0 && w <= 1.0)) throw ConfigError("score weights must lie in [0,1]");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw ConfigError("score weights must sum to 1 (got " + std::to_string(sum) + ")");
  }
}

/// Rescales non-negative weights to sum to 1.
inline ScoreWeights renormalise(ScoreWeights a) {
  double sum = 0.0;
  for (double w : a) {
    if (w < 0.0) throw ConfigError("score weights must be non-negative");
    sum += w;
  }
  if (sum <= 0.0) throw ConfigError("score weights sum to zero");
  for (double& w : a) w /= sum;
  return a;
}

struct StructuralScores {
  std::array<std::vector<double>, kPropertyCount> raw;
  std::array<std::vector<double>, kPropertyCount> normalised;
};

template <GraphLike G>
StructuralScores structural_scores(const G& g, const Partition& part) {
  StructuralScores s;
  s.raw[0] = betweenness(g);
  s.raw[1].resize(g.node_count());
  for (NodeId v = 0; v < g.node_count(); ++v) s.raw[1][v] = static_cast<double>(g.degree(v));
  auto cd = community_degrees(g, part);
  s.raw[2] = std::move(cd.intra);
  s.raw[3] = std::move(cd.inter);
  for (std::size_t i = 0; i < kPropertyCount; ++i) s.normalised[i] = rank_normalised(s.raw[i]);
  return s;
}

/// S_v = sum_i a_i S_v^i.
inline std::vector<double> aggregate_scores(const StructuralScores& s, const ScoreWeights& a) {
  validate_weights(a);
  const std::size_t n = s.normalised[0].size();
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < kPropertyCount; ++i) {
    for (std::size_t v = 0; v < n; ++v) out[v] += a[i] * s.normalised[i][v];
  }
  for (double& x : out) x = std::clamp(x, 0.0, 1.0);
  return out;
}

/// Per-node target values c~_u in [0,1]: low for influential in-community
/// nodes, high for influential outsiders, 1/2 for the owner's own slot.
struct PromisingActions {
  NodeId owner = 0;
  std::vector<double> values;
};

inline PromisingActions promising_actions(NodeId u, std::span<const NodeId> community,
                                          std::span<const double> scores) {
  if (u >= scores.size()) throw ContractViolation("target out of range");
  if (!std::binary_search(community.begin(), community.end(), u)) {
    throw ContractViolation("target is not a member of the given community");
  }
  PromisingActions out{u, std::vector<double>(scores.size())};
  for (std::size_t v = 0; v < scores.size(); ++v) out.values[v] = (1.0 + scores[v]) / 2.0;
  for (NodeId v : community) out.values[v] = (1.0 - scores[v]) / 2.0;
  out.values[u] = 0.5;
  return out;
}

/// The unweighted alternative: the complement of A_u.
inline PromisingActions complement_actions(const AdjacencyVector& a) {
  PromisingActions out{a.owner, std::vector<double>(a.bits.size())};
  for (std::size_t v = 0; v < a.bits.size(); ++v) out.values[v] = a.bits[v] ? 0.0 : 1.0;
  out.values[a.owner] = 0.5;
  return out;
}

}  // namespace cmh
