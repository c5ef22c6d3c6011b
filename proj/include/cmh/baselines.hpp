#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "cmh/detectors.hpp"
#include "cmh/error.hpp"
#include "cmh/graph.hpp"
#include "cmh/outcome.hpp"
#include "cmh/rng.hpp"
#include "cmh/scoring.hpp"
#include "cmh/similarity.hpp"

namespace cmh {

enum class BaselineKind { dice, roam, random, degree, centrality };

struct BaselineSpec {
  BaselineKind kind = BaselineKind::dice;
  std::uint64_t seed = 0;
  bool distinct_random_draws = false;  // Random: redraw instead of re-toggling
};

inline std::string to_string(BaselineKind kind) {
  switch (kind) {
    case BaselineKind::dice: return "dice";
    case BaselineKind::roam: return "roam";
    case BaselineKind::random: return "random";
    case BaselineKind::degree: return "degree";
    case BaselineKind::centrality: return "centrality";
  }
  return "unknown";
}

inline BaselineKind parse_baseline_kind(const std::string& name) {
  if (name == "dice") return BaselineKind::dice;
  if (name == "roam") return BaselineKind::roam;
  if (name == "random") return BaselineKind::random;
  if (name == "degree") return BaselineKind::degree;
  if (name == "centrality") return BaselineKind::centrality;
  throw ConfigError("unknown baseline '" + name +
                    "'; available: dice, roam, random, degree, centrality");
}

namespace detail {

/// Ids sorted by descending key, ascending id on ties.
inline std::vector<NodeId> by_descending(std::vector<NodeId> ids, const std::vector<double>& key) {
  std::stable_sort(ids.begin(), ids.end(), [&](NodeId a, NodeId b) {
    if (key[a] != key[b]) return key[a] > key[b];
    return a < b;
  });
  return ids;
}

inline std::vector<double> degrees_of(const Graph& g) {
  std::vector<double> d(g.node_count());
  for (NodeId v = 0; v < g.node_count(); ++v) d[v] = static_cast<double>(g.degree(v));
  return d;
}

struct BaselineContext {
  const Graph& g;
  NodeId u;
  const DetectorSpec& f;
  const Partition& original;
  double tau;
  std::size_t beta;
};

inline HidingOutcome finish(const BaselineContext& ctx, EdgeDelta delta,
                            std::chrono::steady_clock::time_point start) {
  const auto peers = without(community_of(ctx.original, ctx.u), ctx.u);
  auto verdict = assess(ctx.g, ctx.u, ctx.f, peers, delta, ctx.tau, ctx.beta);
  HidingOutcome out;
  out.success = verdict.success;
  out.target = ctx.u;
  out.used_budget = delta.size();
  out.delta = std::move(delta);
  out.iterations = 1;
  out.final_partition = std::move(verdict.partition);
  out.similarity = verdict.similarity;
  out.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace detail

/// Disconnect internally, connect externally: drop the edge to the
/// highest-degree in-community neighbour, then link to the beta-1
/// highest-degree outsiders.
inline EdgeDelta dice_delta(const Graph& g, NodeId u, std::span<const NodeId> community,
                            std::size_t beta) {
  if (beta < 1) throw ConfigError("beta must be at least 1");
  const auto degree = detail::degrees_of(g);
  EdgeDelta d(u);
  std::vector<NodeId> inside, outside;
  for (NodeId v = 0; v < g.node_count(); ++v) {
    if (v == u) continue;
    const bool member = std::binary_search(community.begin(), community.end(), v);
    if (member && g.has_edge(u, v)) inside.push_back(v);
    if (!member && !g.has_edge(u, v)) outside.push_back(v);
  }
  std::size_t additions = beta;
  if (!inside.empty()) {
    d.toggle(detail::by_descending(inside, degree).front());
    --additions;
  }
  const auto ranked = detail::by_descending(outside, degree);
  for (std::size_t k = 0; k < std::min(additions, ranked.size()); ++k) d.toggle(ranked[k]);
  return d;
}

/// Remove (u, v0) for the highest-degree neighbour v0, then connect v0 to up
/// to beta-1 of u's other neighbours by descending degree. Owner is v0.
inline EdgeDelta roam_delta(const Graph& g, NodeId u, std::size_t beta) {
  if (beta < 1) throw ConfigError("beta must be at least 1");
  const auto degree = detail::degrees_of(g);
  auto nbrs = std::vector<NodeId>(g.neighbors(u).begin(), g.neighbors(u).end());
  if (nbrs.empty()) return EdgeDelta(u);
  const NodeId v0 = detail::by_descending(nbrs, degree).front();
  EdgeDelta d(v0);
  d.toggle(u);
  std::vector<NodeId> candidates;
  for (NodeId w : nbrs) {
    if (w != v0 && !g.has_edge(v0, w)) candidates.push_back(w);
  }
  const auto ranked = detail::by_descending(candidates, degree);
  for (std::size_t k = 0; k < std::min(beta - 1, ranked.size()); ++k) d.toggle(ranked[k]);
  return d;
}

/// beta uniform draws from V \ {u}; a repeated draw toggles the edge back
/// unless `distinct` is set.
inline EdgeDelta random_delta(const Graph& g, NodeId u, std::size_t beta, std::uint64_t seed,
                              bool distinct = false) {
  if (beta < 1) throw ConfigError("beta must be at least 1");
  const std::size_t n = g.node_count();
  EdgeDelta d(u);
  if (n < 2) return d;
  std::mt19937_64 rng(seed_sequence(seed, {0x524e44ULL, u}));
  std::uniform_int_distribution<std::size_t> pick(0, n - 2);
  std::vector<bool> used(n, false);
  for (std::size_t k = 0; k < beta; ++k) {
    if (distinct && d.size() >= n - 1) break;
    NodeId v;
    do {
      const auto r = static_cast<NodeId>(pick(rng));
      v = r >= u ? r + 1 : r;
    } while (distinct && used[v]);
    used[v] = true;
    d.toggle(v);
  }
  return d;
}

/// beta toggles between u and the currently highest-ranked untouched node.
/// Degree ranks are refreshed on the overlay after each toggle; a fixed key
/// (betweenness) is used as-is.
inline EdgeDelta ranked_toggle_delta(const Graph& g, NodeId u, std::size_t beta,
                                     const std::vector<double>* fixed_key) {
  if (beta < 1) throw ConfigError("beta must be at least 1");
  const std::size_t n = g.node_count();
  EdgeDelta d(u);
  std::vector<double> key = fixed_key ? *fixed_key : detail::degrees_of(g);
  for (std::size_t k = 0; k < beta && d.size() < n - 1; ++k) {
    NodeId best = u;
    for (NodeId v = 0; v < n; ++v) {
      if (v == u || d.contains(v)) continue;
      if (best == u || key[v] > key[best]) best = v;
    }
    if (!fixed_key) {
      key[best] += g.has_edge(u, best) ? -1.0 : 1.0;
      key[u] += g.has_edge(u, best) ? -1.0 : 1.0;
    }
    d.toggle(best);
  }
  return d;
}

/// Runs one baseline end to end, including re-detection with f.
inline HidingOutcome run_baseline(const BaselineSpec& spec, const Graph& g, NodeId u,
                                  const DetectorSpec& f, const Partition& original, double tau,
                                  std::size_t beta, const std::vector<double>* betweenness_cache = nullptr) {
  const auto start = std::chrono::steady_clock::now();
  detail::BaselineContext ctx{g, u, f, original, tau, beta};
  switch (spec.kind) {
    case BaselineKind::dice:
      return detail::finish(ctx, dice_delta(g, u, community_of(original, u), beta), start);
    case BaselineKind::roam: {
      auto d = roam_delta(g, u, beta);
      auto out = detail::finish(ctx, d, start);
      if (d.empty()) out.success = false;
      return out;
    }
    case BaselineKind::random:
      return detail::finish(ctx, random_delta(g, u, beta, spec.seed, spec.distinct_random_draws),
                            start);
    case BaselineKind::degree:
      return detail::finish(ctx, ranked_toggle_delta(g, u, beta, nullptr), start);
    case BaselineKind::centrality: {
      if (betweenness_cache) {
        return detail::finish(ctx, ranked_toggle_delta(g, u, beta, betweenness_cache), start);
      }
      const auto bc = betweenness(g);
      return detail::finish(ctx, ranked_toggle_delta(g, u, beta, &bc), start);
    }
  }
  throw ConfigError("unknown baseline");
}

inline HidingOutcome run_dice(const Graph& g, NodeId u, const DetectorSpec& f,
                              const Partition& original, double tau, std::size_t beta) {
  return run_baseline({BaselineKind::dice}, g, u, f, original, tau, beta);
}

inline HidingOutcome run_roam(const Graph& g, NodeId u, const DetectorSpec& f,
                              const Partition& original, double tau, std::size_t beta) {
  return run_baseline({BaselineKind::roam}, g, u, f, original, tau, beta);
}

inline HidingOutcome run_random(const Graph& g, NodeId u, const DetectorSpec& f,
                                const Partition& original, double tau, std::size_t beta,
                                std::uint64_t seed) {
  return run_baseline({BaselineKind::random, seed}, g, u, f, original, tau, beta);
}

inline HidingOutcome run_degree(const Graph& g, NodeId u, const DetectorSpec& f,
                                const Partition& original, double tau, std::size_t beta) {
  return run_baseline({BaselineKind::degree}, g, u, f, original, tau, beta);
}

inline HidingOutcome run_centrality(const Graph& g, NodeId u, const DetectorSpec& f,
                                    const Partition& original, double tau, std::size_t beta) {
  return run_baseline({BaselineKind::centrality}, g, u, f, original, tau, beta);
}

}  // namespace cmh
