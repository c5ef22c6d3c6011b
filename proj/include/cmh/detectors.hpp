#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "cmh/error.hpp"
#include "cmh/graph.hpp"
#include "cmh/partition.hpp"
#include "cmh/rng.hpp"

namespace cmh {

enum class DetectorKind { greedy, louvain, label_propagation };

struct DetectorSpec {
  DetectorKind kind = DetectorKind::greedy;
  std::uint64_t seed = 0;
  double resolution = 1.0;       // louvain
  std::size_t max_sweeps = 100;  // label propagation

  friend bool operator==(const DetectorSpec&, const DetectorSpec&) = default;
};

inline constexpr const char* kAvailableDetectors = "greedy, louvain, labelprop";

inline std::string to_string(DetectorKind kind) {
  switch (kind) {
    case DetectorKind::greedy: return "greedy";
    case DetectorKind::louvain: return "louvain";
    case DetectorKind::label_propagation: return "labelprop";
  }
  return "unknown";
}

inline DetectorKind parse_detector_kind(const std::string& name) {
  if (name == "greedy") return DetectorKind::greedy;
  if (name == "louvain") return DetectorKind::louvain;
  if (name == "labelprop" || name == "label_propagation") return DetectorKind::label_propagation;
  throw ConfigError("unsupported detector '" + name + "'; available: " + kAvailableDetectors);
}

namespace detail {

// Differences below this are treated as ties and resolved by id.
inline constexpr double kGainTolerance = 1e-12;

/// Clauset-Newman-Moore agglomeration. Merges the adjacent community pair
/// with the largest modularity gain until no merge improves Q.
template <GraphLike G>
Partition greedy_modularity(const G& g) {
  const std::size_t n = g.node_count();
  const double two_m = 2.0 * static_cast<double>(g.edge_count());
  if (two_m == 0) return Partition::singletons(n);

  // e[i][j]: fraction of edge ends joining i and j (each direction); a[i]: volume share.
  std::vector<std::map<std::uint32_t, double>> e(n);
  std::vector<double> a(n, 0.0);
  std::vector<std::uint32_t> leader(n);
  std::iota(leader.begin(), leader.end(), 0u);
  std::vector<bool> alive(n, true);
  for (NodeId v = 0; v < n; ++v) {
    a[v] = static_cast<double>(g.degree(v)) / two_m;
    g.for_each_neighbor(v, [&](NodeId w) { e[v][w] += 1.0 / two_m; });
  }

  while (true) {
    double best = 0.0;
    std::uint32_t bi = 0, bj = 0;
    bool found = false;
    for (std::uint32_t i = 0; i < n; ++i) {
      if (!alive[i]) continue;
      for (const auto& [j, eij] : e[i]) {
        if (j <= i) continue;
        const double dq = 2.0 * (eij - a[i] * a[j]);
        // Scan order is (i, j) ascending, so keeping the first of a tie
        // selects the lowest pair.
        if (!found || dq > best + kGainTolerance) {
          best = dq;
          bi = i;
          bj = j;
          found = true;
        }
      }
    }
    if (!found || best <= kGainTolerance) break;

    // Merge bj into bi.
    for (const auto& [k, ejk] : e[bj]) {
      if (k == bi) continue;
      e[bi][k] += ejk;
      auto& back = e[k];
      back.erase(bj);
      back[bi] += ejk;
    }
    e[bi].erase(bj);
    e[bj].clear();
    a[bi] += a[bj];
    a[bj] = 0.0;
    alive[bj] = false;
    for (auto& l : leader) {
      if (l == bj) l = bi;
    }
  }
  return Partition(leader);
}

struct WeightedGraph {
  std::vector<std::vector<std::pair<std::uint32_t, double>>> adj;  // off-diagonal
  std::vector<double> loops;  // internal edge weight per node
  std::vector<double> strength;
  double total = 0.0;  // m
};

template <GraphLike G>
WeightedGraph to_weighted(const G& g) {
  WeightedGraph w;
  const std::size_t n = g.node_count();
  w.adj.resize(n);
  w.loops.assign(n, 0.0);
  w.strength.assign(n, 0.0);
  for (NodeId v = 0; v < n; ++v) {
    g.for_each_neighbor(v, [&](NodeId x) { w.adj[v].emplace_back(x, 1.0); });
    w.strength[v] = static_cast<double>(g.degree(v));
  }
  w.total = static_cast<double>(g.edge_count());
  return w;
}

inline WeightedGraph aggregate(const WeightedGraph& w, const std::vector<std::uint32_t>& comm,
                               std::size_t k) {
  WeightedGraph out;
  out.adj.resize(k);
  out.loops.assign(k, 0.0);
  out.strength.assign(k, 0.0);
  out.total = w.total;
  std::vector<std::map<std::uint32_t, double>> acc(k);
  for (std::size_t v = 0; v < w.adj.size(); ++v) {
    const auto c = comm[v];
    out.loops[c] += w.loops[v];
    out.strength[c] += w.strength[v];
    for (auto [x, wt] : w.adj[v]) {
      const auto d = comm[x];
      if (d == c) {
        out.loops[c] += wt / 2.0;  // each internal edge is visited twice
      } else {
        acc[c][d] += wt;
      }
    }
  }
  for (std::size_t c = 0; c < k; ++c) {
    for (auto [d, wt] : acc[c]) out.adj[c].emplace_back(d, wt);
  }
  return out;
}

/// One Louvain local-moving phase. Returns true when any node moved.
inline bool louvain_local_moves(const WeightedGraph& w, std::vector<std::uint32_t>& comm,
                                double resolution, std::mt19937_64& rng) {
  const std::size_t n = w.adj.size();
  const double m = w.total;
  std::vector<double> tot(n, 0.0);
  for (std::size_t v = 0; v < n; ++v) tot[comm[v]] += w.strength[v];

  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<double> link(n, 0.0);
  std::vector<std::uint32_t> touched;
  bool any = false;
  bool moved = true;
  while (moved) {
    moved = false;
    for (auto v : order) {
      const auto home = comm[v];
      const double kv = w.strength[v];
      touched.clear();
      for (auto [x, wt] : w.adj[v]) {
        const auto c = comm[x];
        if (link[c] == 0.0) touched.push_back(c);
        link[c] += wt;
      }
      tot[home] -= kv;
      auto gain = [&](std::uint32_t c) { return link[c] - resolution * tot[c] * kv / (2.0 * m); };
      std::uint32_t best = home;
      double best_gain = gain(home);
      std::sort(touched.begin(), touched.end());
      for (auto c : touched) {
        if (c == home) continue;
        const double gc = gain(c);
        if (gc > best_gain + kGainTolerance) {
          best_gain = gc;
          best = c;
        }
      }
      tot[best] += kv;
      if (best != home) {
        comm[v] = best;
        moved = true;
        any = true;
      }
      for (auto c : touched) link[c] = 0.0;
      link[home] = 0.0;
    }
  }
  return any;
}

template <GraphLike G>
Partition louvain(const G& g, double resolution, std::uint64_t seed) {
  const std::size_t n = g.node_count();
  if (g.edge_count() == 0) return Partition::singletons(n);
  std::mt19937_64 rng(seed_sequence(seed, 0x4c6f7576ULL));
  WeightedGraph w = to_weighted(g);
  std::vector<std::uint32_t> membership(n);
  std::iota(membership.begin(), membership.end(), 0u);

  while (true) {
    std::vector<std::uint32_t> comm(w.adj.size());
    std::iota(comm.begin(), comm.end(), 0u);
    if (!louvain_local_moves(w, comm, resolution, rng)) break;
    // Renumber to 0..k-1.
    std::vector<std::uint32_t> remap(comm.size(), UINT32_MAX);
    std::uint32_t k = 0;
    for (auto& c : comm) {
      if (remap[c] == UINT32_MAX) remap[c] = k++;
      c = remap[c];
    }
    for (auto& mbr : membership) mbr = comm[mbr];
    if (k == w.adj.size()) break;
    w = aggregate(w, comm, k);
  }
  return Partition(membership);
}

/// Asynchronous label propagation over a per-sweep shuffled order. Each node
/// takes the most frequent neighbour label, smallest label on ties.
template <GraphLike G>
Partition label_propagation(const G& g, std::uint64_t seed, std::size_t max_sweeps) {
  const std::size_t n = g.node_count();
  std::mt19937_64 rng(seed_sequence(seed, 0x4c50ULL));
  std::vector<std::uint32_t> label(n);
  std::iota(label.begin(), label.end(), 0u);
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  std::vector<std::uint32_t> count(n, 0);
  std::vector<std::uint32_t> touched;

  for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
    std::shuffle(order.begin(), order.end(), rng);
    bool changed = false;
    for (auto v : order) {
      if (g.degree(v) == 0) continue;
      touched.clear();
      g.for_each_neighbor(v, [&](NodeId x) {
        if (count[label[x]]++ == 0) touched.push_back(label[x]);
      });
      std::uint32_t best = label[v];
      std::uint32_t best_count = 0;
      for (auto l : touched) {
        if (count[l] > best_count || (count[l] == best_count && l < best)) {
          best = l;
          best_count = count[l];
        }
      }
      for (auto l : touched) count[l] = 0;
      if (best != label[v]) {
        label[v] = best;
        changed = true;
      }
    }
    if (!changed) break;
  }
  return Partition(label);
}

}  // namespace detail

/// Runs the selected detector. Pure in (spec, graph).
template <GraphLike G>
Partition detect(const DetectorSpec& spec, const G& g) {
  if (g.node_count() == 0) throw Error("cannot detect communities on an empty graph");
  switch (spec.kind) {
    case DetectorKind::greedy: return detail::greedy_modularity(g);
    case DetectorKind::louvain: return detail::louvain(g, spec.resolution, spec.seed);
    case DetectorKind::label_propagation:
      return detail::label_propagation(g, spec.seed, spec.max_sweeps);
  }
  throw ConfigError(std::string("unsupported detector; available: ") + kAvailableDetectors);
}

}  // namespace cmh
