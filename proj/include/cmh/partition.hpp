#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "cmh/error.hpp"
#include "cmh/graph.hpp"

namespace cmh {

/// Disjoint, covering community assignment. Stored canonically: communities
/// are ordered by their smallest member and each member list is sorted, so
/// two equal groupings compare equal regardless of how labels were produced.
class Partition {
 public:
  Partition() = default;

  /// From arbitrary per-node labels (any integers).
  explicit Partition(std::span<const std::uint32_t> labels) {
    const std::uint32_t none = std::numeric_limits<std::uint32_t>::max();
    std::vector<std::uint32_t> remap;
    assignment_.resize(labels.size());
    std::uint32_t next = 0;
    // First-appearance renumbering yields the min-member ordering directly.
    for (std::size_t v = 0; v < labels.size(); ++v) {
      const std::uint32_t l = labels[v];
      if (l >= remap.size()) remap.resize(static_cast<std::size_t>(l) + 1, none);
      if (remap[l] == none) {
        remap[l] = next++;
        communities_.emplace_back();
      }
      assignment_[v] = remap[l];
      communities_[remap[l]].push_back(static_cast<NodeId>(v));
    }
  }

  explicit Partition(const std::vector<std::uint32_t>& labels)
      : Partition(std::span<const std::uint32_t>(labels)) {}

  static Partition from_communities(std::size_t n, const std::vector<std::vector<NodeId>>& groups) {
    const std::uint32_t none = std::numeric_limits<std::uint32_t>::max();
    std::vector<std::uint32_t> labels(n, none);
    for (std::size_t c = 0; c < groups.size(); ++c) {
      if (groups[c].empty()) throw ContractViolation("empty community");
      for (NodeId v : groups[c]) {
        if (v >= n) throw ContractViolation("community member out of range");
        if (labels[v] != none) throw ContractViolation("node in two communities");
        labels[v] = static_cast<std::uint32_t>(c);
      }
    }
    if (std::find(labels.begin(), labels.end(), none) != labels.end()) {
      throw ContractViolation("partition does not cover every node");
    }
    return Partition(labels);
  }

  static Partition singletons(std::size_t n) {
    std::vector<std::uint32_t> labels(n);
    for (std::size_t v = 0; v < n; ++v) labels[v] = static_cast<std::uint32_t>(v);
    return Partition(labels);
  }

  static Partition whole(std::size_t n) { return Partition(std::vector<std::uint32_t>(n, 0)); }

  std::size_t node_count() const noexcept { return assignment_.size(); }
  std::size_t size() const noexcept { return communities_.size(); }
  std::uint32_t community_index(NodeId v) const { return assignment_[v]; }
  const std::vector<std::uint32_t>& assignment() const noexcept { return assignment_; }
  const std::vector<std::vector<NodeId>>& communities() const noexcept { return communities_; }
  const std::vector<NodeId>& community(std::uint32_t c) const { return communities_[c]; }

  friend bool operator==(const Partition&, const Partition&) = default;

 private:
  std::vector<std::uint32_t> assignment_;
  std::vector<std::vector<NodeId>> communities_;
};

/// Sorted member list of the community containing u.
inline const std::vector<NodeId>& community_of(const Partition& part, NodeId u) {
  if (u >= part.node_count()) throw ContractViolation("node id out of range");
  return part.community(part.community_index(u));
}

/// Newman modularity with resolution gamma (1 = standard Q).
template <GraphLike G>
double modularity(const G& g, const Partition& part, double resolution = 1.0) {
  if (part.node_count() != g.node_count()) throw Error("partition/graph size mismatch");
  const double m = static_cast<double>(g.edge_count());
  if (m == 0) throw Error("modularity undefined for a graph without edges");
  std::vector<double> internal(part.size(), 0.0);
  std::vector<double> volume(part.size(), 0.0);
  for (NodeId v = 0; v < g.node_count(); ++v) {
    const auto c = part.community_index(v);
    volume[c] += static_cast<double>(g.degree(v));
    g.for_each_neighbor(v, [&](NodeId w) {
      if (part.community_index(w) == c) internal[c] += 0.5;
    });
  }
  double q = 0.0;
  for (std::size_t c = 0; c < part.size(); ++c) {
    const double share = volume[c] / (2.0 * m);
    q += internal[c] / m - resolution * share * share;
  }
  return q;
}

}  // namespace cmh
