#pragma once

#include <algorithm>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "cmh/error.hpp"

namespace cmh {

using NodeId = std::uint32_t;

/// Anything the detectors and scorers can walk: a base graph or an overlay.
template <typename G>
concept GraphLike = requires(const G& g, NodeId v) {
  { g.node_count() } -> std::convertible_to<std::size_t>;
  { g.edge_count() } -> std::convertible_to<std::size_t>;
  { g.degree(v) } -> std::convertible_to<std::size_t>;
  { g.has_edge(v, v) } -> std::convertible_to<bool>;
  g.for_each_neighbor(v, [](NodeId) {});
};

/// Immutable simple undirected graph. Internal ids are 0..n-1, each paired
/// with the external label it was read under.
class Graph {
 public:
  Graph() = default;

  /// Builds from id pairs. Self-loops and duplicates are rejected here;
  /// normalisation of dirty input belongs to the loader.
  Graph(std::vector<std::string> labels, std::vector<std::pair<NodeId, NodeId>> edges)
      : labels_(std::move(labels)), adjacency_(labels_.size()) {
    const auto n = static_cast<NodeId>(labels_.size());
    for (NodeId i = 0; i < n; ++i) {
      if (!ids_.emplace(labels_[i], i).second) {
        throw ContractViolation("duplicate node label '" + labels_[i] + "'");
      }
    }
    for (auto [a, b] : edges) {
      if (a >= n || b >= n) throw ContractViolation("edge endpoint out of range");
      if (a == b) throw ContractViolation("self-loop in simple graph");
      if (a > b) std::swap(a, b);
      edges_.emplace_back(a, b);
    }
    std::sort(edges_.begin(), edges_.end());
    if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end()) {
      throw ContractViolation("duplicate edge in simple graph");
    }
    for (auto [a, b] : edges_) {
      adjacency_[a].push_back(b);
      adjacency_[b].push_back(a);
    }
    for (auto& row : adjacency_) std::sort(row.begin(), row.end());
  }

  /// Unlabelled convenience constructor; labels become "0".."n-1".
  static Graph from_edges(std::size_t n, std::vector<std::pair<NodeId, NodeId>> edges) {
    std::vector<std::string> labels;
    labels.reserve(n);
    for (std::size_t i = 0; i < n; ++i) labels.push_back(std::to_string(i));
    return Graph(std::move(labels), std::move(edges));
  }

  std::size_t node_count() const noexcept { return labels_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  std::size_t degree(NodeId v) const { return adjacency_[v].size(); }

  std::span<const NodeId> neighbors(NodeId v) const { return adjacency_[v]; }

  bool has_edge(NodeId a, NodeId b) const {
    const auto& row = adjacency_[a];
    return std::binary_search(row.begin(), row.end(), b);
  }

  template <typename F>
  void for_each_neighbor(NodeId v, F&& f) const {
    for (NodeId w : adjacency_[v]) f(w);
  }

  /// Edges as (min id, max id), sorted.
  const std::vector<std::pair<NodeId, NodeId>>& edges() const noexcept { return edges_; }

  const std::string& label(NodeId v) const { return labels_[v]; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }

  /// Throws Error when the label is unknown.
  NodeId id_of(const std::string& label) const {
    auto it = ids_.find(label);
    if (it == ids_.end()) throw Error("unknown node label '" + label + "'");
    return it->second;
  }

  bool contains_label(const std::string& label) const { return ids_.contains(label); }

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.labels_ == b.labels_ && a.edges_ == b.edges_;
  }

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, NodeId> ids_;
  std::vector<std::pair<NodeId, NodeId>> edges_;
  std::vector<std::vector<NodeId>> adjacency_;
};

/// Row u of the adjacency matrix as a dense 0/1 vector; bits[owner] is always 0.
struct AdjacencyVector {
  NodeId owner = 0;
  std::vector<std::uint8_t> bits;

  friend bool operator==(const AdjacencyVector&, const AdjacencyVector&) = default;
};

template <GraphLike G>
AdjacencyVector adjacency_vector(const G& g, NodeId u) {
  AdjacencyVector a{u, std::vector<std::uint8_t>(g.node_count(), 0)};
  g.for_each_neighbor(u, [&](NodeId v) { a.bits[v] = 1; });
  return a;
}

/// Element-wise clamp(a + p) for p in {-1,0,+1}^n.
inline AdjacencyVector clamp_add(const AdjacencyVector& a, std::span<const std::int8_t> p) {
  if (p.size() != a.bits.size()) throw ContractViolation("perturbation length mismatch");
  if (p[a.owner] != 0) throw ContractViolation("perturbation touches the owner's self slot");
  AdjacencyVector out{a.owner, a.bits};
  for (std::size_t v = 0; v < p.size(); ++v) {
    const int x = static_cast<int>(a.bits[v]) + p[v];
    out.bits[v] = static_cast<std::uint8_t>(std::clamp(x, 0, 1));
  }
  return out;
}

/// Set of toggled edges (owner, v). This is b_u in sparse form.
class EdgeDelta {
 public:
  EdgeDelta() = default;
  explicit EdgeDelta(NodeId owner) : owner_(owner) {}
  EdgeDelta(NodeId owner, std::vector<NodeId> toggled) : owner_(owner), toggled_(std::move(toggled)) {
    std::sort(toggled_.begin(), toggled_.end());
    toggled_.erase(std::unique(toggled_.begin(), toggled_.end()), toggled_.end());
    if (std::binary_search(toggled_.begin(), toggled_.end(), owner_)) {
      throw ContractViolation("edge delta toggles its own owner");
    }
  }

  /// Delta that turns `original` into `perturbed` (Hamming positions).
  static EdgeDelta between(const AdjacencyVector& original, const AdjacencyVector& perturbed) {
    EdgeDelta d(original.owner);
    for (std::size_t v = 0; v < original.bits.size(); ++v) {
      if (original.bits[v] != perturbed.bits[v]) d.toggled_.push_back(static_cast<NodeId>(v));
    }
    return d;
  }

  NodeId owner() const noexcept { return owner_; }
  const std::vector<NodeId>& toggled() const noexcept { return toggled_; }
  std::size_t size() const noexcept { return toggled_.size(); }
  bool empty() const noexcept { return toggled_.empty(); }

  bool contains(NodeId v) const { return std::binary_search(toggled_.begin(), toggled_.end(), v); }

  void toggle(NodeId v) {
    if (v == owner_) throw ContractViolation("edge delta toggles its own owner");
    auto it = std::lower_bound(toggled_.begin(), toggled_.end(), v);
    if (it != toggled_.end() && *it == v) {
      toggled_.erase(it);
    } else {
      toggled_.insert(it, v);
    }
  }

  /// Size of the symmetric difference with another delta of the same owner.
  std::size_t distance(const EdgeDelta& other) const {
    std::vector<NodeId> diff;
    std::set_symmetric_difference(toggled_.begin(), toggled_.end(), other.toggled_.begin(),
                                  other.toggled_.end(), std::back_inserter(diff));
    return diff.size();
  }

  friend bool operator==(const EdgeDelta&, const EdgeDelta&) = default;

 private:
  NodeId owner_ = 0;
  std::vector<NodeId> toggled_;
};

/// Read-only counterfactual: the base graph with one row/column toggled.
/// Holds a pointer to the base, which must outlive the view.
class GraphView {
 public:
  GraphView(const Graph& base, EdgeDelta delta) : base_(&base), delta_(std::move(delta)) {
    if (delta_.owner() >= base.node_count()) throw ContractViolation("delta owner out of range");
    const NodeId u = delta_.owner();
    edge_count_ = base.edge_count();
    auto row = base.neighbors(u);
    std::set_symmetric_difference(row.begin(), row.end(), delta_.toggled().begin(),
                                  delta_.toggled().end(), std::back_inserter(owner_row_));
    for (NodeId v : delta_.toggled()) {
      if (v >= base.node_count()) throw ContractViolation("delta target out of range");
      if (base.has_edge(u, v)) {
        --edge_count_;
      } else {
        ++edge_count_;
      }
    }
  }

  std::size_t node_count() const noexcept { return base_->node_count(); }
  std::size_t edge_count() const noexcept { return edge_count_; }

  std::size_t degree(NodeId v) const {
    if (v == delta_.owner()) return owner_row_.size();
    if (!delta_.contains(v)) return base_->degree(v);
    return base_->has_edge(v, delta_.owner()) ? base_->degree(v) - 1 : base_->degree(v) + 1;
  }

  bool has_edge(NodeId a, NodeId b) const {
    const NodeId u = delta_.owner();
    if (a == u || b == u) {
      const NodeId other = a == u ? b : a;
      return std::binary_search(owner_row_.begin(), owner_row_.end(), other);
    }
    return base_->has_edge(a, b);
  }

  /// Visits neighbours in ascending id order, same as the base graph.
  template <typename F>
  void for_each_neighbor(NodeId v, F&& f) const {
    const NodeId u = delta_.owner();
    if (v == u) {
      for (NodeId w : owner_row_) f(w);
      return;
    }
    if (!delta_.contains(v)) {
      base_->for_each_neighbor(v, f);
      return;
    }
    const bool had = base_->has_edge(v, u);
    bool emitted = had;  // nothing to insert when the edge was removed
    for (NodeId w : base_->neighbors(v)) {
      if (w == u) continue;
      if (!emitted && w > u) {
        f(u);
        emitted = true;
      }
      f(w);
    }
    if (!emitted) f(u);
  }

  const Graph& base() const noexcept { return *base_; }
  const EdgeDelta& delta() const noexcept { return delta_; }
  const std::string& label(NodeId v) const { return base_->label(v); }

  /// Composes another delta on the same owner; toggling twice cancels.
  GraphView apply(const EdgeDelta& more) const {
    if (more.owner() != delta_.owner()) throw ContractViolation("overlay owner mismatch");
    EdgeDelta combined = delta_;
    for (NodeId v : more.toggled()) combined.toggle(v);
    return GraphView(*base_, std::move(combined));
  }

  Graph materialize() const {
    std::vector<std::pair<NodeId, NodeId>> edges;
    edges.reserve(edge_count_);
    for (NodeId a = 0; a < node_count(); ++a) {
      for_each_neighbor(a, [&](NodeId b) {
        if (a < b) edges.emplace_back(a, b);
      });
    }
    return Graph(base_->labels(), std::move(edges));
  }

 private:
  const Graph* base_;
  EdgeDelta delta_;
  std::vector<NodeId> owner_row_;
  std::size_t edge_count_ = 0;
};

inline GraphView apply_delta(const Graph& g, const EdgeDelta& d) { return GraphView(g, d); }

}  // namespace cmh
