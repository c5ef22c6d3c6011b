#pragma once

#include <cstddef>
#include <vector>

#include "cmh/detectors.hpp"
#include "cmh/graph.hpp"
#include "cmh/partition.hpp"
#include "cmh/similarity.hpp"

namespace cmh {

/// Result shared by the gradient method and all baselines.
struct HidingOutcome {
  bool success = false;
  NodeId target = 0;
  EdgeDelta delta;  // owner is the target, except for ROAM
  std::size_t used_budget = 0;
  std::size_t iterations = 0;
  std::size_t restarts = 0;
  double wall_ms = 0.0;  // excluded from determinism checks
  Partition final_partition;
  double similarity = 1.0;

  friend bool operator==(const HidingOutcome& a, const HidingOutcome& b) {
    return a.success == b.success && a.target == b.target && a.delta == b.delta &&
           a.used_budget == b.used_budget && a.iterations == b.iterations &&
           a.restarts == b.restarts && a.final_partition == b.final_partition &&
           a.similarity == b.similarity;
  }
};

/// Detection on G' and the hiding predicate for one candidate delta.
struct Assessment {
  Partition partition;
  double similarity = 1.0;
  bool success = false;
};

/// `original_peers` is C_i without u, sorted.
inline Assessment assess(const Graph& g, NodeId u, const DetectorSpec& f,
                         const std::vector<NodeId>& original_peers, const EdgeDelta& delta,
                         double tau, std::size_t beta) {
  Assessment out;
  out.partition = delta.empty() ? detect(f, g) : detect(f, apply_delta(g, delta));
  const auto peers = without(community_of(out.partition, u), u);
  out.similarity = similarity(original_peers, peers);
  out.success = out.similarity <= tau && delta.size() <= beta;
  return out;
}

}  // namespace cmh
