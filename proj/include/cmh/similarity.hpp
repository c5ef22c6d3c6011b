#pragma once

#include <algorithm>
#include <iterator>
#include <span>
#include <vector>

#include "cmh/graph.hpp"

namespace cmh {

/// Sorensen-Dice coefficient of two sorted id sets; two empty sets give 0.
inline double similarity(std::span<const NodeId> a, std::span<const NodeId> b) {
  if (a.empty() && b.empty()) return 0.0;
  std::size_t common = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++common;
      ++i;
      ++j;
    }
  }
  return 2.0 * static_cast<double>(common) / static_cast<double>(a.size() + b.size());
}

/// Copy of a sorted set with u removed.
inline std::vector<NodeId> without(std::span<const NodeId> members, NodeId u) {
  std::vector<NodeId> out;
  out.reserve(members.size());
  std::copy_if(members.begin(), members.end(), std::back_inserter(out),
               [u](NodeId v) { return v != u; });
  return out;
}

}  // namespace cmh
