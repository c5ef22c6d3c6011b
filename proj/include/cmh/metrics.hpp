#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <utility>

#include "cmh/error.hpp"
#include "cmh/partition.hpp"

namespace cmh {

enum class NmiNormalisation { arithmetic, geometric, max, min };

inline NmiNormalisation parse_nmi_normalisation(const std::string& name) {
  if (name == "arithmetic") return NmiNormalisation::arithmetic;
  if (name == "geometric") return NmiNormalisation::geometric;
  if (name == "max") return NmiNormalisation::max;
  if (name == "min") return NmiNormalisation::min;
  throw ConfigError("unknown NMI normalisation '" + name + "'");
}

/// Normalised mutual information between two partitions of the same nodes.
/// Two zero-entropy partitions score 1 when identical, 0 otherwise.
inline double nmi(const Partition& a, const Partition& b,
                  NmiNormalisation norm = NmiNormalisation::arithmetic) {
  if (a.node_count() != b.node_count()) throw Error("NMI over different node universes");
  const double n = static_cast<double>(a.node_count());
  if (n == 0) throw Error("NMI of empty partitions");
  std::map<std::pair<std::uint32_t, std::uint32_t>, double> joint;
  for (std::size_t v = 0; v < a.node_count(); ++v) {
    joint[{a.community_index(static_cast<NodeId>(v)), b.community_index(static_cast<NodeId>(v))}] += 1.0;
  }
  auto entropy = [n](const Partition& p) {
    double h = 0.0;
    for (const auto& c : p.communities()) {
      const double q = static_cast<double>(c.size()) / n;
      h -= q * std::log(q);
    }
    return h;
  };
  const double ha = entropy(a);
  const double hb = entropy(b);
  if (ha == 0.0 && hb == 0.0) return a == b ? 1.0 : 0.0;
  double mi = 0.0;
  for (const auto& [key, count] : joint) {
    const double pa = static_cast<double>(a.community(key.first).size()) / n;
    const double pb = static_cast<double>(b.community(key.second).size()) / n;
    const double pj = count / n;
    mi += pj * std::log(pj / (pa * pb));
  }
  double denom = 0.0;
  switch (norm) {
    case NmiNormalisation::arithmetic: denom = 0.5 * (ha + hb); break;
    case NmiNormalisation::geometric: denom = std::sqrt(ha * hb); break;
    case NmiNormalisation::max: denom = std::max(ha, hb); break;
    case NmiNormalisation::min: denom = std::min(ha, hb); break;
  }
  if (denom <= 0.0) return 0.0;
  return std::clamp(mi / denom, 0.0, 1.0);
}

/// Harmonic mean of success rate and NMI; 0 when both are 0.
inline double f1(double sr, double nmi_value) {
  const double s = sr + nmi_value;
  return s == 0.0 ? 0.0 : 2.0 * sr * nmi_value / s;
}

}  // namespace cmh
