#pragma once

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "cmh/error.hpp"
#include "cmh/graph.hpp"

namespace cmh {

struct EdgeListLoad {
  Graph graph;
  std::size_t dropped_self_loops = 0;
  std::size_t duplicate_edges = 0;
};

/// Reads "label label" lines; '#' and '%' start comments. Ids follow first
/// appearance. Self-loops are dropped and duplicates collapsed, both counted.
inline EdgeListLoad load_edge_list(std::istream& in) {
  std::vector<std::string> labels;
  std::unordered_map<std::string, NodeId> ids;
  std::set<std::pair<NodeId, NodeId>> edges;
  EdgeListLoad result;

  auto intern = [&](const std::string& s) {
    auto [it, inserted] = ids.emplace(s, static_cast<NodeId>(labels.size()));
    if (inserted) labels.push_back(s);
    return it->second;
  };

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    if (line[first] == '#' || line[first] == '%') continue;
    std::istringstream fields(line);
    std::string a, b, extra;
    if (!(fields >> a >> b) || (fields >> extra)) {
      throw ParseError(line_no, "expected exactly two node labels, got '" + line + "'");
    }
    if (a == b) {
      intern(a);
      ++result.dropped_self_loops;
      continue;
    }
    NodeId x = intern(a);
    NodeId y = intern(b);
    if (x > y) std::swap(x, y);
    if (!edges.emplace(x, y).second) ++result.duplicate_edges;
  }
  if (edges.empty()) throw ParseError(line_no, "edge list contains no edges");
  result.graph = Graph(std::move(labels), {edges.begin(), edges.end()});
  return result;
}

inline EdgeListLoad load_edge_list_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open edge list '" + path + "'");
  return load_edge_list(in);
}

namespace detail {

inline bool parse_integer(std::string_view s, long long& out) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace detail

/// Numeric labels order numerically and precede non-numeric ones, which
/// order lexicographically.
inline bool label_less(const std::string& a, const std::string& b) {
  long long x = 0, y = 0;
  const bool na = detail::parse_integer(a, x);
  const bool nb = detail::parse_integer(b, y);
  if (na && nb) return x < y || (x == y && a < b);
  if (na != nb) return na;
  return a < b;
}

/// Deterministic serialisation: smaller label first on each line, lines sorted.
inline void write_edge_list(const Graph& g, std::ostream& out) {
  std::vector<std::pair<std::string, std::string>> rows;
  rows.reserve(g.edge_count());
  for (auto [a, b] : g.edges()) {
    auto la = g.label(a);
    auto lb = g.label(b);
    if (label_less(lb, la)) std::swap(la, lb);
    rows.emplace_back(std::move(la), std::move(lb));
  }
  std::sort(rows.begin(), rows.end(), [](const auto& x, const auto& y) {
    if (x.first != y.first) return label_less(x.first, y.first);
    return label_less(x.second, y.second);
  });
  for (const auto& [a, b] : rows) out << a << ' ' << b << '\n';
}

}  // namespace cmh
