#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "netobs/error.hpp"

namespace netobs {

using Node = std::size_t;

// Undirected edge, always stored with u < v.
struct Edge {
  Node u = 0;
  Node v = 0;

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Immutable undirected simple graph over nodes [0, n).
///
/// Adjacency is kept in CSR form with each neighbor list sorted ascending,
/// which every downstream algorithm relies on for deterministic traversal.
/// Optional string labels map dense indices back to the identifiers of the
/// source file.
class Graph {
 public:
  Graph() = default;

  // Duplicate edges (in either orientation) are merged. Self-loops and
  // out-of-range endpoints are rejected.
  Graph(std::size_t node_count, std::vector<Edge> edges, std::vector<std::string> labels = {})
      : node_count_(node_count), labels_(std::move(labels)) {
    if (node_count_ == 0) throw PreconditionError("graph needs at least one node");
    if (!labels_.empty() && labels_.size() != node_count_)
      throw PreconditionError("label count does not match node count");
    for (auto& e : edges) {
      if (e.u == e.v) throw PreconditionError("self-loop on node " + std::to_string(e.u));
      if (e.u >= node_count_ || e.v >= node_count_)
        throw PreconditionError("edge endpoint out of range");
      if (e.u > e.v) std::swap(e.u, e.v);
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    edges_ = std::move(edges);

    offsets_.assign(node_count_ + 1, 0);
    for (const auto& e : edges_) {
      ++offsets_[e.u + 1];
      ++offsets_[e.v + 1];
    }
    for (std::size_t i = 0; i < node_count_; ++i) offsets_[i + 1] += offsets_[i];
    targets_.resize(offsets_.back());
    std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
    for (const auto& e : edges_) {
      targets_[fill[e.u]++] = e.v;
      targets_[fill[e.v]++] = e.u;
    }
    for (std::size_t i = 0; i < node_count_; ++i)
      std::sort(targets_.begin() + offsets_[i], targets_.begin() + offsets_[i + 1]);

    for (std::size_t i = 0; i < labels_.size(); ++i) label_index_.emplace(labels_[i], i);
  }

  std::size_t node_count() const noexcept { return node_count_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  std::span<const Edge> edges() const noexcept { return edges_; }

  std::span<const Node> neighbors(Node i) const {
    return {targets_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
  }

  std::size_t degree(Node i) const { return offsets_[i + 1] - offsets_[i]; }

  bool has_edge(Node a, Node b) const {
    auto nb = neighbors(a);
    return std::binary_search(nb.begin(), nb.end(), b);
  }

  bool has_labels() const noexcept { return !labels_.empty(); }

  std::string label(Node i) const { return labels_.empty() ? std::to_string(i) : labels_[i]; }

  // Resolves an external identifier. Unlabelled graphs accept decimal indices.
  std::optional<Node> find_node(std::string_view label) const {
    if (!labels_.empty()) {
      auto it = label_index_.find(std::string(label));
      if (it == label_index_.end()) return std::nullopt;
      return it->second;
    }
    Node value = 0;
    if (label.empty()) return std::nullopt;
    for (char c : label) {
      if (c < '0' || c > '9') return std::nullopt;
      value = value * 10 + static_cast<Node>(c - '0');
      if (value >= node_count_) return std::nullopt;
    }
    return value;
  }

 private:
  std::size_t node_count_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::size_t> offsets_;
  std::vector<Node> targets_;
  std::vector<std::string> labels_;
  std::unordered_map<std::string, Node> label_index_;
};

/// Two-layer representation of a system graph. Plus nodes are the state
/// columns, minus nodes the rows; arc (i+, j-) encodes a free entry a_ji.
/// minus_count may exceed plus_count when measurement rows are appended.
class BipartiteGraph {
 public:
  BipartiteGraph() = default;

  BipartiteGraph(std::size_t plus_count, std::size_t minus_count,
                 std::vector<std::vector<Node>> adjacency)
      : plus_count_(plus_count), minus_count_(minus_count) {
    if (adjacency.size() != plus_count_)
      throw PreconditionError("adjacency size does not match plus count");
    offsets_.reserve(plus_count_ + 1);
    offsets_.push_back(0);
    for (auto& list : adjacency) {
      std::sort(list.begin(), list.end());
      list.erase(std::unique(list.begin(), list.end()), list.end());
      for (Node q : list) {
        if (q >= minus_count_) throw PreconditionError("arc endpoint out of range");
        targets_.push_back(q);
      }
      offsets_.push_back(targets_.size());
    }
  }

  std::size_t plus_count() const noexcept { return plus_count_; }
  std::size_t minus_count() const noexcept { return minus_count_; }
  std::size_t arc_count() const noexcept { return targets_.size(); }

  std::span<const Node> arcs_from(Node plus) const {
    return {targets_.data() + offsets_[plus], offsets_[plus + 1] - offsets_[plus]};
  }

  bool has_arc(Node plus, Node minus) const {
    auto a = arcs_from(plus);
    return std::binary_search(a.begin(), a.end(), minus);
  }

 private:
  std::size_t plus_count_ = 0;
  std::size_t minus_count_ = 0;
  std::vector<std::size_t> offsets_;
  std::vector<Node> targets_;
};

// Each undirected edge {i,j} yields arcs (i+, j-) and (j+, i-).
inline BipartiteGraph to_bipartite(const Graph& g) {
  std::vector<std::vector<Node>> adjacency(g.node_count());
  for (Node i = 0; i < g.node_count(); ++i) {
    auto nb = g.neighbors(i);
    adjacency[i].assign(nb.begin(), nb.end());
  }
  return BipartiteGraph(g.node_count(), g.node_count(), std::move(adjacency));
}

// --- Edge-list ingestion --------------------------------------------------

namespace detail {
struct PairHash {
  std::size_t operator()(const std::pair<Node, Node>& p) const noexcept {
    return std::hash<Node>{}(p.first) * 1000003u ^ std::hash<Node>{}(p.second);
  }
};
}  // namespace detail

struct EdgeListResult {
  Graph graph;
  std::size_t self_loops_dropped = 0;
  std::size_t duplicates_dropped = 0;

  std::size_t dropped_lines() const noexcept { return self_loops_dropped + duplicates_dropped; }
};

/// Reads a whitespace-separated edge list. Lines starting with '#' or '%'
/// and blank lines are skipped. Tokens become dense indices in order of
/// first appearance; self-loops and repeated edges are dropped and counted.
inline EdgeListResult load_edge_list(std::istream& in) {
  std::vector<std::string> labels;
  std::unordered_map<std::string, Node> index;
  std::vector<Edge> edges;
  std::unordered_set<std::pair<Node, Node>, detail::PairHash> seen;
  EdgeListResult result;

  auto intern = [&](const std::string& token) {
    auto [it, inserted] = index.emplace(token, labels.size());
    if (inserted) labels.push_back(token);
    return it->second;
  };

  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    if (line[first] == '#' || line[first] == '%') continue;

    std::istringstream tokens(line);
    std::string a, b, extra;
    if (!(tokens >> a >> b) || (tokens >> extra))
      throw ParseError("expected exactly two node tokens", line_number);

    Node u = intern(a);
    Node v = intern(b);
    if (u == v) {
      ++result.self_loops_dropped;
      continue;
    }
    if (u > v) std::swap(u, v);
    if (!seen.emplace(u, v).second) {
      ++result.duplicates_dropped;
      continue;
    }
    edges.push_back({u, v});
  }
  if (labels.empty()) throw ParseError("edge list contains no nodes", 0);

  const std::size_t n = labels.size();
  result.graph = Graph(n, std::move(edges), std::move(labels));
  return result;
}

inline EdgeListResult load_edge_list(std::string_view text) {
  std::istringstream in{std::string(text)};
  return load_edge_list(in);
}

// Writes one "label label" line per edge, preceded by '#' comment lines.
inline void write_edge_list(std::ostream& out, const Graph& g,
                            std::span<const std::string> header = {}) {
  for (const auto& h : header) out << "# " << h << '\n';
  for (const auto& e : g.edges()) out << g.label(e.u) << ' ' << g.label(e.v) << '\n';
}

// --- Metrics ---------------------------------------------------------------

inline std::size_t degree(const Graph& g, Node i) {
  if (i >= g.node_count()) throw PreconditionError("node out of range");
  return g.degree(i);
}

inline double average_degree(const Graph& g) {
  return 2.0 * static_cast<double>(g.edge_count()) / static_cast<double>(g.node_count());
}

// Component id per node; ids are assigned in order of the smallest member.
inline std::vector<std::size_t> connected_components(const Graph& g, std::size_t* count = nullptr) {
  constexpr auto kNone = static_cast<std::size_t>(-1);
  std::vector<std::size_t> component(g.node_count(), kNone);
  std::size_t next = 0;
  std::vector<Node> stack;
  for (Node root = 0; root < g.node_count(); ++root) {
    if (component[root] != kNone) continue;
    component[root] = next;
    stack.push_back(root);
    while (!stack.empty()) {
      Node u = stack.back();
      stack.pop_back();
      for (Node w : g.neighbors(u)) {
        if (component[w] == kNone) {
          component[w] = next;
          stack.push_back(w);
        }
      }
    }
    ++next;
  }
  if (count) *count = next;
  return component;
}

inline bool is_connected(const Graph& g) {
  std::size_t count = 0;
  connected_components(g, &count);
  return count == 1;
}

// Edges among the neighbors of i.
inline std::size_t triangles_at(const Graph& g, Node i) {
  auto nb = g.neighbors(i);
  std::size_t twice = 0;
  for (Node u : nb) {
    auto nu = g.neighbors(u);
    auto a = nb.begin();
    auto b = nu.begin();
    while (a != nb.end() && b != nu.end()) {
      if (*a < *b) {
        ++a;
      } else if (*b < *a) {
        ++b;
      } else {
        ++twice;
        ++a;
        ++b;
      }
    }
  }
  return twice / 2;
}

// Local clustering; nodes of degree < 2 get 0.
inline double clustering_local(const Graph& g, Node i) {
  if (i >= g.node_count()) throw PreconditionError("node out of range");
  const double d = static_cast<double>(g.degree(i));
  if (d < 2) return 0.0;
  return 2.0 * static_cast<double>(triangles_at(g, i)) / (d * (d - 1.0));
}

inline std::size_t triangle_count(const Graph& g) {
  std::size_t total = 0;
  for (const auto& e : g.edges()) {
    auto nu = g.neighbors(e.u);
    auto nv = g.neighbors(e.v);
    // count common neighbors w > v so each triangle u < v < w is seen once
    auto a = std::upper_bound(nu.begin(), nu.end(), e.v);
    auto b = std::upper_bound(nv.begin(), nv.end(), e.v);
    while (a != nu.end() && b != nv.end()) {
      if (*a < *b) {
        ++a;
      } else if (*b < *a) {
        ++b;
      } else {
        ++total;
        ++a;
        ++b;
      }
    }
  }
  return total;
}

inline std::size_t connected_triplets(const Graph& g) {
  std::size_t total = 0;
  for (Node i = 0; i < g.node_count(); ++i) {
    const std::size_t d = g.degree(i);
    total += d * (d - (d > 0 ? 1 : 0)) / 2;
  }
  return total;
}

// 3 * triangles / connected triplets; 0 when there are no triplets.
inline double clustering_global(const Graph& g) {
  const std::size_t triplets = connected_triplets(g);
  if (triplets == 0) return 0.0;
  return 3.0 * static_cast<double>(triangle_count(g)) / static_cast<double>(triplets);
}

struct DegreeStats {
  double mean = 0.0;
  double variance = 0.0;  // population variance
};

inline DegreeStats degree_variance(const Graph& g) {
  const double n = static_cast<double>(g.node_count());
  DegreeStats s;
  s.mean = average_degree(g);
  double acc = 0.0;
  for (Node i = 0; i < g.node_count(); ++i) {
    const double d = static_cast<double>(g.degree(i)) - s.mean;
    acc += d * d;
  }
  s.variance = acc / n;
  return s;
}

}  // namespace netobs
