#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "netobs/error.hpp"
#include "netobs/graph.hpp"

namespace netobs {

inline constexpr Node kUnmatched = std::numeric_limits<Node>::max();

/// A matching on a BipartiteGraph, stored from both sides.
struct MatchingResult {
  std::vector<Node> mate_plus;   // plus -> minus, or kUnmatched
  std::vector<Node> mate_minus;  // minus -> plus, or kUnmatched
  std::size_t size = 0;
  std::vector<Node> unmatched_plus;  // ascending
  std::vector<Node> matched_plus;    // ascending

  bool is_matched_plus(Node p) const { return mate_plus[p] != kUnmatched; }

  std::vector<std::pair<Node, Node>> pairs() const {
    std::vector<std::pair<Node, Node>> out;
    out.reserve(size);
    for (Node p = 0; p < mate_plus.size(); ++p)
      if (mate_plus[p] != kUnmatched) out.emplace_back(p, mate_plus[p]);
    return out;
  }

  friend bool operator==(const MatchingResult&, const MatchingResult&) = default;
};

namespace detail {

inline void finalize(MatchingResult& m) {
  m.size = 0;
  m.unmatched_plus.clear();
  m.matched_plus.clear();
  for (Node p = 0; p < m.mate_plus.size(); ++p) {
    if (m.mate_plus[p] == kUnmatched) {
      m.unmatched_plus.push_back(p);
    } else {
      m.matched_plus.push_back(p);
      ++m.size;
    }
  }
}

}  // namespace detail

// Builds a MatchingResult from explicit (plus, minus) pairs, validating that
// each pair is an arc of b and that no endpoint is used twice.
inline MatchingResult make_matching(const BipartiteGraph& b,
                                    std::span<const std::pair<Node, Node>> pairs) {
  MatchingResult m;
  m.mate_plus.assign(b.plus_count(), kUnmatched);
  m.mate_minus.assign(b.minus_count(), kUnmatched);
  for (auto [p, q] : pairs) {
    if (p >= b.plus_count() || q >= b.minus_count() || !b.has_arc(p, q))
      throw InvalidMatchingError("pair (" + std::to_string(p) + "+, " + std::to_string(q) +
                                 "-) is not an arc of the bipartite graph");
    if (m.mate_plus[p] != kUnmatched || m.mate_minus[q] != kUnmatched)
      throw InvalidMatchingError("node used twice in matching");
    m.mate_plus[p] = q;
    m.mate_minus[q] = p;
  }
  detail::finalize(m);
  return m;
}

/// Hopcroft-Karp maximum matching, O(sqrt(n) |E|).
///
/// Free plus nodes are scanned in index order and arcs in ascending minus
/// order, so the result is a canonical function of the input. A greedy pass
/// in that same order seeds the matching. Each phase
/// builds BFS layers from all free plus nodes and then augments along a
/// maximal set of vertex-disjoint shortest paths; the augmentation is the
/// symmetric difference of the matching with each path. The DFS is
/// iterative so long alternating chains on 1e5-node graphs are fine.
inline MatchingResult maximum_matching(const BipartiteGraph& b) {
  const std::size_t np = b.plus_count();
  constexpr std::size_t kInf = std::numeric_limits<std::size_t>::max();

  MatchingResult m;
  m.mate_plus.assign(np, kUnmatched);
  m.mate_minus.assign(b.minus_count(), kUnmatched);

  std::vector<std::size_t> dist(np);
  std::vector<std::size_t> cursor(np);
  std::vector<Node> queue;
  queue.reserve(np);
  std::vector<Node> stack;
  std::vector<Node> via;  // minus node chosen at each stack level
  std::size_t limit = kInf;  // layer of the shortest augmenting paths

  auto bfs = [&] {
    queue.clear();
    for (Node p = 0; p < np; ++p) {
      if (m.mate_plus[p] == kUnmatched) {
        dist[p] = 0;
        queue.push_back(p);
      } else {
        dist[p] = kInf;
      }
    }
    limit = kInf;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      Node p = queue[head];
      if (dist[p] >= limit) break;
      for (Node q : b.arcs_from(p)) {
        Node next = m.mate_minus[q];
        if (next == kUnmatched) {
          limit = dist[p];
        } else if (dist[next] == kInf) {
          dist[next] = dist[p] + 1;
          queue.push_back(next);
        }
      }
    }
    return limit != kInf;
  };

  auto augment_from = [&](Node root) {
    stack.assign(1, root);
    via.clear();
    while (!stack.empty()) {
      Node u = stack.back();
      auto arcs = b.arcs_from(u);
      if (cursor[u] == arcs.size()) {
        dist[u] = kInf;  // dead end for the rest of this phase
        stack.pop_back();
        if (!via.empty()) via.pop_back();
        continue;
      }
      Node q = arcs[cursor[u]++];
      Node next = m.mate_minus[q];
      if (next == kUnmatched) {
        if (dist[u] != limit) continue;
        // flip the path: each stack level takes the minus node it descended through
        via.push_back(q);
        for (std::size_t level = 0; level < stack.size(); ++level) {
          m.mate_plus[stack[level]] = via[level];
          m.mate_minus[via[level]] = stack[level];
        }
        return true;
      }
      if (dist[next] == dist[u] + 1) {
        via.push_back(q);
        stack.push_back(next);
      }
    }
    return false;
  };

  for (Node p = 0; p < np; ++p)
    for (Node q : b.arcs_from(p))
      if (m.mate_minus[q] == kUnmatched) {
        m.mate_plus[p] = q;
        m.mate_minus[q] = p;
        break;
      }

  while (bfs()) {
    std::fill(cursor.begin(), cursor.end(), 0);
    for (Node p = 0; p < np; ++p)
      if (m.mate_plus[p] == kUnmatched) augment_from(p);
  }
  detail::finalize(m);
  return m;
}

// Generic rank of a matrix with the graph's free pattern (zero diagonal).
inline std::size_t structural_rank(const Graph& g) {
  return maximum_matching(to_bipartite(g)).size;
}

inline std::size_t rank_deficiency(const Graph& g) {
  return g.node_count() - structural_rank(g);
}

/// Bipartite graph with every matched arc reversed (minus -> plus) and all
/// other arcs kept (plus -> minus). Directed reachability from an unmatched
/// plus node follows alternating paths by construction.
class AuxiliaryGraph {
 public:
  AuxiliaryGraph(const BipartiteGraph& b, const MatchingResult& m)
      : plus_count_(b.plus_count()), minus_count_(b.minus_count()) {
    if (m.mate_plus.size() != b.plus_count() || m.mate_minus.size() != b.minus_count())
      throw InvalidMatchingError("matching dimensions do not match the bipartite graph");
    reversed_.assign(minus_count_, kUnmatched);
    plus_matched_.assign(plus_count_, false);
    offsets_.reserve(plus_count_ + 1);
    offsets_.push_back(0);
    for (Node p = 0; p < plus_count_; ++p) {
      const Node mate = m.mate_plus[p];
      if (mate != kUnmatched) {
        if (mate >= minus_count_ || !b.has_arc(p, mate) || m.mate_minus[mate] != p)
          throw InvalidMatchingError("matching pair (" + std::to_string(p) + "+, " +
                                     std::to_string(mate) + "-) is not an arc");
        reversed_[mate] = p;
        plus_matched_[p] = true;
        ++reversed_count_;
      }
      for (Node q : b.arcs_from(p))
        if (q != mate) forward_.push_back(q);
      offsets_.push_back(forward_.size());
    }
  }

  std::size_t plus_count() const noexcept { return plus_count_; }
  std::size_t minus_count() const noexcept { return minus_count_; }
  std::size_t forward_count() const noexcept { return forward_.size(); }
  std::size_t reversed_count() const noexcept { return reversed_count_; }
  std::size_t arc_count() const noexcept { return forward_.size() + reversed_count_; }

  std::span<const Node> forward_from(Node plus) const {
    return {forward_.data() + offsets_[plus], offsets_[plus + 1] - offsets_[plus]};
  }

  // The plus node a minus node points back to, or kUnmatched.
  Node reversed_from(Node minus) const { return reversed_[minus]; }

  bool is_matched_plus(Node plus) const { return plus_matched_[plus]; }

 private:
  std::size_t plus_count_ = 0;
  std::size_t minus_count_ = 0;
  std::vector<std::size_t> offsets_;
  std::vector<Node> forward_;
  std::vector<Node> reversed_;
  std::size_t reversed_count_ = 0;
  std::vector<bool> plus_matched_;
};

inline AuxiliaryGraph build_auxiliary(const BipartiteGraph& b, const MatchingResult& m) {
  return AuxiliaryGraph(b, m);
}

namespace detail {

// Reusable BFS state so that many reach queries on one graph avoid
// reallocating; stamps make clearing O(1).
class ReachScratch {
 public:
  explicit ReachScratch(std::size_t plus_count) : stamp_(plus_count, 0) {}

  std::vector<Node> run(const AuxiliaryGraph& aux, Node start) {
    ++epoch_;
    std::vector<Node> reached{start};
    stamp_[start] = epoch_;
    for (std::size_t head = 0; head < reached.size(); ++head) {
      for (Node q : aux.forward_from(reached[head])) {
        Node p = aux.reversed_from(q);
        // an unmatched minus node here would mean an augmenting path
        if (p != kUnmatched && stamp_[p] != epoch_) {
          stamp_[p] = epoch_;
          reached.push_back(p);
        }
      }
    }
    std::sort(reached.begin(), reached.end());
    return reached;
  }

 private:
  std::vector<std::size_t> stamp_;
  std::size_t epoch_ = 0;
};

}  // namespace detail

// Plus nodes reachable from an unmatched plus node, ascending; includes start.
inline std::vector<Node> alternating_reach(const AuxiliaryGraph& aux, Node start) {
  if (start >= aux.plus_count()) throw PreconditionError("start node out of range");
  if (aux.is_matched_plus(start))
    throw PreconditionError("alternating reach must start at an unmatched node, got " +
                            std::to_string(start));
  detail::ReachScratch scratch(aux.plus_count());
  return scratch.run(aux, start);
}

}  // namespace netobs
