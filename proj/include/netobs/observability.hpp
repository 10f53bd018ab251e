#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "netobs/contraction.hpp"
#include "netobs/error.hpp"
#include "netobs/graph.hpp"
#include "netobs/matching.hpp"

namespace netobs {

/// Distinct measured states, ascending. Each sensor sees exactly one state.
class SensorSet {
 public:
  SensorSet() = default;

  SensorSet(std::vector<Node> measured, std::size_t node_count) : measured_(std::move(measured)) {
    std::sort(measured_.begin(), measured_.end());
    if (std::adjacent_find(measured_.begin(), measured_.end()) != measured_.end())
      throw PreconditionError("duplicate sensor");
    if (!measured_.empty() && measured_.back() >= node_count)
      throw PreconditionError("sensor node out of range");
  }

  std::span<const Node> nodes() const noexcept { return measured_; }
  std::size_t size() const noexcept { return measured_.size(); }
  bool empty() const noexcept { return measured_.empty(); }
  bool contains(Node v) const { return std::binary_search(measured_.begin(), measured_.end(), v); }

  SensorSet without(Node v) const {
    SensorSet s = *this;
    s.measured_.erase(std::remove(s.measured_.begin(), s.measured_.end(), v), s.measured_.end());
    return s;
  }

  SensorSet with(Node v) const {
    SensorSet s = *this;
    if (!contains(v)) s.measured_.insert(std::upper_bound(s.measured_.begin(), s.measured_.end(), v), v);
    return s;
  }

  friend bool operator==(const SensorSet&, const SensorSet&) = default;

 private:
  std::vector<Node> measured_;
};

struct ObservabilityVerdict {
  bool observable = false;
  bool accessibility_ok = false;
  bool srank_ok = false;
  std::size_t deficiency_remaining = 0;
  std::optional<Node> inaccessible_node;  // smallest node of a component without a sensor
};

// Bipartite graph of g with one extra minus row per sensor, fed by the
// measured state's plus node. Its maximum matching is S-rank([A; C]).
inline BipartiteGraph augmented_bipartite(const Graph& g, std::span<const Node> sensors) {
  const std::size_t n = g.node_count();
  std::vector<std::vector<Node>> adjacency(n);
  for (Node i = 0; i < n; ++i) {
    auto nb = g.neighbors(i);
    adjacency[i].assign(nb.begin(), nb.end());
  }
  for (std::size_t k = 0; k < sensors.size(); ++k) {
    if (sensors[k] >= n) throw PreconditionError("sensor node out of range");
    adjacency[sensors[k]].push_back(n + k);
  }
  return BipartiteGraph(n, n + sensors.size(), std::move(adjacency));
}

inline std::size_t augmented_structural_rank(const Graph& g, std::span<const Node> sensors) {
  return maximum_matching(augmented_bipartite(g, sensors)).size;
}

/// Accessibility (every component holds a sensor) plus the S-rank condition
/// (the augmented matching saturates every state).
inline ObservabilityVerdict check_structural_observability(const Graph& g, const SensorSet& s) {
  ObservabilityVerdict v;
  std::size_t components = 0;
  const auto component = connected_components(g, &components);
  std::vector<bool> seen(components, false);
  for (Node x : s.nodes()) seen[component[x]] = true;
  v.accessibility_ok = true;
  for (Node x = 0; x < g.node_count(); ++x) {
    if (!seen[component[x]]) {
      v.accessibility_ok = false;
      v.inaccessible_node = x;
      break;
    }
  }
  const std::size_t rank = augmented_structural_rank(g, s.nodes());
  v.deficiency_remaining = g.node_count() - rank;
  v.srank_ok = v.deficiency_remaining == 0;
  v.observable = v.accessibility_ok && v.srank_ok;
  return v;
}

namespace detail {

inline void require_connected(const Graph& g, const SensorSet* s = nullptr) {
  std::size_t components = 0;
  const auto component = connected_components(g, &components);
  if (components == 1) return;
  std::vector<bool> covered(components, false);
  if (s)
    for (Node x : s->nodes()) covered[component[x]] = true;
  // name a component without a sensor, or the second component otherwise
  Node witness = 0;
  bool found = false;
  for (Node x = 0; x < g.node_count() && !found; ++x) {
    if (!covered[component[x]]) {
      witness = x;
      found = true;
    }
  }
  if (!found) {
    for (Node x = 0; x < g.node_count(); ++x) {
      if (component[x] == 1) {
        witness = x;
        break;
      }
    }
  }
  throw HypothesisError("graph is not connected: component containing node " + g.label(witness) +
                        (found ? " has no sensor" : " is separate"));
}

}  // namespace detail

struct SensorCoverReport {
  bool valid = false;
  ObservabilityVerdict verdict;
  // Diagnostic only: does s intersect each contraction of the canonical report.
  std::vector<bool> contraction_covered;

  explicit operator bool() const noexcept { return valid; }
};

inline SensorCoverReport validate_sensor_cover(const Graph& g, const SensorSet& s,
                                               const ContractionReport& contractions) {
  detail::require_connected(g, &s);
  SensorCoverReport r;
  r.verdict = check_structural_observability(g, s);
  r.valid = r.verdict.observable;
  r.contraction_covered.reserve(contractions.count());
  for (const auto& c : contractions.contractions) {
    bool hit = std::any_of(c.nodes.begin(), c.nodes.end(), [&](Node v) { return s.contains(v); });
    r.contraction_covered.push_back(hit);
  }
  return r;
}

inline SensorCoverReport validate_sensor_cover(const Graph& g, const SensorSet& s) {
  return validate_sensor_cover(g, s, detect_contractions(g));
}

/// Unmatched nodes of the canonical maximum matching; a single node (0) when
/// the graph has full structural rank, since one output is still needed.
inline SensorSet minimum_sensor_sets(const Graph& g, const ContractionReport& contractions) {
  detail::require_connected(g);
  if (contractions.count() == 0) return SensorSet({0}, g.node_count());
  return SensorSet(contractions.matching.unmatched_plus, g.node_count());
}

inline SensorSet minimum_sensor_sets(const Graph& g) {
  return minimum_sensor_sets(g, detect_contractions(g));
}

/// Replacement sensors for a failed one, ascending. Candidates are the
/// failed node's contraction partners that are not already measured and for
/// which the repaired set validates. A failed node outside every contraction
/// only carried accessibility, so any unmeasured node that restores a valid
/// cover qualifies.
inline std::vector<Node> recovery_candidates(const Graph& g, const SensorSet& s, Node failed,
                                             const ContractionReport& contractions) {
  if (!s.contains(failed))
    throw PreconditionError("failed node " + g.label(failed) + " is not in the sensor set");
  detail::require_connected(g);

  const SensorSet remaining = s.without(failed);
  std::vector<Node> pool = equivalent_nodes(contractions, failed);
  const bool in_contraction = std::any_of(
      contractions.contractions.begin(), contractions.contractions.end(),
      [&](const Contraction& c) { return std::binary_search(c.nodes.begin(), c.nodes.end(), failed); });
  if (!in_contraction) {
    pool.clear();
    for (Node v = 0; v < g.node_count(); ++v)
      if (v != failed) pool.push_back(v);
  }

  std::vector<Node> out;
  for (Node v : pool) {
    if (remaining.contains(v)) continue;
    if (check_structural_observability(g, remaining.with(v)).observable) out.push_back(v);
  }
  return out;
}

inline std::vector<Node> recovery_candidates(const Graph& g, const SensorSet& s, Node failed) {
  return recovery_candidates(g, s, failed, detect_contractions(g));
}

// S-rank([A;Ci]) == S-rank([A;Cj]) == S-rank([A;Ci;Cj]) == S-rank(A) + 1.
inline bool srank_recovery_check(const Graph& g, Node i, Node j) {
  if (i == j) throw PreconditionError("srank recovery check needs two distinct nodes");
  if (i >= g.node_count() || j >= g.node_count()) throw PreconditionError("node out of range");
  const std::size_t base = structural_rank(g) + 1;
  const Node both[] = {i, j};
  return augmented_structural_rank(g, std::span<const Node>(both, 1)) == base &&
         augmented_structural_rank(g, std::span<const Node>(both + 1, 1)) == base &&
         augmented_structural_rank(g, both) == base;
}

}  // namespace netobs
