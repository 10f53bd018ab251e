#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <ostream>
#include <vector>

#include "json.hpp"
#include "netobs/detail/parallel.hpp"
#include "netobs/error.hpp"
#include "netobs/graph.hpp"
#include "netobs/matching.hpp"

namespace netobs {

struct Contraction {
  Node generator = 0;       // unmatched node the set was grown from
  std::vector<Node> nodes;  // ascending, contains generator

  friend bool operator==(const Contraction&, const Contraction&) = default;
};

/// Contraction sets of a system graph relative to its canonical maximum
/// matching. Sets may overlap; the union does not depend on the matching.
struct ContractionReport {
  std::size_t node_count = 0;
  std::size_t structural_rank = 0;
  std::vector<Contraction> contractions;  // one per unmatched node, ascending generator
  std::vector<Node> union_nodes;          // ascending
  std::map<std::size_t, std::size_t> size_histogram;
  MatchingResult matching;

  std::size_t count() const noexcept { return contractions.size(); }

  // (sum of sizes) / count, 0 for a graph without contractions.
  double mean_size() const {
    if (contractions.empty()) return 0.0;
    std::size_t total = 0;
    for (const auto& c : contractions) total += c.nodes.size();
    return static_cast<double>(total) / static_cast<double>(contractions.size());
  }

  friend bool operator==(const ContractionReport&, const ContractionReport&) = default;
};

namespace detail {

inline std::vector<Node> union_of(const std::vector<Contraction>& sets, std::size_t n) {
  std::vector<bool> member(n, false);
  for (const auto& c : sets)
    for (Node v : c.nodes) member[v] = true;
  std::vector<Node> out;
  for (Node v = 0; v < n; ++v)
    if (member[v]) out.push_back(v);
  return out;
}

inline std::vector<Contraction> contractions_for(const AuxiliaryGraph& aux,
                                                 const MatchingResult& m) {
  std::vector<Contraction> sets(m.unmatched_plus.size());
  const std::size_t count = sets.size();
  // chunked so each worker reuses one scratch buffer
  const std::size_t chunks = std::min<std::size_t>(count, 64);
  parallel_for(chunks, [&](std::size_t chunk) {
    ReachScratch scratch(aux.plus_count());
    for (std::size_t i = chunk; i < count; i += chunks) {
      const Node start = m.unmatched_plus[i];
      sets[i] = Contraction{start, scratch.run(aux, start)};
    }
  });
  return sets;
}

}  // namespace detail

/// Contraction detection: canonical maximum matching, auxiliary graph, then
/// one alternating-reach search per unmatched node.
/// Cost O(sqrt(n)|E| + m|E|) for m unmatched nodes.
inline ContractionReport detect_contractions(const Graph& g) {
  const BipartiteGraph b = to_bipartite(g);
  ContractionReport report;
  report.node_count = g.node_count();
  report.matching = maximum_matching(b);
  report.structural_rank = report.matching.size;

  const AuxiliaryGraph aux(b, report.matching);
  report.contractions = detail::contractions_for(aux, report.matching);
  report.union_nodes = detail::union_of(report.contractions, g.node_count());
  for (const auto& c : report.contractions) ++report.size_histogram[c.nodes.size()];
  return report;
}

// Union of alternating reaches for an arbitrary maximum matching of b.
inline std::vector<Node> unmatched_reach_union(const BipartiteGraph& b, const MatchingResult& m) {
  const AuxiliaryGraph aux(b, m);
  return detail::union_of(detail::contractions_for(aux, m), b.plus_count());
}

inline std::vector<Node> unmatched_reach_union(const Graph& g) {
  return detect_contractions(g).union_nodes;
}

// Nodes sharing at least one contraction with i, excluding i itself.
inline std::vector<Node> equivalent_nodes(const ContractionReport& report, Node i) {
  if (i >= report.node_count) throw PreconditionError("node out of range");
  std::vector<Node> out;
  for (const auto& c : report.contractions) {
    if (!std::binary_search(c.nodes.begin(), c.nodes.end(), i)) continue;
    for (Node v : c.nodes)
      if (v != i) out.push_back(v);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

inline std::vector<Node> equivalent_nodes(const Graph& g, Node i) {
  return equivalent_nodes(detect_contractions(g), i);
}

// {n, m, structural_rank, contractions, union, histogram}; ids are indices.
inline nlohmann::json to_json(const ContractionReport& r) {
  nlohmann::json j;
  j["n"] = r.node_count;
  j["m"] = r.count();
  j["structural_rank"] = r.structural_rank;
  auto sets = nlohmann::json::array();
  for (const auto& c : r.contractions) sets.push_back(c.nodes);
  j["contractions"] = std::move(sets);
  j["union"] = r.union_nodes;
  auto hist = nlohmann::json::object();
  for (auto [size, count] : r.size_histogram) hist[std::to_string(size)] = count;
  j["histogram"] = std::move(hist);
  return j;
}

inline void write_histogram_csv(std::ostream& out, const std::map<std::size_t, std::size_t>& h) {
  out << "size,count\n";
  for (auto [size, count] : h) out << size << ',' << count << '\n';
}

}  // namespace netobs
