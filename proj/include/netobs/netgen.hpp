#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "netobs/error.hpp"
#include "netobs/graph.hpp"

namespace netobs {

enum class Model { SF, CSF, WS };

inline std::string to_string(Model model) {
  switch (model) {
    case Model::SF: return "sf";
    case Model::CSF: return "csf";
    case Model::WS: return "ws";
  }
  return "?";
}

inline Model parse_model(const std::string& name) {
  if (name == "sf") return Model::SF;
  if (name == "csf") return Model::CSF;
  if (name == "ws") return Model::WS;
  throw ConfigError("unknown model '" + name + "' (expected sf, csf or ws)");
}

/// Generator parameters. seed_size 0 selects the default ring of
/// max(m + 1, 5) nodes, where m is the per-node link count of the model.
struct NetgenConfig {
  Model model = Model::SF;
  std::size_t n = 100;
  std::size_t m = 2;          // SF links per new node
  std::size_t seed_size = 0;  // SF/CSF initial ring
  std::size_t m_r = 1;        // CSF preferential links
  std::size_t m_s = 1;        // CSF triad links
  std::size_t k = 3;          // WS neighbors per side
  double p = 0.0;             // WS rewiring probability
  std::uint64_t rng_seed = 1;

  std::size_t links_per_node() const { return model == Model::CSF ? m_r + m_s : m; }

  std::size_t effective_seed_size() const {
    return seed_size ? seed_size : std::max<std::size_t>(links_per_node() + 1, 5);
  }

  void validate() const {
    switch (model) {
      case Model::SF:
      case Model::CSF: {
        if (model == Model::SF && m < 1) throw ConfigError("sf needs m >= 1");
        if (model == Model::CSF && m_r < 1) throw ConfigError("csf needs m_r >= 1");
        const std::size_t n0 = effective_seed_size();
        if (n0 <= links_per_node())
          throw ConfigError("seed size " + std::to_string(n0) + " must exceed links per node " +
                            std::to_string(links_per_node()));
        if (n0 < 3) throw ConfigError("seed ring needs at least 3 nodes");
        if (n < n0) throw ConfigError("n must be at least the seed size");
        break;
      }
      case Model::WS:
        if (k < 1) throw ConfigError("ws needs k >= 1");
        if (n <= 2 * k) throw ConfigError("ws needs n > 2k");
        if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("ws rewiring probability must be in [0, 1]");
        break;
    }
  }

  std::string describe() const {
    std::ostringstream out;
    out << "model=" << to_string(model) << " n=" << n;
    switch (model) {
      case Model::SF: out << " m=" << m << " seed_size=" << effective_seed_size(); break;
      case Model::CSF:
        out << " m_r=" << m_r << " m_s=" << m_s << " seed_size=" << effective_seed_size();
        break;
      case Model::WS: out << " k=" << k << " p=" << p; break;
    }
    out << " seed=" << rng_seed;
    return out.str();
  }
};

namespace detail {

// Growing graph used by the preferential-attachment models.
class GrowthState {
 public:
  explicit GrowthState(std::size_t n) : adjacency_(n), mark_(n, 0) {}

  void connect(Node a, Node b) {
    adjacency_[a].push_back(b);
    adjacency_[b].push_back(a);
    endpoints_.push_back(a);
    endpoints_.push_back(b);
    edges_.push_back({std::min(a, b), std::max(a, b)});
  }

  const std::vector<Node>& neighbors(Node v) const { return adjacency_[v]; }
  bool linked(Node a, Node b) const {
    const auto& nb = adjacency_[a];
    return std::find(nb.begin(), nb.end(), b) != nb.end();
  }

  // Node drawn with probability proportional to its current degree.
  template <typename Rng>
  Node preferential(Rng& rng) const {
    std::uniform_int_distribution<std::size_t> pick(0, endpoints_.size() - 1);
    return endpoints_[pick(rng)];
  }

  // count distinct targets for `fresh`, none already linked to it
  template <typename Rng>
  std::vector<Node> preferential_targets(Rng& rng, Node fresh, std::size_t count) const {
    std::vector<Node> out;
    while (out.size() < count) {
      Node t = preferential(rng);
      if (t == fresh || linked(fresh, t)) continue;
      if (std::find(out.begin(), out.end(), t) != out.end()) continue;
      out.push_back(t);
    }
    return out;
  }

  std::vector<Edge> take_edges() { return std::move(edges_); }

  std::vector<std::size_t>& marks() { return mark_; }

 private:
  std::vector<std::vector<Node>> adjacency_;
  std::vector<Node> endpoints_;
  std::vector<Edge> edges_;
  std::vector<std::size_t> mark_;
};

inline void seed_ring(GrowthState& state, std::size_t n0) {
  for (Node i = 0; i < n0; ++i) state.connect(i, (i + 1) % n0);
}

}  // namespace detail

/// Barabasi-Albert growth: ring seed of n0 nodes, then each new node links to
/// m distinct existing nodes drawn proportionally to degree (repeated draws,
/// duplicates discarded). Edge count n0 + (n - n0) m.
inline Graph generate_sf(const NetgenConfig& cfg) {
  if (cfg.model != Model::SF) throw ConfigError("generate_sf called with a non-sf config");
  cfg.validate();
  const std::size_t n0 = cfg.effective_seed_size();
  std::mt19937_64 rng(cfg.rng_seed);
  detail::GrowthState state(cfg.n);
  detail::seed_ring(state, n0);
  for (Node v = n0; v < cfg.n; ++v)
    for (Node t : state.preferential_targets(rng, v, cfg.m)) state.connect(v, t);
  return Graph(cfg.n, state.take_edges());
}

/// Clustered scale-free growth (triad formation). Each new node makes m_r
/// preferential links, then m_s links to uniformly chosen neighbors of those
/// targets that it is not yet linked to, falling back to a preferential
/// link when no such neighbor exists. Same edge count as SF with
/// m = m_r + m_s.
inline Graph generate_csf(const NetgenConfig& cfg) {
  if (cfg.model != Model::CSF) throw ConfigError("generate_csf called with a non-csf config");
  cfg.validate();
  const std::size_t n0 = cfg.effective_seed_size();
  std::mt19937_64 rng(cfg.rng_seed);
  detail::GrowthState state(cfg.n);
  detail::seed_ring(state, n0);
  auto& mark = state.marks();
  std::size_t epoch = 0;
  std::vector<Node> pool;

  for (Node v = n0; v < cfg.n; ++v) {
    const auto anchors = state.preferential_targets(rng, v, cfg.m_r);
    for (Node t : anchors) state.connect(v, t);

    for (std::size_t step = 0; step < cfg.m_s; ++step) {
      ++epoch;
      pool.clear();
      mark[v] = epoch;
      for (Node w : state.neighbors(v)) mark[w] = epoch;
      for (Node t : anchors) {
        for (Node w : state.neighbors(t)) {
          if (mark[w] == epoch) continue;
          mark[w] = epoch;
          pool.push_back(w);
        }
      }
      Node target;
      if (pool.empty()) {
        target = state.preferential_targets(rng, v, 1).front();
      } else {
        std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
        target = pool[pick(rng)];
      }
      state.connect(v, target);
    }
  }
  return Graph(cfg.n, state.take_edges());
}

/// Watts-Strogatz: ring lattice where node i links to i+1..i+k, then each
/// lattice edge (i, i+j) is selected with probability p and its far end
/// rewired to a uniform node, avoiding self-loops and existing links. A
/// conflicting draw is retried up to n times before the edge is kept.
inline Graph generate_ws(const NetgenConfig& cfg) {
  if (cfg.model != Model::WS) throw ConfigError("generate_ws called with a non-ws config");
  cfg.validate();
  const std::size_t n = cfg.n;
  std::mt19937_64 rng(cfg.rng_seed);
  std::bernoulli_distribution select(cfg.p);
  std::uniform_int_distribution<Node> any(0, n - 1);

  std::vector<std::vector<Node>> adjacency(n);
  std::vector<Edge> lattice;
  lattice.reserve(n * cfg.k);
  for (Node i = 0; i < n; ++i) {
    for (std::size_t j = 1; j <= cfg.k; ++j) {
      const Node t = (i + j) % n;
      lattice.push_back({i, t});
      adjacency[i].push_back(t);
      adjacency[t].push_back(i);
    }
  }
  auto linked = [&](Node a, Node b) {
    return std::find(adjacency[a].begin(), adjacency[a].end(), b) != adjacency[a].end();
  };
  auto unlink = [&](Node a, Node b) {
    adjacency[a].erase(std::find(adjacency[a].begin(), adjacency[a].end(), b));
  };

  std::vector<Edge> edges;
  edges.reserve(lattice.size());
  for (auto [source, target] : lattice) {
    if (select(rng)) {
      for (std::size_t attempt = 0; attempt < n; ++attempt) {
        const Node w = any(rng);
        if (w == source || linked(source, w)) continue;
        unlink(source, target);
        unlink(target, source);
        adjacency[source].push_back(w);
        adjacency[w].push_back(source);
        target = w;
        break;
      }
    }
    edges.push_back({source, target});
  }
  return Graph(n, std::move(edges));
}

inline Graph generate(const NetgenConfig& cfg) {
  switch (cfg.model) {
    case Model::SF: return generate_sf(cfg);
    case Model::CSF: return generate_csf(cfg);
    case Model::WS: return generate_ws(cfg);
  }
  throw ConfigError("unknown model");
}

// Edge list with a '#' header carrying the full config.
inline void write_generated(std::ostream& out, const Graph& g, const NetgenConfig& cfg) {
  const std::string header[] = {
      "generated " + cfg.describe(),
      "nodes=" + std::to_string(g.node_count()) + " edges=" + std::to_string(g.edge_count())};
  write_edge_list(out, g, header);
}

}  // namespace netobs
