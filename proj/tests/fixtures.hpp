#pragma once

#include <string>
#include <vector>

#include "netobs/netobs.hpp"

namespace fixtures {

using netobs::Graph;
using netobs::Node;

inline Graph k3() { return Graph(3, {{0, 1}, {1, 2}, {0, 2}}); }

// center 0, leaves 1..3
inline Graph star() { return Graph(4, {{0, 1}, {0, 2}, {0, 3}}); }

inline Graph single_edge() { return Graph(2, {{0, 1}}); }

inline Graph path3() { return Graph(3, {{0, 1}, {1, 2}}); }

// nodes 0, 1, 2 each adjacent to both 3 and 4
inline Graph shared_pair() { return Graph(5, {{0, 3}, {0, 4}, {1, 3}, {1, 4}, {2, 3}, {2, 4}}); }

inline const char* kElevenState =
    "x1 x2\nx1 x4\nx3 x2\nx3 x4\nx5 x2\nx5 x4\n"
    "x6 x7\nx8 x7\n"
    "x9 x10\nx11 x10\n"
    "x2 x7\nx4 x10\n";

// contractions {x1,x3,x5}, {x6,x8}, {x9,x11}
inline Graph eleven_state() { return netobs::load_edge_list(std::string_view(kElevenState)).graph; }

inline Node node(const Graph& g, const std::string& label) { return *g.find_node(label); }

inline std::vector<Node> nodes(const Graph& g, const std::vector<std::string>& labels) {
  std::vector<Node> out;
  for (const auto& l : labels) out.push_back(node(g, l));
  return out;
}

inline netobs::SensorSet sensors(const Graph& g, const std::vector<std::string>& labels) {
  return netobs::SensorSet(nodes(g, labels), g.node_count());
}

}  // namespace fixtures
