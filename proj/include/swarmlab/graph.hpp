#pragma once

#include <utility>
#include <vector>

namespace swarm {

struct DirectedGraph {
  int nodes = 0;
  std::vector<std::pair<int, int>> edges;  ///< (i, j) in row-major order
  bool strongly_connected = false;
};

/// Edge (i, j) whenever weights[i][j] > eps, including i == j.
/// Strong connectivity is decided by forward and reverse reachability from node 0.
DirectedGraph epsilon_graph(const std::vector<std::vector<double>>& weights, double eps);

}  // namespace swarm
