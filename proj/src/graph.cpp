#include "swarmlab/graph.hpp"

#include <deque>

#include "swarmlab/error.hpp"

namespace swarm {

namespace {

bool reaches_all(int n, const std::vector<std::vector<int>>& adjacency) {
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  std::deque<int> queue{0};
  seen[0] = 1;
  int visited = 1;
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop_front();
    for (int w : adjacency[u]) {
      if (!seen[w]) {
        seen[w] = 1;
        ++visited;
        queue.push_back(w);
      }
    }
  }
  return visited == n;
}

}  // namespace

DirectedGraph epsilon_graph(const std::vector<std::vector<double>>& weights, double eps) {
  if (!(eps >= 0.0)) throw DomainError("epsilon must be nonnegative");
  DirectedGraph g;
  g.nodes = static_cast<int>(weights.size());
  std::vector<std::vector<int>> forward(weights.size()), reverse(weights.size());
  for (int i = 0; i < g.nodes; ++i) {
    if (weights[i].size() != weights.size()) throw DimensionMismatch("weight matrix must be square");
    for (int j = 0; j < g.nodes; ++j) {
      if (weights[i][j] > eps) {
        g.edges.emplace_back(i, j);
        if (i != j) {
          forward[i].push_back(j);
          reverse[j].push_back(i);
        }
      }
    }
  }
  g.strongly_connected = g.nodes > 0 && reaches_all(g.nodes, forward) && reaches_all(g.nodes, reverse);
  return g;
}

}  // namespace swarm
