#include <algorithm>
#include <array>
#include <map>
#include <tuple>

#include "swarmlab/error.hpp"
#include "swarmlab/region.hpp"

namespace swarm {

namespace {

// Grid edge: horizontal (i,j)-(i+1,j) or vertical (i,j)-(i,j+1).
using EdgeKey = std::tuple<int, int, int>;  // (vertical?, i, j)

struct Crossings {
  std::map<EdgeKey, ContourPoint> point;
  std::map<EdgeKey, std::vector<EdgeKey>> links;

  void link(const EdgeKey& a, const EdgeKey& b) {
    links[a].push_back(b);
    links[b].push_back(a);
  }
};

}  // namespace

std::vector<Polyline> contour_extract(const RegionGrid& grid, double level) {
  if (!(level > 0.0 && level < 1.0)) throw DomainError("contour level must lie in (0, 1)");
  const int nx = static_cast<int>(grid.X0.size()), ny = static_cast<int>(grid.V0.size());
  if (grid.cells.size() != static_cast<std::size_t>(nx) * ny) throw DimensionMismatch("grid is not filled");
  auto p = [&](int i, int j) { return grid.probability(i, j); };
  auto inside = [&](int i, int j) { return p(i, j) >= level; };

  Crossings cx;
  auto crossing = [&](const EdgeKey& e) {
    if (cx.point.count(e)) return;
    const auto [vertical, i, j] = e;
    const int i2 = vertical ? i : i + 1, j2 = vertical ? j + 1 : j;
    const double a = p(i, j), b = p(i2, j2);
    const double t = (level - a) / (b - a);
    cx.point[e] = {grid.X0[i] + t * (grid.X0[i2] - grid.X0[i]), grid.V0[j] + t * (grid.V0[j2] - grid.V0[j])};
  };

  for (int i = 0; i + 1 < nx; ++i) {
    for (int j = 0; j + 1 < ny; ++j) {
      // corners counter-clockwise from (i,j); edge k joins corner k and k+1
      const std::array<std::pair<int, int>, 4> corner{{{i, j}, {i + 1, j}, {i + 1, j + 1}, {i, j + 1}}};
      const std::array<EdgeKey, 4> edge{{{0, i, j}, {1, i + 1, j}, {0, i, j + 1}, {1, i, j}}};
      std::array<bool, 4> in{};
      int count_in = 0;
      for (int k = 0; k < 4; ++k) count_in += in[k] = inside(corner[k].first, corner[k].second);
      if (count_in == 0 || count_in == 4) continue;

      std::vector<int> cut;
      for (int k = 0; k < 4; ++k)
        if (in[k] != in[(k + 1) % 4]) cut.push_back(k);
      for (int k : cut) crossing(edge[k]);

      if (cut.size() == 2) {
        cx.link(edge[cut[0]], edge[cut[1]]);
        continue;
      }
      // Saddle: the corners that disagree with the cell average get cut off.
      double mean = 0.0;
      for (const auto& [ci, cj] : corner) mean += p(ci, cj) / 4.0;
      const bool centre_in = mean >= level;
      for (int k = 0; k < 4; ++k) {
        if (in[k] != centre_in) cx.link(edge[(k + 3) % 4], edge[k]);
      }
    }
  }

  std::vector<Polyline> lines;
  std::map<EdgeKey, bool> used;
  auto walk = [&](EdgeKey start) {
    Polyline line{cx.point[start]};
    used[start] = true;
    EdgeKey current = start;
    for (;;) {
      const auto& next = cx.links[current];
      auto it = std::find_if(next.begin(), next.end(), [&](const EdgeKey& e) { return !used[e]; });
      if (it == next.end()) {
        // close loops explicitly
        if (next.size() == 2 && std::find(next.begin(), next.end(), start) != next.end() && line.size() > 2) {
          line.push_back(cx.point[start]);
        }
        break;
      }
      current = *it;
      used[current] = true;
      line.push_back(cx.point[current]);
    }
    lines.push_back(std::move(line));
  };
  // open chains first, starting at their ends, then closed loops
  for (const auto& [key, next] : cx.links)
    if (next.size() == 1 && !used[key]) walk(key);
  for (const auto& [key, next] : cx.links)
    if (!used[key]) walk(key);
  return lines;
}

double superlevel_area(const RegionGrid& grid, double level, int sub) {
  const std::size_t nx = grid.X0.size(), ny = grid.V0.size();
  if (nx < 2 || ny < 2) return 0.0;
  double area = 0.0;
  for (std::size_t i = 0; i + 1 < nx; ++i) {
    for (std::size_t j = 0; j + 1 < ny; ++j) {
      const double p00 = grid.probability(i, j), p10 = grid.probability(i + 1, j);
      const double p01 = grid.probability(i, j + 1), p11 = grid.probability(i + 1, j + 1);
      int hits = 0;
      for (int a = 0; a < sub; ++a) {
        const double s = (a + 0.5) / sub;
        for (int b = 0; b < sub; ++b) {
          const double t = (b + 0.5) / sub;
          const double value = (1 - s) * (1 - t) * p00 + s * (1 - t) * p10 + (1 - s) * t * p01 + s * t * p11;
          hits += value >= level;
        }
      }
      area += static_cast<double>(hits) / (sub * sub) * (grid.X0[i + 1] - grid.X0[i]) * (grid.V0[j + 1] - grid.V0[j]);
    }
  }
  return area;
}

}  // namespace swarm
