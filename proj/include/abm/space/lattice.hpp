#pragma once

#include <algorithm>
#include <array>
#include <cstdlib>
#include <vector>

namespace abm::detail {

/// One admissible coordinate along an axis and its distance to the query center
/// (minimum image on a periodic axis).
struct AxisStep {
  int coord;
  int dist;
};

/// Distinct coordinates within `radius` of `center` on an axis of `n` cells. On a periodic axis
/// shorter than the stencil every cell is listed once.
inline void axis_candidates(int center, int radius, int n, bool periodic, std::vector<AxisStep>& out) {
  out.clear();
  if (!periodic) {
    const int lo = std::max(0, center - radius);
    const int hi = std::min(n - 1, center + radius);
    for (int c = lo; c <= hi; ++c) out.push_back({c, std::abs(c - center)});
  } else if (2 * radius + 1 >= n) {
    for (int c = 0; c < n; ++c) {
      const int d = std::abs(c - center);
      out.push_back({c, std::min(d, n - d)});
    }
  } else {
    for (int o = -radius; o <= radius; ++o) {
      int c = (center + o) % n;
      if (c < 0) c += n;
      out.push_back({c, std::abs(o)});
    }
  }
}

/// Calls f(coords, dists) for every element of the Cartesian product of the axes.
template <std::size_t D, class F>
void for_each_product(const std::array<std::vector<AxisStep>, D>& axes, F&& f) {
  for (const auto& a : axes)
    if (a.empty()) return;
  std::array<std::size_t, D> idx{};
  std::array<int, D> coords;
  std::array<int, D> dists;
  while (true) {
    for (std::size_t d = 0; d < D; ++d) {
      coords[d] = axes[d][idx[d]].coord;
      dists[d] = axes[d][idx[d]].dist;
    }
    f(coords, dists);
    std::size_t d = 0;
    while (d < D && ++idx[d] == axes[d].size()) idx[d++] = 0;
    if (d == D) return;
  }
}

}  // namespace abm::detail
