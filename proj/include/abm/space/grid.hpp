#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "abm/agent.hpp"
#include "abm/rng.hpp"
#include "abm/space/lattice.hpp"

namespace abm {

enum class Metric { chebyshev, euclidean };

inline const char* metric_name(Metric m) { return m == Metric::chebyshev ? "chebyshev" : "euclidean"; }

/// N-dimensional lattice of cells, each holding any number of agents.
/// Positions are 0-based coordinates; cell contents are kept sorted by id.
template <std::size_t D>
class GridSpace {
  static_assert(D >= 1);

 public:
  using Position = std::array<int, D>;

  explicit GridSpace(std::array<int, D> dims, bool periodic = false, Metric metric = Metric::chebyshev)
      : dims_(dims), periodic_(periodic), metric_(metric) {
    std::size_t n = 1;
    for (int d : dims_) {
      if (d < 1) throw ContractViolation("grid dimensions must be positive");
      n *= static_cast<std::size_t>(d);
    }
    cells_.resize(n);
  }

  [[nodiscard]] const std::array<int, D>& dims() const noexcept { return dims_; }
  [[nodiscard]] bool periodic() const noexcept { return periodic_; }
  [[nodiscard]] Metric metric() const noexcept { return metric_; }
  [[nodiscard]] std::size_t cell_count() const noexcept { return cells_.size(); }

  [[nodiscard]] bool contains(const Position& p) const noexcept {
    for (std::size_t d = 0; d < D; ++d)
      if (p[d] < 0 || p[d] >= dims_[d]) return false;
    return true;
  }

  [[nodiscard]] Position normalize(const Position& p) const {
    if (!periodic_) {
      if (!contains(p)) throw ContractViolation("position outside the grid");
      return p;
    }
    Position q;
    for (std::size_t d = 0; d < D; ++d) {
      q[d] = p[d] % dims_[d];
      if (q[d] < 0) q[d] += dims_[d];
    }
    return q;
  }

  [[nodiscard]] std::size_t linear(const Position& p) const noexcept {
    std::size_t idx = 0;
    for (std::size_t d = D; d-- > 0;) idx = idx * static_cast<std::size_t>(dims_[d]) + static_cast<std::size_t>(p[d]);
    return idx;
  }

  [[nodiscard]] Position from_linear(std::size_t idx) const noexcept {
    Position p;
    for (std::size_t d = 0; d < D; ++d) {
      p[d] = static_cast<int>(idx % static_cast<std::size_t>(dims_[d]));
      idx /= static_cast<std::size_t>(dims_[d]);
    }
    return p;
  }

  void register_agent(AgentId id, const Position& p) {
    auto& cell = cells_[linear(p)];
    if (cell.empty()) ++occupied_;
    cell.insert(std::lower_bound(cell.begin(), cell.end(), id), id);
  }

  void unregister_agent(AgentId id, const Position& p) {
    auto& cell = cells_[linear(p)];
    auto it = std::lower_bound(cell.begin(), cell.end(), id);
    if (it == cell.end() || *it != id) throw NotFound("agent not indexed at the given cell");
    cell.erase(it);
    if (cell.empty()) --occupied_;
  }

  void update_position(AgentId id, const Position& from, const Position& to) {
    if (from == to) return;
    unregister_agent(id, from);
    register_agent(id, to);
  }

  /// Ids in every cell within distance r of p, the cell of p included.
  [[nodiscard]] std::vector<AgentId> neighbor_ids(const Position& p, double r) const {
    std::vector<AgentId> out;
    visit_cells(p, r, true, [&](const Position& q) {
      const auto& cell = cells_[linear(q)];
      out.insert(out.end(), cell.begin(), cell.end());
    });
    return out;
  }

  /// Cells within distance r of p, p itself excluded.
  [[nodiscard]] std::vector<Position> neighbor_positions(const Position& p, double r) const {
    std::vector<Position> out;
    visit_cells(p, r, false, [&](const Position& q) { out.push_back(q); });
    return out;
  }

  [[nodiscard]] Position random_position(Rng& rng) const {
    Position p;
    for (std::size_t d = 0; d < D; ++d) p[d] = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(dims_[d])));
    return p;
  }

  [[nodiscard]] const std::vector<AgentId>& ids_in(const Position& p) const { return cells_[linear(p)]; }

  [[nodiscard]] bool is_empty(const Position& p) const { return cells_[linear(p)].empty(); }

  [[nodiscard]] std::size_t empty_count() const noexcept { return cells_.size() - occupied_; }

  /// Empty cells in linear-index order.
  [[nodiscard]] std::vector<Position> empty_positions() const {
    std::vector<Position> out;
    out.reserve(empty_count());
    for (std::size_t i = 0; i < cells_.size(); ++i)
      if (cells_[i].empty()) out.push_back(from_linear(i));
    return out;
  }

  /// The k-th empty cell in linear order with k = next_below(empty_count()).
  [[nodiscard]] std::optional<Position> random_empty(Rng& rng) const {
    const std::size_t n = empty_count();
    if (n == 0) return std::nullopt;
    auto k = rng.next_below(n);
    for (std::size_t i = 0; i < cells_.size(); ++i) {
      if (!cells_[i].empty()) continue;
      if (k-- == 0) return from_linear(i);
    }
    return std::nullopt;
  }

  [[nodiscard]] std::string describe() const {
    std::ostringstream os;
    os << "GridSpace with size (";
    for (std::size_t d = 0; d < D; ++d) os << (d ? ", " : "") << dims_[d];
    os << "), metric=" << metric_name(metric_) << " and periodic=" << (periodic_ ? "true" : "false");
    return os.str();
  }

 private:
  template <class F>
  void visit_cells(const Position& p, double r, bool include_origin, F&& f) const {
    if (r < 0) throw ContractViolation("neighbor radius must be non-negative");
    const int radius = static_cast<int>(std::floor(r));
    std::array<std::vector<detail::AxisStep>, D> axes;
    for (std::size_t d = 0; d < D; ++d) detail::axis_candidates(p[d], radius, dims_[d], periodic_, axes[d]);
    const double r2 = r * r;
    detail::for_each_product(axes, [&](const std::array<int, D>& coords, const std::array<int, D>& dists) {
      int maxd = 0;
      double sq = 0;
      for (std::size_t d = 0; d < D; ++d) {
        maxd = std::max(maxd, dists[d]);
        sq += static_cast<double>(dists[d]) * dists[d];
      }
      if (maxd == 0 && !include_origin) return;
      if (metric_ == Metric::chebyshev ? maxd > radius : sq > r2) return;
      f(coords);
    });
  }

  std::array<int, D> dims_;
  bool periodic_;
  Metric metric_;
  std::vector<std::vector<AgentId>> cells_;
  std::size_t occupied_ = 0;
};

}  // namespace abm
