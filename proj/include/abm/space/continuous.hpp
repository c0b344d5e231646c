#pragma once

#include <Eigen/Core>

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

/// Real-valued D-dimensional box [0, extent), optionally toroidal, with a uniform
/// bucket index for neighbor search. Neighbor results are exact; `spacing` only
/// affects speed.
template <int D>
class ContinuousSpace {
  static_assert(D >= 1);

 public:
  using Position = Eigen::Matrix<double, D, 1>;

  /// `spacing` defaults to min(extent) / 20. Buckets are extent / floor(extent / spacing) wide,
  /// so every bucket along an axis has the same size (at least `spacing`).
  explicit ContinuousSpace(const Position& extent, bool periodic = true, std::optional<double> spacing = std::nullopt)
      : extent_(extent), periodic_(periodic) {
    if ((extent.array() <= 0).any()) throw ContractViolation("continuous extent must be positive");
    spacing_ = spacing.value_or(extent.minCoeff() / 20.0);
    if (!(spacing_ > 0)) throw ContractViolation("bucket spacing must be positive");
    std::size_t total = 1;
    for (int d = 0; d < D; ++d) {
      counts_[d] = std::max(1, static_cast<int>(std::floor(extent_[d] / spacing_)));
      bucket_size_[d] = extent_[d] / counts_[d];
      total *= static_cast<std::size_t>(counts_[d]);
    }
    buckets_.resize(total);
  }

  [[nodiscard]] const Position& extent() const noexcept { return extent_; }
  [[nodiscard]] bool periodic() const noexcept { return periodic_; }
  [[nodiscard]] double spacing() const noexcept { return spacing_; }

  [[nodiscard]] Position normalize(const Position& p) const {
    if (!p.allFinite()) throw ContractViolation("continuous position is not finite");
    if (!periodic_) {
      if ((p.array() < 0).any() || (p.array() >= extent_.array()).any())
        throw ContractViolation("position outside the continuous extent");
      return p;
    }
    Position q;
    for (int d = 0; d < D; ++d) {
      double x = std::fmod(p[d], extent_[d]);
      if (x < 0) x += extent_[d];
      if (x >= extent_[d]) x = 0;  // -tiny + extent rounds up to extent
      q[d] = x;
    }
    return q;
  }

  /// b - a, taking the shortest image on periodic axes.
  [[nodiscard]] Position displacement(const Position& a, const Position& b) const {
    Position v = b - a;
    if (periodic_) {
      for (int d = 0; d < D; ++d) {
        if (v[d] > extent_[d] / 2) v[d] -= extent_[d];
        else if (v[d] < -extent_[d] / 2) v[d] += extent_[d];
      }
    }
    return v;
  }

  /// Squared distance; per-axis separation is min(|dx|, extent - |dx|) when periodic.
  [[nodiscard]] double squared_distance(const Position& a, const Position& b) const {
    double sq = 0;
    for (int d = 0; d < D; ++d) {
      double dx = std::abs(a[d] - b[d]);
      if (periodic_) dx = std::min(dx, extent_[d] - dx);
      sq += dx * dx;
    }
    return sq;
  }

  void register_agent(AgentId id, const Position& p) {
    auto& bucket = buckets_[bucket_of(p)];
    auto it = std::lower_bound(bucket.begin(), bucket.end(), id, [](const Entry& e, AgentId v) { return e.id < v; });
    bucket.insert(it, Entry{id, p});
  }

  void unregister_agent(AgentId id, const Position& p) {
    auto& bucket = buckets_[bucket_of(p)];
    bucket.erase(find(bucket, id));
  }

  void update_position(AgentId id, const Position& from, const Position& to) {
    const auto a = bucket_of(from);
    const auto b = bucket_of(to);
    if (a == b) {
      find(buckets_[a], id)->pos = to;
      return;
    }
    unregister_agent(id, from);
    register_agent(id, to);
  }

  /// Ids whose position lies within euclidean distance r of p (boundary inclusive).
  [[nodiscard]] std::vector<AgentId> neighbor_ids(const Position& p, double r) const {
    if (r < 0) throw ContractViolation("neighbor radius must be non-negative");
    std::array<std::vector<detail::AxisStep>, static_cast<std::size_t>(D)> axes;
    const auto center = cell_coords(p);
    for (int d = 0; d < D; ++d) {
      // +1 covers cells that a boundary-straddling pair can reach under floating point rounding.
      const double cells = std::floor(r / bucket_size_[d]) + 1;
      const int radius = cells >= counts_[d] ? counts_[d] : static_cast<int>(cells);
      detail::axis_candidates(center[d], radius, counts_[d], periodic_, axes[d]);
    }
    const double r2 = r * r;
    std::vector<AgentId> out;
    detail::for_each_product(axes, [&](const auto& coords, const auto&) {
      for (const auto& e : buckets_[linear(coords)])
        if (squared_distance(p, e.pos) <= r2) out.push_back(e.id);
    });
    return out;
  }

  [[nodiscard]] Position random_position(Rng& rng) const {
    Position p;
    for (int d = 0; d < D; ++d) p[d] = rng.next_float() * extent_[d];
    return normalize(p);
  }

  [[nodiscard]] std::string describe() const {
    std::ostringstream os;
    os << "ContinuousSpace with extent (";
    for (int d = 0; d < D; ++d) os << (d ? ", " : "") << extent_[d];
    os << "), spacing=" << spacing_ << " and periodic=" << (periodic_ ? "true" : "false");
    return os.str();
  }

 private:
  struct Entry {
    AgentId id;
    Position pos;
  };
  using Bucket = std::vector<Entry>;

  static typename Bucket::iterator find(Bucket& bucket, AgentId id) {
    auto it = std::lower_bound(bucket.begin(), bucket.end(), id, [](const Entry& e, AgentId v) { return e.id < v; });
    if (it == bucket.end() || it->id != id) throw NotFound("agent not indexed in the expected bucket");
    return it;
  }

  [[nodiscard]] std::array<int, static_cast<std::size_t>(D)> cell_coords(const Position& p) const {
    std::array<int, static_cast<std::size_t>(D)> c;
    for (int d = 0; d < D; ++d) c[d] = std::clamp(static_cast<int>(std::floor(p[d] / bucket_size_[d])), 0, counts_[d] - 1);
    return c;
  }

  [[nodiscard]] std::size_t linear(const std::array<int, static_cast<std::size_t>(D)>& c) const {
    std::size_t idx = 0;
    for (int d = D; d-- > 0;) idx = idx * static_cast<std::size_t>(counts_[d]) + static_cast<std::size_t>(c[d]);
    return idx;
  }

  [[nodiscard]] std::size_t bucket_of(const Position& p) const { return linear(cell_coords(p)); }

  Position extent_;
  bool periodic_;
  double spacing_;
  std::array<int, static_cast<std::size_t>(D)> counts_{};
  std::array<double, static_cast<std::size_t>(D)> bucket_size_{};
  std::vector<Bucket> buckets_;
};

}  // namespace abm
