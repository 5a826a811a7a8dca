#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "psums/op_cost.hpp"

namespace psums {

// Binary Fenwick tree over full machine words; the baseline the succinct
// structures are compared against. Positions are 1-based.
class classic_fenwick {
 public:
  classic_fenwick() = default;

  // Takes ownership of `values` and rewrites them in place.
  classic_fenwick(std::vector<std::uint64_t> values, unsigned k);

  // Rewrites A into Fenwick layout: each entry i becomes the sum over the
  // interval of length lowbit(i) ending at i.
  static void build_inplace(std::span<std::uint64_t> a) noexcept;

  // Adopts an already transformed layout (deserialization).
  static classic_fenwick from_layout(std::vector<std::uint64_t> tree,
                                     unsigned k);

  std::uint64_t size() const noexcept { return tree_.size(); }
  unsigned value_bits() const noexcept { return k_; }

  std::uint64_t sum(std::uint64_t i) const;
  void update(std::uint64_t i, std::int64_t delta);
  std::uint64_t search(std::uint64_t target) const;
  std::uint64_t access(std::uint64_t i) const;

  space_report space() const;
  const op_cost& last_cost() const noexcept { return cost_; }
  std::span<const std::uint64_t> layout() const noexcept { return tree_; }

  // Overwrites one stored entry; for fault-injection tests only.
  void poke(std::uint64_t i, std::uint64_t v) { tree_.at(i - 1) = v; }

 private:
  std::uint64_t prefix(std::uint64_t i) const noexcept;

  std::vector<std::uint64_t> tree_;
  unsigned k_ = 1;
  mutable op_cost cost_;
};

}  // namespace psums
