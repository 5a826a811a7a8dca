#pragma once

#include <cstdint>
#include <vector>

#include "psums/layered_fenwick.hpp"
#include "psums/op_cost.hpp"
#include "psums/packed_words.hpp"

namespace psums {

// Sample rate d = round(log_b(n) / epsilon), clamped to [1, n].
std::uint64_t sample_rate_for(std::uint64_t n, std::uint64_t b, double epsilon);

// Sampled layered tree: the input is cut into groups of d consecutive
// values; the last value of every group lives only in the group total
// kept by a layered tree over the totals, all other values stay in a
// k-bit packed base array.
class sampled_fenwick {
 public:
  sampled_fenwick() = default;
  sampled_fenwick(std::vector<std::uint64_t> values, unsigned k,
                  std::uint64_t b, std::uint64_t d);

  static sampled_fenwick with_epsilon(std::vector<std::uint64_t> values,
                                      unsigned k, std::uint64_t b,
                                      double epsilon);

  static sampled_fenwick from_parts(std::uint64_t n, unsigned k,
                                    std::uint64_t d, packed_int_array base,
                                    layered_fenwick tree);

  std::uint64_t size() const noexcept { return n_; }
  unsigned value_bits() const noexcept { return k_; }
  std::uint64_t sample_rate() const noexcept { return d_; }
  std::uint64_t groups() const noexcept { return tree_.size(); }
  const packed_int_array& base() const noexcept { return base_; }
  const layered_fenwick& tree() const noexcept { return tree_; }

  std::uint64_t sum(std::uint64_t i) const;
  void update(std::uint64_t i, std::int64_t delta);
  std::uint64_t search(std::uint64_t target) const;
  std::uint64_t access(std::uint64_t i) const;

  space_report space() const;
  const op_cost& last_cost() const noexcept { return cost_; }

  // Positions delegated to the tree: multiples of d, and n itself.
  bool is_sampled(std::uint64_t i) const noexcept {
    return i % d_ == 0 || i == n_;
  }
  // 0-based base slot of a kept position.
  std::uint64_t base_slot(std::uint64_t i) const noexcept {
    return (i - 1) - (i - 1) / d_;
  }

 private:
  std::uint64_t group_end(std::uint64_t g) const noexcept {
    return g * d_ < n_ ? g * d_ : n_;
  }
  std::uint64_t prefix(std::uint64_t i) const;
  void absorb_tree_cost() const noexcept;

  std::uint64_t n_ = 0;
  unsigned k_ = 1;
  std::uint64_t d_ = 1;
  packed_int_array base_;
  layered_fenwick tree_;
  mutable op_cost cost_;
};

}  // namespace psums
