#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "psums/layered_fenwick.hpp"
#include "psums/op_cost.hpp"
#include "psums/packed_words.hpp"

namespace psums {

// Parameters of the word-packed tree, derived from the word size w, the
// update magnitude bound |delta| < 2^delta_bits and the input shape.
struct packed_params {
  unsigned w = word_bits;
  unsigned delta_bits = 8;
  std::uint64_t b = 2;        // branching; b-1 counters per pending word
  unsigned field_bits = 64;   // width f of one pending counter
  unsigned cursor_bits = 0;   // flush cursor, stored above the counters
  std::uint64_t d = 1;        // base sample rate

  std::uint64_t counters() const noexcept { return b - 1; }
  word_t bias() const noexcept { return word_t{1} << (field_bits - 1); }

  // b-1 = max(1, floor(w / (2*(ceil(log2 w) + delta)))),
  // f = floor((w - ceil(log2(b-1))) / (b-1)),
  // d = max(1, round(w*log2(n) / (k*log2(w/delta)))) clamped to n.
  // Throws invalid_parameter naming the violated inequality.
  static packed_params derive(std::uint64_t n, unsigned k, unsigned delta_bits,
                              unsigned w = word_bits,
                              std::optional<std::uint64_t> d = std::nullopt);
};

// Word-packed layered tree. Every block of b-1 entries owns one pending
// word of bias-encoded counters; an update adds its delta to a suffix of
// the counters in one SWAR step and transfers one counter (round robin)
// into its stored entry. The input is sampled at rate d into a base array
// packed w/k values per word.
class packed_fenwick {
 public:
  packed_fenwick() = default;
  packed_fenwick(std::vector<std::uint64_t> values, unsigned k,
                 unsigned delta_bits,
                 std::optional<std::uint64_t> d = std::nullopt);

  struct parts {
    std::vector<std::vector<word_t>> layers;  // one per level, top first
    std::vector<word_t> pending;
    std::vector<word_t> base;
  };
  static packed_fenwick from_parts(std::uint64_t n, unsigned k,
                                   const packed_params& params, parts p);
  parts export_parts() const;

  std::uint64_t size() const noexcept { return n_; }
  unsigned value_bits() const noexcept { return k_; }
  const packed_params& params() const noexcept { return params_; }
  const layered_geometry& geometry() const noexcept { return geom_; }
  std::uint64_t groups() const noexcept { return geom_.n(); }

  std::uint64_t sum(std::uint64_t i) const;
  void update(std::uint64_t i, std::int64_t delta);
  std::uint64_t search(std::uint64_t target) const;
  std::uint64_t access(std::uint64_t i) const;

  // Stored entry plus its decoded pending counter.
  std::uint64_t true_entry(unsigned j, std::uint64_t offset) const;
  std::int64_t pending_counter(unsigned j, std::uint64_t offset) const;
  // Largest |counter| observed right after any suffix add so far.
  std::uint64_t max_pending_magnitude() const noexcept { return max_pending_; }
  bool all_pending_zero() const noexcept;

  space_report space() const;
  const op_cost& last_cost() const noexcept { return cost_; }

  bool is_sampled(std::uint64_t i) const noexcept {
    return i % params_.d == 0 || i == n_;
  }

 private:
  void allocate();
  std::uint64_t blocks(unsigned j) const noexcept {
    return ceil_div(geom_.layer_size(j), params_.counters());
  }
  fielded_word counters_of(word_t w) const noexcept {
    return {w, params_.field_bits, static_cast<unsigned>(params_.counters())};
  }
  unsigned cursor_of(word_t w) const noexcept {
    return params_.cursor_bits == 0
               ? 0u
               : static_cast<unsigned>(w >> (word_bits - params_.cursor_bits));
  }
  std::uint64_t read_true(unsigned j, std::uint64_t offset) const noexcept;
  std::uint64_t tree_prefix(std::uint64_t g) const noexcept;
  void tree_apply(std::uint64_t g, std::int64_t delta);
  std::uint64_t base_sum(std::uint64_t lo, std::uint64_t hi) const;
  std::uint64_t prefix(std::uint64_t i) const;
  std::uint64_t group_end(std::uint64_t g) const noexcept {
    return g * params_.d < n_ ? g * params_.d : n_;
  }
  std::uint64_t base_slot(std::uint64_t i) const noexcept {
    return (i - 1) - (i - 1) / params_.d;
  }

  std::uint64_t n_ = 0;
  unsigned k_ = 1;
  packed_params params_;
  layered_geometry geom_;
  std::vector<aligned_int_array> layers_;
  std::vector<std::uint64_t> pending_start_;  // first pending word per level
  std::vector<word_t> pending_;
  aligned_int_array base_;
  std::uint64_t max_pending_ = 0;
  mutable op_cost cost_;
};

}  // namespace psums
