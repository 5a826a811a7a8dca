#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "psums/op_cost.hpp"
#include "psums/packed_words.hpp"

namespace psums {

struct level_offset {
  unsigned level;        // 1 = top layer
  std::uint64_t offset;  // 1-based position inside the layer
  friend bool operator==(const level_offset&, const level_offset&) = default;
};

struct level_range {
  unsigned level;
  std::uint64_t first;  // inclusive, 1-based
  std::uint64_t last;   // inclusive
  friend bool operator==(const level_range&, const level_range&) = default;
};

// Shape of a b-ary layered tree over n values of k bits.
//
// There are depth()+1 layers, layer 1 on top. Layer j stores, for every
// block B of b consecutive units of span s = b^(depth+1-j), the running sums
// q = 1..b-1 at offset (b-1)*B + q; an entry exists only if its covered
// range [B*b*s + 1, (B*b + q)*s] ends at or before n.
class layered_geometry {
 public:
  layered_geometry() = default;
  layered_geometry(std::uint64_t n, unsigned k, std::uint64_t b);

  std::uint64_t n() const noexcept { return n_; }
  unsigned k() const noexcept { return k_; }
  std::uint64_t b() const noexcept { return b_; }
  unsigned depth() const noexcept { return depth_; }  // ceil(log_b n)
  unsigned levels() const noexcept { return depth_ + 1; }

  // Units covered by one step of an entry in layer j: b^(depth+1-j).
  std::uint64_t span(unsigned j) const noexcept { return pow_[depth_ + 1 - j]; }
  std::uint64_t layer_size(unsigned j) const noexcept { return sizes_[j - 1]; }
  unsigned entry_width(unsigned j) const noexcept { return widths_[j - 1]; }

  // Base-b digits of i, most significant first, depth+1 of them.
  std::vector<unsigned> digits(std::uint64_t i) const;
  std::vector<level_offset> sum_offsets(std::uint64_t i) const;
  std::vector<level_range> update_targets(std::uint64_t i) const;

  // Positions [first, last] of the input covered by an existing entry.
  std::pair<std::uint64_t, std::uint64_t> coverage(unsigned j,
                                                   std::uint64_t offset) const;

  // Exact layer payload, sum of size_j * width_j.
  std::uint64_t payload_bits() const noexcept;

 private:
  std::uint64_t n_ = 0;
  unsigned k_ = 0;
  std::uint64_t b_ = 2;
  unsigned depth_ = 0;
  std::vector<std::uint64_t> pow_;  // b^0 .. b^depth
  std::vector<std::uint64_t> sizes_;
  std::vector<unsigned> widths_;
};

// Computes every entry of every layer from the input, calling
// emit(level, offset, value) once per existing entry. `values` is folded in
// place into block totals on the way up and is empty afterwards.
template <class Emit>
void fold_layers(std::vector<std::uint64_t>& values,
                 const layered_geometry& geom, Emit&& emit) {
  const std::uint64_t b = geom.b();
  for (unsigned j = geom.levels(); j >= 1; --j) {
    const std::uint64_t len = values.size();
    for (std::uint64_t block = 0; block * b < len; ++block) {
      std::uint64_t running = 0;
      for (std::uint64_t q = 1; q < b && block * b + q <= len; ++q) {
        running += values[block * b + q - 1];
        emit(j, (b - 1) * block + q, running);
      }
    }
    const std::uint64_t full = len / b;
    for (std::uint64_t block = 0; block < full; ++block) {
      std::uint64_t total = 0;
      for (std::uint64_t q = 0; q < b; ++q) total += values[block * b + q];
      values[block] = total;
    }
    values.resize(full);
    if (j == 1) break;
  }
  values.clear();
  values.shrink_to_fit();
}

// b-ary layered Fenwick tree with every layer bit-packed at its own width,
// all layers concatenated in one buffer. The input array is not retained.
class layered_fenwick {
 public:
  layered_fenwick() = default;
  layered_fenwick(std::vector<std::uint64_t> values, unsigned k,
                  std::uint64_t b);

  static layered_fenwick from_words(const layered_geometry& geom,
                                    std::vector<word_t> words);

  const layered_geometry& geometry() const noexcept { return geom_; }
  std::uint64_t size() const noexcept { return geom_.n(); }
  unsigned value_bits() const noexcept { return geom_.k(); }

  std::uint64_t sum(std::uint64_t i) const;
  void update(std::uint64_t i, std::int64_t delta);
  std::uint64_t search(std::uint64_t target) const;
  std::uint64_t access(std::uint64_t i) const;

  // Adds delta to every entry covering i with no element range check; the
  // caller guarantees the covered values stay in range.
  void add(std::uint64_t i, std::int64_t delta);

  struct search_result {
    std::uint64_t index;   // smallest i with sum(i) >= target, or n+1
    std::uint64_t before;  // sum(index - 1)
  };
  search_result locate(std::uint64_t target) const;

  std::uint64_t entry(unsigned j, std::uint64_t offset) const;
  // Overwrites one stored entry; for fault-injection tests only.
  void poke(unsigned j, std::uint64_t offset, std::uint64_t v);

  space_report space() const;
  std::uint64_t metadata_bits() const noexcept;
  const op_cost& last_cost() const noexcept { return cost_; }
  std::span<const word_t> words() const noexcept { return words_; }

 private:
  void layout();
  std::uint64_t read(unsigned j, std::uint64_t offset) const noexcept {
    ++cost_.entry_reads;
    return read_bits(words_, bit_offset_[j - 1] + (offset - 1) * geom_.entry_width(j),
                     geom_.entry_width(j));
  }
  void write(unsigned j, std::uint64_t offset, std::uint64_t v) noexcept {
    ++cost_.entry_writes;
    write_bits(words_, bit_offset_[j - 1] + (offset - 1) * geom_.entry_width(j),
               geom_.entry_width(j), v);
  }
  std::uint64_t prefix(std::uint64_t i) const noexcept;
  void apply(std::uint64_t i, std::int64_t delta) noexcept;

  layered_geometry geom_;
  std::vector<std::uint64_t> bit_offset_;  // one per layer
  std::vector<word_t> words_;
  mutable op_cost cost_;
};

}  // namespace psums
