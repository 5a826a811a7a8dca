#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <span>
#include <vector>

#include "psums/errors.hpp"

namespace psums {

using word_t = std::uint64_t;
using u128 = unsigned __int128;

inline constexpr unsigned word_bits = 64;

// Mask of the `width` low bits; width may be 0 or word_bits.
constexpr word_t low_mask(unsigned width) noexcept {
  return width >= word_bits ? ~word_t{0} : (word_t{1} << width) - 1;
}

// Smallest c with 2^c >= x (0 for x <= 1).
constexpr unsigned ceil_log2(std::uint64_t x) noexcept {
  return x <= 1 ? 0u : static_cast<unsigned>(std::bit_width(x - 1));
}

constexpr std::uint64_t ceil_div(std::uint64_t a, std::uint64_t b) noexcept {
  return a / b + (a % b != 0);
}

// Raw bit-stream access over little-endian word buffers, field 0 at bit 0.
// A field may straddle two words; both calls touch at most two words.
inline word_t read_bits(std::span<const word_t> words, std::uint64_t pos,
                        unsigned width) noexcept {
  const std::uint64_t w = pos / word_bits;
  const unsigned off = static_cast<unsigned>(pos % word_bits);
  word_t v = words[w] >> off;
  if (off + width > word_bits) v |= words[w + 1] << (word_bits - off);
  return v & low_mask(width);
}

inline void write_bits(std::span<word_t> words, std::uint64_t pos,
                       unsigned width, word_t v) noexcept {
  const std::uint64_t w = pos / word_bits;
  const unsigned off = static_cast<unsigned>(pos % word_bits);
  const word_t mask = low_mask(width);
  words[w] = (words[w] & ~(mask << off)) | (v << off);
  if (off + width > word_bits) {
    const unsigned spill = word_bits - off;
    words[w + 1] = (words[w + 1] & ~(mask >> spill)) | (v >> spill);
  }
}

// Fixed-width unsigned integers packed back to back (fields may straddle
// word boundaries). Public accessors are 1-based and checked; the
// bracket/put pair is 0-based and unchecked.
class packed_int_array {
 public:
  packed_int_array() = default;
  packed_int_array(std::uint64_t count, unsigned width);

  // Adopts an existing payload; rejects wrong word counts and dirty padding.
  static packed_int_array from_words(std::uint64_t count, unsigned width,
                                     std::vector<word_t> words);

  std::uint64_t size() const noexcept { return count_; }
  unsigned width() const noexcept { return width_; }

  word_t get(std::uint64_t i) const;
  void set(std::uint64_t i, word_t v);

  word_t operator[](std::uint64_t pos) const noexcept {
    return read_bits(words_, pos * width_, width_);
  }
  void put(std::uint64_t pos, word_t v) noexcept {
    write_bits(words_, pos * width_, width_, v);
  }

  std::span<const word_t> words() const noexcept { return words_; }
  std::uint64_t payload_bits() const noexcept { return count_ * width_; }

  friend bool operator==(const packed_int_array&,
                         const packed_int_array&) = default;

 private:
  std::uint64_t count_ = 0;
  unsigned width_ = 1;
  std::vector<word_t> words_;
};

// Fixed-width integers where no field crosses a word: floor(w/width) fields
// per word, the rest of each word is zero padding.
class aligned_int_array {
 public:
  aligned_int_array() = default;
  aligned_int_array(std::uint64_t count, unsigned width);

  static aligned_int_array from_words(std::uint64_t count, unsigned width,
                                      std::vector<word_t> words);

  std::uint64_t size() const noexcept { return count_; }
  unsigned width() const noexcept { return width_; }
  unsigned per_word() const noexcept { return per_word_; }

  word_t operator[](std::uint64_t pos) const noexcept {
    return (words_[pos / per_word_] >> (pos % per_word_ * width_)) &
           low_mask(width_);
  }
  void put(std::uint64_t pos, word_t v) noexcept {
    word_t& w = words_[pos / per_word_];
    const unsigned off = static_cast<unsigned>(pos % per_word_ * width_);
    w = (w & ~(low_mask(width_) << off)) | (v << off);
  }

  word_t word(std::uint64_t w) const noexcept { return words_[w]; }
  word_t& word(std::uint64_t w) noexcept { return words_[w]; }

  std::span<const word_t> words() const noexcept { return words_; }
  std::uint64_t payload_bits() const noexcept {
    return words_.size() * word_bits;
  }

  friend bool operator==(const aligned_int_array&,
                         const aligned_int_array&) = default;

 private:
  std::uint64_t count_ = 0;
  unsigned width_ = 1;
  unsigned per_word_ = word_bits;
  std::vector<word_t> words_;
};

// One machine word viewed as `nfields` fields of `width` bits, field 1 in
// the least-significant position. Bits above nfields*width are not fields.
struct fielded_word {
  word_t word = 0;
  unsigned width = 8;
  unsigned nfields = word_bits / 8;

  static fielded_word of(word_t word, unsigned width) {
    return {word, width, word_bits / width};
  }
  static fielded_word of(word_t word, unsigned width, unsigned nfields);
};

word_t word_field_get(fielded_word x, unsigned q);

// Adds `addend` to each of fields start..nfields in O(1) word operations.
// Throws field_overflow if any of those fields would carry out.
fielded_word word_suffix_add(fielded_word x, unsigned start, word_t addend);

// Subtracts `subtrahend` from fields start..nfields; throws field_overflow
// on borrow.
fielded_word word_suffix_sub(fielded_word x, unsigned start,
                             word_t subtrahend);

// Sum of fields 1..r.
word_t word_prefix_sum(fielded_word x, unsigned r);

// Smallest r with word_prefix_sum(x, r) >= target, nfields + 1 if none.
unsigned word_search(fielded_word x, word_t target);

}  // namespace psums
