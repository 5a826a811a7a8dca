#pragma once

#include <cstdint>
#include <string>

#include "psums/errors.hpp"
#include "psums/packed_words.hpp"

namespace psums::detail {

// Every structure keeps sums of n k-bit values in one word.
inline void check_value_width(std::uint64_t n, unsigned k) {
  if (n < 1) throw invalid_parameter("array must not be empty (n >= 1)");
  if (k < 1 || k > word_bits)
    throw invalid_parameter("value width k must be in 1..64, got " +
                            std::to_string(k));
  if (k + ceil_log2(n) > word_bits)
    throw invalid_parameter("k + ceil(log2 n) <= 64 violated (k=" +
                            std::to_string(k) + ", n=" + std::to_string(n) +
                            ")");
}

inline void check_fits(std::uint64_t v, unsigned k, std::uint64_t pos) {
  if (v > low_mask(k))
    throw value_range_error("A[" + std::to_string(pos) + "] = " +
                            std::to_string(v) + " does not fit in " +
                            std::to_string(k) + " bits");
}

inline void check_index(std::uint64_t i, std::uint64_t lo, std::uint64_t n) {
  if (i < lo || i > n)
    throw index_error("index " + std::to_string(i) + " outside " +
                      std::to_string(lo) + ".." + std::to_string(n));
}

inline void check_target(std::uint64_t target) {
  if (target < 1) throw invalid_parameter("search target must be >= 1");
}

// Returns old + delta, or throws if it leaves [0, 2^k).
inline std::uint64_t shifted_value(std::uint64_t old, std::int64_t delta,
                                   unsigned k, std::uint64_t pos) {
  const __int128 next = static_cast<__int128>(old) + delta;
  if (next < 0 || next > static_cast<__int128>(low_mask(k)))
    throw value_range_error("update would set A[" + std::to_string(pos) +
                            "] outside [0, 2^" + std::to_string(k) + ")");
  return static_cast<std::uint64_t>(next);
}

}  // namespace psums::detail
