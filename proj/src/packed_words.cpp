#include "psums/packed_words.hpp"

#include <algorithm>
#include <string>
#include <utility>

namespace psums {

namespace {

constexpr word_t shl(word_t x, unsigned s) noexcept {
  return s >= word_bits ? 0 : x << s;
}

// Precomputed per-width constants for the SWAR kernels.
//
// Prefix sums split the fields into m residue classes (q mod m); inside one
// class consecutive fields are m*width bits apart, which leaves room for a
// sum of up to nfields values. Multiplying a class by `spread` accumulates
// the whole class into its top slot of a 128-bit product.
struct swar_layout {
  unsigned nfields = 0;
  word_t ones = 0;  // lsb of every field
  unsigned classes = 1;
  unsigned slot_bits = 0;
  unsigned slots = 0;
  u128 spread = 0;
  std::array<word_t, word_bits> class_mask{};
};

constexpr swar_layout make_layout(unsigned f) {
  swar_layout l;
  l.nfields = word_bits / f;
  for (unsigned q = 0; q < l.nfields; ++q) l.ones |= word_t{1} << (q * f);
  const unsigned headroom = ceil_log2(l.nfields);
  l.classes = 1 + (headroom + f - 1) / f;
  l.slot_bits = l.classes * f;
  l.slots = (l.nfields + l.classes - 1) / l.classes;
  for (unsigned t = 0; t < l.slots; ++t) l.spread |= u128{1} << (t * l.slot_bits);
  for (unsigned q = 0; q < l.nfields; ++q)
    l.class_mask[q % l.classes] |= low_mask(f) << (q * f);
  return l;
}

constexpr auto layouts = [] {
  std::array<swar_layout, word_bits + 1> t{};
  for (unsigned f = 1; f <= word_bits; ++f) t[f] = make_layout(f);
  return t;
}();

void check_start(const fielded_word& x, unsigned start) {
  if (start < 1 || start > x.nfields)
    throw index_error("field " + std::to_string(start) + " outside 1.." +
                      std::to_string(x.nfields));
}

// Bits at the upper boundary of fields start..nfields that are still inside
// the word; a carry (or borrow) into any of them means a field overflowed.
word_t boundary_bits(const fielded_word& x, word_t suffix_lsbs) {
  return shl(suffix_lsbs, x.width);
}

word_t suffix_lsbs(const fielded_word& x, unsigned start) {
  return layouts[x.width].ones & low_mask(x.nfields * x.width) &
         ~low_mask((start - 1) * x.width);
}

bool tops_out(const fielded_word& x) {
  return x.nfields * x.width == word_bits;
}

}  // namespace

packed_int_array::packed_int_array(std::uint64_t count, unsigned width)
    : count_(count), width_(width) {
  if (width < 1 || width > word_bits)
    throw invalid_parameter("field width must be in 1.." +
                            std::to_string(word_bits) + ", got " +
                            std::to_string(width));
  words_.assign(ceil_div(count * width, word_bits), 0);
}

packed_int_array packed_int_array::from_words(std::uint64_t count,
                                              unsigned width,
                                              std::vector<word_t> words) {
  packed_int_array a(0, width);
  if (words.size() != ceil_div(count * width, word_bits))
    throw invalid_parameter("packed payload has " +
                            std::to_string(words.size()) + " words, expected " +
                            std::to_string(ceil_div(count * width, word_bits)));
  const unsigned used = static_cast<unsigned>(count * width % word_bits);
  if (used != 0 && (words.back() & ~low_mask(used)) != 0)
    throw invalid_parameter("packed payload has non-zero padding bits");
  a.count_ = count;
  a.words_ = std::move(words);
  return a;
}

word_t packed_int_array::get(std::uint64_t i) const {
  if (i < 1 || i > count_)
    throw index_error("index " + std::to_string(i) + " outside 1.." +
                      std::to_string(count_));
  return (*this)[i - 1];
}

void packed_int_array::set(std::uint64_t i, word_t v) {
  if (i < 1 || i > count_)
    throw index_error("index " + std::to_string(i) + " outside 1.." +
                      std::to_string(count_));
  if (v > low_mask(width_))
    throw value_range_error("value " + std::to_string(v) + " needs more than " +
                            std::to_string(width_) + " bits");
  put(i - 1, v);
}

aligned_int_array::aligned_int_array(std::uint64_t count, unsigned width)
    : count_(count), width_(width) {
  if (width < 1 || width > word_bits)
    throw invalid_parameter("field width must be in 1.." +
                            std::to_string(word_bits) + ", got " +
                            std::to_string(width));
  per_word_ = word_bits / width;
  words_.assign(ceil_div(count, per_word_), 0);
}

aligned_int_array aligned_int_array::from_words(std::uint64_t count,
                                                unsigned width,
                                                std::vector<word_t> words) {
  aligned_int_array a(0, width);
  if (words.size() != ceil_div(count, a.per_word_))
    throw invalid_parameter("aligned payload has " +
                            std::to_string(words.size()) + " words, expected " +
                            std::to_string(ceil_div(count, a.per_word_)));
  const word_t field_bits = low_mask(a.per_word_ * width);
  for (std::size_t w = 0; w < words.size(); ++w) {
    const std::uint64_t live =
        std::min<std::uint64_t>(a.per_word_, count - w * a.per_word_);
    if ((words[w] & ~(field_bits & low_mask(static_cast<unsigned>(live) * width))) != 0)
      throw invalid_parameter("aligned payload has non-zero padding bits");
  }
  a.count_ = count;
  a.words_ = std::move(words);
  return a;
}

fielded_word fielded_word::of(word_t word, unsigned width, unsigned nfields) {
  if (width < 1 || width > word_bits)
    throw invalid_parameter("field width must be in 1.." +
                            std::to_string(word_bits));
  if (nfields < 1 || nfields * width > word_bits)
    throw invalid_parameter(std::to_string(nfields) + " fields of " +
                            std::to_string(width) + " bits exceed a word");
  return {word, width, nfields};
}

word_t word_field_get(fielded_word x, unsigned q) {
  check_start(x, q);
  return (x.word >> ((q - 1) * x.width)) & low_mask(x.width);
}

fielded_word word_suffix_add(fielded_word x, unsigned start, word_t addend) {
  check_start(x, start);
  if (addend == 0) return x;
  if (addend > low_mask(x.width))
    throw field_overflow("addend " + std::to_string(addend) +
                         " exceeds the field width");
  const word_t lsbs = suffix_lsbs(x, start);
  const word_t a = x.word;
  const word_t b = addend * lsbs;
  const word_t s = a + b;
  const word_t carries = a ^ b ^ s;
  if ((carries & boundary_bits(x, lsbs)) != 0 || (tops_out(x) && s < a))
    throw field_overflow("suffix add carried out of a field");
  x.word = s;
  return x;
}

fielded_word word_suffix_sub(fielded_word x, unsigned start,
                             word_t subtrahend) {
  check_start(x, start);
  if (subtrahend == 0) return x;
  if (subtrahend > low_mask(x.width))
    throw field_overflow("subtrahend " + std::to_string(subtrahend) +
                         " exceeds the field width");
  const word_t lsbs = suffix_lsbs(x, start);
  const word_t a = x.word;
  const word_t b = subtrahend * lsbs;
  const word_t s = a - b;
  const word_t borrows = a ^ b ^ s;
  if ((borrows & boundary_bits(x, lsbs)) != 0 || (tops_out(x) && a < b))
    throw field_overflow("suffix subtract borrowed out of a field");
  x.word = s;
  return x;
}

word_t word_prefix_sum(fielded_word x, unsigned r) {
  if (r > x.nfields)
    throw index_error("prefix of " + std::to_string(r) + " fields exceeds " +
                      std::to_string(x.nfields));
  const word_t masked = x.word & low_mask(r * x.width);
  const swar_layout& l = layouts[x.width];
  if (l.classes == 1) return masked;
  word_t total = 0;
  const unsigned top = (l.slots - 1) * l.slot_bits;
  for (unsigned c = 0; c < l.classes; ++c) {
    const u128 product = u128{masked & l.class_mask[c]} * l.spread;
    total += static_cast<word_t>(product >> (top + c * x.width)) &
             low_mask(l.slot_bits);
  }
  return total;
}

unsigned word_search(fielded_word x, word_t target) {
  if (target < 1) throw invalid_parameter("search target must be >= 1");
  if (word_prefix_sum(x, x.nfields) < target) return x.nfields + 1;
  unsigned lo = 1, hi = x.nfields;
  while (lo < hi) {
    const unsigned mid = lo + (hi - lo) / 2;
    if (word_prefix_sum(x, mid) >= target)
      hi = mid;
    else
      lo = mid + 1;
  }
  return lo;
}

}  // namespace psums
