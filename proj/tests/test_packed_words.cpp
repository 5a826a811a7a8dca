#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <vector>

#include "psums/errors.hpp"
#include "psums/packed_words.hpp"

using namespace psums;

namespace {

// Bit-by-bit reference store: one bool per bit, field 1 at bit 0.
struct bit_reference {
  std::vector<bool> bits;
  unsigned width;

  bit_reference(std::uint64_t count, unsigned width) : bits(count * width), width(width) {}
  void set(std::uint64_t i, std::uint64_t v) {
    for (unsigned t = 0; t < width; ++t) bits[(i - 1) * width + t] = (v >> t) & 1;
  }
  std::uint64_t get(std::uint64_t i) const {
    std::uint64_t v = 0;
    for (unsigned t = 0; t < width; ++t)
      if (bits[(i - 1) * width + t]) v |= std::uint64_t{1} << t;
    return v;
  }
};

std::vector<std::uint64_t> fields_of(fielded_word x) {
  std::vector<std::uint64_t> f;
  for (unsigned q = 0; q < x.nfields; ++q) f.push_back((x.word >> (q * x.width)) & low_mask(x.width));
  return f;
}

fielded_word make(const std::vector<std::uint64_t>& f, unsigned width) {
  word_t w = 0;
  for (unsigned q = 0; q < f.size(); ++q) w |= f[q] << (q * width);
  return fielded_word::of(w, width, static_cast<unsigned>(f.size()));
}

}  // namespace

TEST_CASE("new arrays are zero and exactly sized") {
  packed_int_array empty(0, 8);
  CHECK(empty.words().size() == 0);

  packed_int_array a(3, 7);
  CHECK(a.words().size() == 1);
  for (std::uint64_t i = 1; i <= 3; ++i) CHECK(a.get(i) == 0);

  packed_int_array b(100, 13);
  CHECK(b.words().size() == ceil_div(1300, 64));
  for (std::uint64_t i = 1; i <= 100; ++i) CHECK(b.get(i) == 0);

  CHECK_THROWS_AS(packed_int_array(4, 0), invalid_parameter);
  CHECK_THROWS_AS(packed_int_array(4, 65), invalid_parameter);
}

TEST_CASE("get and set") {
  packed_int_array a(20, 5);
  a.set(1, 0);
  CHECK(a.get(1) == 0);

  // Field 13 occupies bits 60..64 and so straddles the first word.
  a.set(13, 31);
  CHECK(a.get(13) == 31);
  bit_reference ref(20, 5);
  ref.set(13, 31);
  for (std::uint64_t i = 1; i <= 20; ++i) CHECK(a.get(i) == ref.get(i));

  CHECK_THROWS_AS(a.get(0), index_error);
  CHECK_THROWS_AS(a.get(21), index_error);
  CHECK_THROWS_AS(a.set(1, 32), value_range_error);
}

TEST_CASE("get/set fuzz against the bit reference") {
  std::mt19937_64 rng(7);
  for (unsigned width : {1u, 3u, 5u, 13u, 31u, 32u, 33u, 63u, 64u}) {
    const std::uint64_t count = 1 + rng() % 300;
    packed_int_array a(count, width);
    bit_reference ref(count, width);
    for (int round = 0; round < 100000 / 9; ++round) {
      const std::uint64_t i = 1 + rng() % count;
      const std::uint64_t v = rng() & low_mask(width);
      a.set(i, v);
      ref.set(i, v);
      const std::uint64_t j = 1 + rng() % count;
      REQUIRE(a.get(j) == ref.get(j));
    }
    for (std::uint64_t i = 1; i <= count; ++i) REQUIRE(a.get(i) == ref.get(i));
    // Padding past count*width stays zero.
    const std::uint64_t used = count * width;
    if (used % 64) CHECK((a.words().back() >> (used % 64)) == 0);
  }
}

TEST_CASE("from_words validates size and padding") {
  packed_int_array a(3, 7);
  a.set(2, 100);
  std::vector<word_t> w(a.words().begin(), a.words().end());
  CHECK(packed_int_array::from_words(3, 7, w) == a);
  CHECK_THROWS_AS(packed_int_array::from_words(3, 7, {}), invalid_parameter);
  w[0] |= word_t{1} << 40;
  CHECK_THROWS_AS(packed_int_array::from_words(3, 7, w), invalid_parameter);
}

TEST_CASE("aligned arrays keep fields inside one word") {
  aligned_int_array a(10, 21);
  CHECK(a.per_word() == 3);
  CHECK(a.words().size() == 4);
  for (std::uint64_t i = 0; i < 10; ++i) a.put(i, (i * 77777) & low_mask(21));
  for (std::uint64_t i = 0; i < 10; ++i) CHECK(a[i] == ((i * 77777) & low_mask(21)));
  CHECK(a.payload_bits() == 4 * 64);
}

TEST_CASE("word_field_get") {
  const fielded_word x = make({1, 2, 3, 4}, 8);
  CHECK(word_field_get(x, 3) == 3);
  CHECK(word_field_get(fielded_word::of(0, 8), 5) == 0);
  CHECK_THROWS_AS(word_field_get(x, 0), index_error);
  CHECK_THROWS_AS(word_field_get(x, 5), index_error);

  std::mt19937_64 rng(3);
  for (unsigned width : {4u, 8u, 13u, 16u, 21u, 32u}) {
    const fielded_word r = fielded_word::of(rng(), width);
    for (unsigned q = 1; q <= r.nfields; ++q)
      CHECK(word_field_get(r, q) == ((r.word >> ((q - 1) * width)) & low_mask(width)));
  }
}

TEST_CASE("word_suffix_add and word_suffix_sub") {
  const fielded_word x = make({1, 2, 3, 4}, 8);
  CHECK(fields_of(word_suffix_add(x, 3, 5)) == std::vector<std::uint64_t>{1, 2, 8, 9});
  CHECK(word_suffix_add(x, 1, 0).word == x.word);
  CHECK(fields_of(word_suffix_sub(x, 2, 2)) == std::vector<std::uint64_t>{1, 0, 1, 2});

  CHECK_THROWS_AS(word_suffix_add(make({1, 255}, 8), 1, 1), field_overflow);
  CHECK_THROWS_AS(word_suffix_sub(make({1, 0}, 8), 2, 1), field_overflow);
  // The top field of a full word carries out of the word itself.
  CHECK_THROWS_AS(word_suffix_add(fielded_word::of(~word_t{0}, 16), 4, 1), field_overflow);
}

TEST_CASE("word_prefix_sum and word_search") {
  const fielded_word x = make({1, 2, 3, 4}, 8);
  CHECK(word_prefix_sum(x, 2) == 3);
  CHECK(word_prefix_sum(x, 0) == 0);
  CHECK(word_prefix_sum(x, 4) == 10);
  CHECK(word_search(x, 3) == 2);
  CHECK(word_search(x, 11) == 5);
  CHECK(word_search(make({0, 0, 7}, 8), 1) == 3);
  CHECK_THROWS_AS(word_search(x, 0), invalid_parameter);

  // Full-width fields: the sum needs more than 64 bits of scratch.
  const fielded_word big = fielded_word::of(~word_t{0}, 1);
  CHECK(word_prefix_sum(big, 64) == 64);
  CHECK(word_prefix_sum(fielded_word::of(~word_t{0}, 32), 2) == 2 * low_mask(32));
}

TEST_CASE("kernels on every field width") {
  std::mt19937_64 rng(11);
  for (unsigned width = 1; width <= 64; ++width) {
    for (int round = 0; round < 200; ++round) {
      const unsigned nfields = 1 + static_cast<unsigned>(rng() % (64 / width));
      const word_t mask = nfields * width == 64 ? ~word_t{0} : low_mask(nfields * width);
      const fielded_word x = fielded_word::of(rng() & mask, width, nfields);
      const auto f = fields_of(x);
      std::uint64_t s = 0;
      for (unsigned r = 0; r <= nfields; ++r) {
        REQUIRE(word_prefix_sum(x, r) == s);
        if (r < nfields) s += f[r];
      }
    }
  }
}
