#include "psums/layered_fenwick.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "psums/detail/checks.hpp"

namespace psums {

layered_geometry::layered_geometry(std::uint64_t n, unsigned k,
                                   std::uint64_t b)
    : n_(n), k_(k), b_(b) {
  detail::check_value_width(n, k);
  if (b < 2)
    throw invalid_parameter("branching factor b >= 2 violated (b=" +
                            std::to_string(b) + ")");
  pow_ = {1};
  while (pow_.back() < n) {
    const u128 next = u128{pow_.back()} * b;
    if (next > std::numeric_limits<std::uint64_t>::max())
      throw invalid_parameter("b^ceil(log_b n) does not fit in 64 bits");
    pow_.push_back(static_cast<std::uint64_t>(next));
  }
  depth_ = static_cast<unsigned>(pow_.size() - 1);

  for (unsigned j = 1; j <= levels(); ++j) {
    const std::uint64_t s = span(j);
    const u128 block = u128{s} * b;
    sizes_.push_back(n / s - static_cast<std::uint64_t>(u128{n} / block));
    // No entry covers more than min((b-1)*s, n) values.
    const u128 widest = std::min<u128>(u128{s} * (b - 1), n);
    widths_.push_back(k + ceil_log2(static_cast<std::uint64_t>(widest)));
  }
}

std::vector<unsigned> layered_geometry::digits(std::uint64_t i) const {
  std::vector<unsigned> x(levels());
  for (unsigned j = levels(); j >= 1; --j) {
    x[j - 1] = static_cast<unsigned>(j == 1 ? i : i % b_);
    i /= b_;
    if (j == 1) break;
  }
  if (x[0] >= b_)
    throw index_error("index does not have " + std::to_string(levels()) +
                      " base-" + std::to_string(b_) + " digits");
  return x;
}

std::vector<level_offset> layered_geometry::sum_offsets(std::uint64_t i) const {
  detail::check_index(i, 1, n_);
  std::vector<level_offset> out;
  std::uint64_t head = i;
  for (unsigned j = levels(); j >= 1; --j) {
    const std::uint64_t x = head % b_;
    head /= b_;
    if (x != 0) out.push_back({j, (b_ - 1) * head + x});
  }
  std::reverse(out.begin(), out.end());
  return out;
}

std::vector<level_range> layered_geometry::update_targets(std::uint64_t i) const {
  detail::check_index(i, 1, n_);
  std::vector<level_range> out;
  std::uint64_t head = i - 1;
  for (unsigned j = levels(); j >= 1; --j) {
    const std::uint64_t y = head % b_;
    head /= b_;
    if (y + 1 >= b_) continue;
    const std::uint64_t first = (b_ - 1) * head + y + 1;
    const std::uint64_t last = std::min((b_ - 1) * (head + 1), layer_size(j));
    if (first <= last) out.push_back({j, first, last});
  }
  std::reverse(out.begin(), out.end());
  return out;
}

std::pair<std::uint64_t, std::uint64_t> layered_geometry::coverage(
    unsigned j, std::uint64_t offset) const {
  if (j < 1 || j > levels()) throw index_error("level out of range");
  detail::check_index(offset, 1, layer_size(j));
  const std::uint64_t block = (offset - 1) / (b_ - 1);
  const std::uint64_t q = (offset - 1) % (b_ - 1) + 1;
  const std::uint64_t s = span(j);
  return {block * b_ * s + 1, (block * b_ + q) * s};
}

std::uint64_t layered_geometry::payload_bits() const noexcept {
  std::uint64_t bits = 0;
  for (unsigned j = 1; j <= levels(); ++j) bits += layer_size(j) * entry_width(j);
  return bits;
}

void layered_fenwick::layout() {
  bit_offset_.clear();
  std::uint64_t pos = 0;
  for (unsigned j = 1; j <= geom_.levels(); ++j) {
    bit_offset_.push_back(pos);
    pos += geom_.layer_size(j) * geom_.entry_width(j);
  }
  words_.assign(ceil_div(pos, word_bits), 0);
}

layered_fenwick::layered_fenwick(std::vector<std::uint64_t> values, unsigned k,
                                 std::uint64_t b)
    : geom_(values.size(), k, b) {
  for (std::uint64_t i = 0; i < values.size(); ++i)
    detail::check_fits(values[i], k, i + 1);
  layout();

  fold_layers(values, geom_, [this](unsigned j, std::uint64_t o, std::uint64_t v) {
    write(j, o, v);
  });
  cost_ = {};
}

layered_fenwick layered_fenwick::from_words(const layered_geometry& geom,
                                            std::vector<word_t> words) {
  layered_fenwick f;
  f.geom_ = geom;
  f.layout();
  const std::uint64_t payload = geom.payload_bits();
  if (words.size() != f.words_.size())
    throw invalid_parameter("layer buffer has " + std::to_string(words.size()) +
                            " words, expected " +
                            std::to_string(f.words_.size()));
  const unsigned used = static_cast<unsigned>(payload % word_bits);
  if (used != 0 && (words.back() & ~low_mask(used)) != 0)
    throw invalid_parameter("layer buffer has non-zero padding bits");
  f.words_ = std::move(words);
  return f;
}

std::uint64_t layered_fenwick::prefix(std::uint64_t i) const noexcept {
  const std::uint64_t b = geom_.b();
  std::uint64_t total = 0;
  for (unsigned j = geom_.levels(); i != 0; --j) {
    const std::uint64_t x = i % b;
    i /= b;
    if (x != 0) total += read(j, (b - 1) * i + x);
  }
  return total;
}

void layered_fenwick::apply(std::uint64_t i, std::int64_t delta) noexcept {
  const std::uint64_t b = geom_.b();
  std::uint64_t head = i - 1;
  for (unsigned j = geom_.levels(); j >= 1; --j) {
    const std::uint64_t y = head % b;
    head /= b;
    if (y + 1 < b) {
      const std::uint64_t last = std::min((b - 1) * (head + 1), geom_.layer_size(j));
      for (std::uint64_t o = (b - 1) * head + y + 1; o <= last; ++o)
        write(j, o, (read(j, o) + static_cast<std::uint64_t>(delta)) &
                        low_mask(geom_.entry_width(j)));
    }
    if (j == 1) break;
  }
}

std::uint64_t layered_fenwick::sum(std::uint64_t i) const {
  cost_ = {};
  detail::check_index(i, 0, size());
  return prefix(i);
}

std::uint64_t layered_fenwick::access(std::uint64_t i) const {
  cost_ = {};
  detail::check_index(i, 1, size());
  return prefix(i) - prefix(i - 1);
}

void layered_fenwick::update(std::uint64_t i, std::int64_t delta) {
  detail::check_index(i, 1, size());
  detail::shifted_value(access(i), delta, geom_.k(), i);
  cost_ = {};
  apply(i, delta);
}

void layered_fenwick::add(std::uint64_t i, std::int64_t delta) {
  cost_ = {};
  detail::check_index(i, 1, size());
  apply(i, delta);
}

layered_fenwick::search_result layered_fenwick::locate(
    std::uint64_t target) const {
  cost_ = {};
  detail::check_target(target);
  const std::uint64_t b = geom_.b();
  std::uint64_t head = 0;
  std::uint64_t acc = 0;
  for (unsigned j = 1; j <= geom_.levels(); ++j) {
    const std::uint64_t size = geom_.layer_size(j);
    const std::uint64_t base = (b - 1) * head;
    // Largest q in [0, b-1] with acc + P_q < target; missing entries act
    // as +infinity and P_0 = 0.
    std::uint64_t lo = 0, hi = b - 1, lo_value = 0;
    while (lo < hi) {
      const std::uint64_t mid = lo + (hi - lo + 1) / 2;
      if (base + mid <= size) {
        const std::uint64_t v = read(j, base + mid);
        if (acc + v < target) {
          lo = mid;
          lo_value = v;
          continue;
        }
      }
      hi = mid - 1;
    }
    head = head * b + lo;
    acc += lo_value;
  }
  return {head + 1, acc};
}

std::uint64_t layered_fenwick::search(std::uint64_t target) const {
  return locate(target).index;
}

std::uint64_t layered_fenwick::entry(unsigned j, std::uint64_t offset) const {
  if (j < 1 || j > geom_.levels()) throw index_error("level out of range");
  detail::check_index(offset, 1, geom_.layer_size(j));
  return read_bits(words_, bit_offset_[j - 1] + (offset - 1) * geom_.entry_width(j),
                   geom_.entry_width(j));
}

void layered_fenwick::poke(unsigned j, std::uint64_t offset, std::uint64_t v) {
  entry(j, offset);
  write_bits(words_, bit_offset_[j - 1] + (offset - 1) * geom_.entry_width(j),
             geom_.entry_width(j), v & low_mask(geom_.entry_width(j)));
}

std::uint64_t layered_fenwick::metadata_bits() const noexcept {
  // Offset table plus (n, k, b, depth).
  return (geom_.levels() + 4) * word_bits;
}

space_report layered_fenwick::space() const {
  space_report r;
  for (unsigned j = 1; j <= geom_.levels(); ++j)
    r.components.emplace_back("layer " + std::to_string(j),
                              geom_.layer_size(j) * geom_.entry_width(j));
  r.payload_bits = geom_.payload_bits();
  r.metadata_bits = metadata_bits();
  const std::uint64_t n = size();
  r.bound_bits = n * geom_.k() + 2 * n * ceil_log2(geom_.b());
  r.bound_formula = "n*k + 2*n*ceil(log2 b)";
  return r;
}

}  // namespace psums
