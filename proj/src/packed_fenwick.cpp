#include "psums/packed_fenwick.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "psums/detail/checks.hpp"

namespace psums {

packed_params packed_params::derive(std::uint64_t n, unsigned k,
                                    unsigned delta_bits, unsigned w,
                                    std::optional<std::uint64_t> d) {
  if (w < 2 || w > word_bits)
    throw invalid_parameter("2 <= w <= 64 violated (w=" + std::to_string(w) + ")");
  if (delta_bits < 1)
    throw invalid_parameter("delta >= 1 violated (delta bits must be positive)");
  if (delta_bits >= w)
    throw invalid_parameter("delta < w violated (delta=" +
                            std::to_string(delta_bits) +
                            ", w=" + std::to_string(w) + ")");
  if (k < 1 || k > w / 2)
    throw invalid_parameter("1 <= k <= w/2 violated (k=" + std::to_string(k) +
                            ", w=" + std::to_string(w) + ")");
  if (n < 1) throw invalid_parameter("array must not be empty (n >= 1)");

  packed_params p;
  p.w = w;
  p.delta_bits = delta_bits;
  const std::uint64_t counters =
      std::max<std::uint64_t>(1, w / (2 * (ceil_log2(w) + delta_bits)));
  p.b = counters + 1;
  p.cursor_bits = ceil_log2(counters);
  p.field_bits = static_cast<unsigned>((w - p.cursor_bits) / counters);
  if (counters * (delta_bits + p.cursor_bits + 1) > w)
    throw invalid_parameter(
        "(b-1)*(delta + ceil(log2(b-1)) + 1) <= w violated");
  if (p.field_bits < delta_bits + p.cursor_bits + 1)
    throw invalid_parameter("f >= delta + ceil(log2(b-1)) + 1 violated");

  if (d) {
    if (*d < 1 || *d > n)
      throw invalid_parameter("sample rate 1 <= d <= n violated (d=" +
                              std::to_string(*d) + ", n=" + std::to_string(n) +
                              ")");
    p.d = *d;
  } else if (n > 1) {
    const double rate = w * std::log2(static_cast<double>(n)) /
                        (k * std::log2(static_cast<double>(w) / delta_bits));
    const double r = std::round(rate);
    p.d = r < 1 ? 1
                : (r >= static_cast<double>(n) ? n
                                               : static_cast<std::uint64_t>(r));
  }
  return p;
}

void packed_fenwick::allocate() {
  layers_.clear();
  pending_start_.clear();
  std::uint64_t words = 0;
  for (unsigned j = 1; j <= geom_.levels(); ++j) {
    layers_.emplace_back(geom_.layer_size(j), geom_.entry_width(j));
    pending_start_.push_back(words);
    words += blocks(j);
  }
  word_t idle = 0;
  for (std::uint64_t q = 0; q < params_.counters(); ++q)
    idle |= params_.bias() << (q * params_.field_bits);
  pending_.assign(words, idle);
}

packed_fenwick::packed_fenwick(std::vector<std::uint64_t> values, unsigned k,
                               unsigned delta_bits,
                               std::optional<std::uint64_t> d)
    : n_(values.size()), k_(k) {
  detail::check_value_width(n_, k);
  params_ = packed_params::derive(n_, k, delta_bits, word_bits, d);
  for (std::uint64_t i = 0; i < n_; ++i) detail::check_fits(values[i], k, i + 1);

  const std::uint64_t rate = params_.d;
  const std::uint64_t ngroups = ceil_div(n_, rate);
  base_ = aligned_int_array(n_ - ngroups, k);
  std::vector<std::uint64_t> totals(ngroups, 0);
  for (std::uint64_t i = 1; i <= n_; ++i) {
    totals[(i - 1) / rate] += values[i - 1];
    if (!is_sampled(i)) base_.put(base_slot(i), values[i - 1]);
  }
  values.clear();
  values.shrink_to_fit();

  geom_ = layered_geometry(ngroups, k + ceil_log2(rate), params_.b);
  allocate();
  fold_layers(totals, geom_, [this](unsigned j, std::uint64_t o, std::uint64_t v) {
    layers_[j - 1].put(o - 1, v);
  });
}

packed_fenwick packed_fenwick::from_parts(std::uint64_t n, unsigned k,
                                          const packed_params& params,
                                          parts p) {
  packed_fenwick f;
  detail::check_value_width(n, k);
  f.n_ = n;
  f.k_ = k;
  f.params_ = packed_params::derive(n, k, params.delta_bits, word_bits, params.d);
  if (f.params_.b != params.b || f.params_.field_bits != params.field_bits)
    throw invalid_parameter("packed parameters are inconsistent with delta");
  const std::uint64_t ngroups = ceil_div(n, f.params_.d);
  f.geom_ = layered_geometry(ngroups, k + ceil_log2(f.params_.d), f.params_.b);
  f.allocate();
  if (p.layers.size() != f.geom_.levels())
    throw invalid_parameter("expected " + std::to_string(f.geom_.levels()) +
                            " layers, got " + std::to_string(p.layers.size()));
  for (unsigned j = 1; j <= f.geom_.levels(); ++j)
    f.layers_[j - 1] = aligned_int_array::from_words(
        f.geom_.layer_size(j), f.geom_.entry_width(j), std::move(p.layers[j - 1]));
  if (p.pending.size() != f.pending_.size())
    throw invalid_parameter("pending buffer has " +
                            std::to_string(p.pending.size()) + " words, expected " +
                            std::to_string(f.pending_.size()));
  const unsigned counter_bits =
      static_cast<unsigned>(f.params_.counters()) * f.params_.field_bits;
  const word_t slack = ~low_mask(counter_bits) & low_mask(word_bits - f.params_.cursor_bits);
  for (word_t w : p.pending)
    if ((w & slack) != 0 || f.cursor_of(w) >= f.params_.counters())
      throw invalid_parameter("malformed pending word");
  f.pending_ = std::move(p.pending);
  f.base_ = aligned_int_array::from_words(n - ngroups, k, std::move(p.base));
  return f;
}

packed_fenwick::parts packed_fenwick::export_parts() const {
  parts p;
  for (const auto& layer : layers_)
    p.layers.emplace_back(layer.words().begin(), layer.words().end());
  p.pending = pending_;
  p.base.assign(base_.words().begin(), base_.words().end());
  return p;
}

std::uint64_t packed_fenwick::read_true(unsigned j,
                                        std::uint64_t offset) const noexcept {
  ++cost_.entry_reads;
  cost_.word_reads += 2;
  const std::uint64_t counters = params_.counters();
  const std::uint64_t block = (offset - 1) / counters;
  const unsigned shift =
      static_cast<unsigned>((offset - 1) % counters) * params_.field_bits;
  const word_t counter =
      (pending_[pending_start_[j - 1] + block] >> shift) & low_mask(params_.field_bits);
  return layers_[j - 1][offset - 1] + counter - params_.bias();
}

std::uint64_t packed_fenwick::tree_prefix(std::uint64_t g) const noexcept {
  const std::uint64_t b = params_.b;
  std::uint64_t total = 0;
  for (unsigned j = geom_.levels(); g != 0; --j) {
    const std::uint64_t x = g % b;
    g /= b;
    if (x != 0) total += read_true(j, (b - 1) * g + x);
  }
  return total;
}

void packed_fenwick::tree_apply(std::uint64_t g, std::int64_t delta) {
  const std::uint64_t b = params_.b;
  const std::uint64_t counters = params_.counters();
  const unsigned f = params_.field_bits;
  const word_t field_mask = low_mask(f);
  const word_t bias = params_.bias();
  const word_t magnitude = delta < 0 ? word_t{0} - static_cast<word_t>(delta)
                                     : static_cast<word_t>(delta);
  std::uint64_t head = g - 1;
  for (unsigned j = geom_.levels(); j >= 1; --j) {
    const std::uint64_t y = head % b;
    head /= b;
    if (y + 1 < b && head < blocks(j)) {
      word_t& slot = pending_[pending_start_[j - 1] + head];
      ++cost_.word_reads;
      fielded_word fw = counters_of(slot);
      fw = delta < 0 ? word_suffix_sub(fw, static_cast<unsigned>(y + 1), magnitude)
                     : word_suffix_add(fw, static_cast<unsigned>(y + 1), magnitude);
      word_t w = fw.word;
      for (unsigned q = 0; q < counters; ++q) {
        const word_t c = (w >> (q * f)) & field_mask;
        max_pending_ = std::max(max_pending_, c >= bias ? c - bias : bias - c);
      }

      // Transfer the counter under the cursor into its stored entry.
      const unsigned cursor = cursor_of(w);
      const unsigned shift = cursor * f;
      const word_t moved = ((w >> shift) & field_mask) - bias;
      w = (w & ~(field_mask << shift)) | (bias << shift);
      const std::uint64_t offset = (b - 1) * head + cursor + 1;
      if (offset <= geom_.layer_size(j)) {
        aligned_int_array& layer = layers_[j - 1];
        ++cost_.word_reads;
        layer.put(offset - 1,
                  (layer[offset - 1] + moved) & low_mask(geom_.entry_width(j)));
        ++cost_.word_writes;
        ++cost_.entry_writes;
      }
      if (params_.cursor_bits != 0) {
        const word_t next = (cursor + 1) % counters;
        w = (w & low_mask(word_bits - params_.cursor_bits)) |
            (next << (word_bits - params_.cursor_bits));
      }
      slot = w;
      ++cost_.word_writes;
    }
    if (j == 1) break;
  }
}

std::uint64_t packed_fenwick::base_sum(std::uint64_t lo, std::uint64_t hi) const {
  const std::uint64_t per = base_.per_word();
  std::uint64_t total = 0;
  while (lo < hi) {
    const std::uint64_t wi = lo / per;
    const unsigned from = static_cast<unsigned>(lo % per);
    const unsigned to = static_cast<unsigned>(std::min(hi - wi * per, per));
    const unsigned count = to - from;
    ++cost_.word_reads;
    total += word_prefix_sum({base_.word(wi) >> (from * k_), k_, count}, count);
    lo = wi * per + to;
  }
  return total;
}

std::uint64_t packed_fenwick::prefix(std::uint64_t i) const {
  if (i == 0) return 0;
  const std::uint64_t g = ceil_div(i, params_.d);
  if (is_sampled(i)) return tree_prefix(g);
  return tree_prefix(g - 1) +
         base_sum((g - 1) * (params_.d - 1), base_slot(i) + 1);
}

std::uint64_t packed_fenwick::sum(std::uint64_t i) const {
  cost_ = {};
  detail::check_index(i, 0, n_);
  return prefix(i);
}

std::uint64_t packed_fenwick::access(std::uint64_t i) const {
  cost_ = {};
  detail::check_index(i, 1, n_);
  return prefix(i) - prefix(i - 1);
}

void packed_fenwick::update(std::uint64_t i, std::int64_t delta) {
  const word_t magnitude = delta < 0 ? word_t{0} - static_cast<word_t>(delta)
                                     : static_cast<word_t>(delta);
  if (magnitude >> params_.delta_bits != 0)
    throw delta_too_large("|delta| < 2^" + std::to_string(params_.delta_bits) +
                          " violated (delta=" + std::to_string(delta) + ")");
  detail::check_index(i, 1, n_);
  detail::shifted_value(access(i), delta, k_, i);
  cost_ = {};
  tree_apply(ceil_div(i, params_.d), delta);
  if (!is_sampled(i)) {
    const std::uint64_t slot = base_slot(i);
    const std::uint64_t per = base_.per_word();
    ++cost_.word_reads;
    base_.word(slot / per) += static_cast<word_t>(delta) << (slot % per * k_);
    ++cost_.word_writes;
  }
}

std::uint64_t packed_fenwick::search(std::uint64_t target) const {
  cost_ = {};
  detail::check_target(target);
  const std::uint64_t b = params_.b;
  std::uint64_t head = 0;
  std::uint64_t acc = 0;
  for (unsigned j = 1; j <= geom_.levels(); ++j) {
    const std::uint64_t size = geom_.layer_size(j);
    const std::uint64_t first = (b - 1) * head;
    std::uint64_t lo = 0, hi = b - 1, lo_value = 0;
    while (lo < hi) {
      const std::uint64_t mid = lo + (hi - lo + 1) / 2;
      if (first + mid <= size) {
        const std::uint64_t v = read_true(j, first + mid);
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
  const std::uint64_t g = head + 1;
  if (g > groups()) return n_ + 1;

  const std::uint64_t per = base_.per_word();
  const std::uint64_t start = (g - 1) * (params_.d - 1);
  const std::uint64_t end = start + (group_end(g) - (g - 1) * params_.d - 1);
  for (std::uint64_t lo = start; lo < end;) {
    const std::uint64_t wi = lo / per;
    const unsigned from = static_cast<unsigned>(lo % per);
    const unsigned to = static_cast<unsigned>(std::min(end - wi * per, per));
    const fielded_word x{base_.word(wi) >> (from * k_), k_, to - from};
    ++cost_.word_reads;
    const std::uint64_t total = word_prefix_sum(x, x.nfields);
    if (acc + total >= target) {
      const unsigned r = word_search(x, target - acc);
      return (g - 1) * params_.d + (wi * per + from + r - start);
    }
    acc += total;
    lo = wi * per + to;
  }
  return group_end(g);
}

std::uint64_t packed_fenwick::true_entry(unsigned j, std::uint64_t offset) const {
  if (j < 1 || j > geom_.levels()) throw index_error("level out of range");
  detail::check_index(offset, 1, geom_.layer_size(j));
  const op_cost saved = cost_;
  const std::uint64_t v = read_true(j, offset);
  cost_ = saved;
  return v;
}

std::int64_t packed_fenwick::pending_counter(unsigned j,
                                             std::uint64_t offset) const {
  if (j < 1 || j > geom_.levels()) throw index_error("level out of range");
  detail::check_index(offset, 1, geom_.layer_size(j));
  const std::uint64_t counters = params_.counters();
  const word_t w = pending_[pending_start_[j - 1] + (offset - 1) / counters];
  const word_t c = (w >> ((offset - 1) % counters * params_.field_bits)) &
                   low_mask(params_.field_bits);
  return static_cast<std::int64_t>(c - params_.bias());
}

bool packed_fenwick::all_pending_zero() const noexcept {
  for (word_t w : pending_)
    for (unsigned q = 0; q < params_.counters(); ++q)
      if (((w >> (q * params_.field_bits)) & low_mask(params_.field_bits)) !=
          params_.bias())
        return false;
  return true;
}

space_report packed_fenwick::space() const {
  space_report r;
  std::uint64_t layer_bits = 0;
  for (const auto& layer : layers_) layer_bits += layer.payload_bits();
  const std::uint64_t pending_bits = pending_.size() * word_bits;
  r.components = {{"layers", layer_bits},
                  {"pending words", pending_bits},
                  {"base", base_.payload_bits()}};
  r.payload_bits = layer_bits + pending_bits + base_.payload_bits();
  // Geometry, per-level layer and pending offsets, (delta, b, f, d).
  r.metadata_bits = (4 + 2 * geom_.levels() + 4) * word_bits;
  r.bound_bits = n_ * k_ + 4 * n_ * (params_.delta_bits + ceil_log2(params_.w)) /
                               params_.d;
  r.bound_formula = "n*k + 4*n*(delta + log2 w)/d";
  return r;
}

}  // namespace psums
