#include "psums/oracle.hpp"

#include <charconv>
#include <random>
#include <utility>

#include "psums/detail/checks.hpp"
#include "psums/errors.hpp"

namespace psums {

naive_array::naive_array(std::vector<std::uint64_t> values, unsigned k)
    : values_(std::move(values)), k_(k) {
  if (k < 1 || k > word_bits)
    throw invalid_parameter("value width k must be in 1..64");
  for (std::uint64_t i = 0; i < values_.size(); ++i)
    detail::check_fits(values_[i], k, i + 1);
}

std::uint64_t naive_array::sum(std::uint64_t i) const {
  detail::check_index(i, 0, size());
  std::uint64_t s = 0;
  for (std::uint64_t t = 0; t < i; ++t) s += values_[t];
  return s;
}

void naive_array::update(std::uint64_t i, std::int64_t delta) {
  detail::check_index(i, 1, size());
  values_[i - 1] = detail::shifted_value(values_[i - 1], delta, k_, i);
}

std::uint64_t naive_array::search(std::uint64_t target) const {
  detail::check_target(target);
  std::uint64_t s = 0;
  for (std::uint64_t i = 0; i < size(); ++i) {
    s += values_[i];
    if (s >= target) return i + 1;
  }
  return size() + 1;
}

std::uint64_t naive_array::access(std::uint64_t i) const {
  detail::check_index(i, 1, size());
  return values_[i - 1];
}

std::string_view to_string(op_kind kind) noexcept {
  switch (kind) {
    case op_kind::sum: return "sum";
    case op_kind::update: return "update";
    case op_kind::search: return "search";
    case op_kind::access: return "access";
  }
  return "?";
}

std::string format_op(const trace_op& op) {
  std::string s(to_string(op.kind));
  s += ' ';
  s += std::to_string(op.arg);
  if (op.kind == op_kind::update) {
    s += ' ';
    s += std::to_string(op.delta);
  }
  return s;
}

op_mix op_mix::parse(std::string_view text) {
  std::vector<unsigned> parts;
  while (true) {
    const auto colon = text.find(':');
    const std::string_view field = text.substr(0, colon);
    unsigned v = 0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc{} || ptr != field.data() + field.size() || field.empty())
      throw invalid_parameter("mix must look like s:u:q or s:u:q:a, got '" +
                              std::string(text) + "'");
    parts.push_back(v);
    if (colon == std::string_view::npos) break;
    text.remove_prefix(colon + 1);
  }
  if (parts.size() != 3 && parts.size() != 4)
    throw invalid_parameter("mix needs 3 or 4 weights");
  op_mix m{parts[0], parts[1], parts[2], parts.size() == 4 ? parts[3] : 0u};
  if (m.total() == 0) throw invalid_parameter("mix weights are all zero");
  return m;
}

namespace {

// Uniform in [lo, hi] by modulo reduction; slightly biased, but fixed
// across standard library implementations.
std::uint64_t draw(std::mt19937_64& rng, std::uint64_t lo, std::uint64_t hi) {
  const std::uint64_t span = hi - lo;
  if (span == ~std::uint64_t{0}) return rng();
  return lo + rng() % (span + 1);
}

std::int64_t draw_signed(std::mt19937_64& rng, std::int64_t lo,
                         std::int64_t hi) {
  const std::uint64_t span =
      static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo);
  return static_cast<std::int64_t>(static_cast<std::uint64_t>(lo) +
                                   draw(rng, 0, span));
}

double unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::vector<std::uint64_t> draw_values(std::mt19937_64& rng, std::uint64_t n,
                                       unsigned k, double zero_fraction) {
  std::vector<std::uint64_t> v(n);
  for (auto& x : v) {
    const bool zero = unit(rng) < zero_fraction;
    const std::uint64_t r = rng() & low_mask(k);
    x = zero ? 0 : r;
  }
  return v;
}

}  // namespace

std::vector<std::uint64_t> gen_values(std::uint64_t n, unsigned k,
                                      std::uint64_t seed,
                                      double zero_fraction) {
  if (k < 1 || k > word_bits)
    throw invalid_parameter("value width k must be in 1..64");
  std::mt19937_64 rng(seed);
  return draw_values(rng, n, k, zero_fraction);
}

op_trace gen_trace(const trace_options& o) {
  if (o.k < 1 || o.k > word_bits)
    throw invalid_parameter("value width k must be in 1..64");
  if (o.ops > 0 && o.mix.total() == 0)
    throw invalid_parameter("mix weights are all zero");
  if (o.n == 0 && o.ops > 0 && (o.mix.update > 0 || o.mix.access > 0))
    throw invalid_parameter("impossible mix: updates/accesses need n >= 1");
  if (o.delta_bits < 1) throw invalid_parameter("delta bits must be positive");

  std::mt19937_64 rng(o.seed);
  op_trace t;
  t.seed = o.seed;
  t.k = o.k;
  t.initial = draw_values(rng, o.n, o.k, o.zero_fraction);

  std::vector<std::uint64_t> shadow = t.initial;
  std::uint64_t total = 0;
  for (auto v : shadow) total += v;
  std::optional<naive_array> oracle;
  if (o.record_expected) oracle.emplace(t.initial, o.k);

  const std::int64_t delta_cap =
      o.delta_bits >= 64 ? INT64_MAX
                         : static_cast<std::int64_t>(low_mask(o.delta_bits));
  const std::uint64_t weight = o.mix.total();
  t.ops.reserve(o.ops);
  for (std::uint64_t step = 0; step < o.ops; ++step) {
    std::uint64_t r = rng() % weight;
    trace_op op;
    if (r < o.mix.sum) {
      op.kind = op_kind::sum;
      op.arg = draw(rng, 0, o.n);
    } else if ((r -= o.mix.sum) < o.mix.update) {
      op.kind = op_kind::update;
      op.arg = draw(rng, 1, o.n);
      const std::uint64_t cur = shadow[op.arg - 1];
      const std::int64_t lo =
          -static_cast<std::int64_t>(std::min<std::uint64_t>(cur, delta_cap));
      const std::int64_t hi = static_cast<std::int64_t>(std::min<std::uint64_t>(
          low_mask(o.k) - cur, static_cast<std::uint64_t>(delta_cap)));
      op.delta = draw_signed(rng, lo, hi);
      shadow[op.arg - 1] = cur + static_cast<std::uint64_t>(op.delta);
      total += static_cast<std::uint64_t>(op.delta);
    } else if ((r -= o.mix.update) < o.mix.search) {
      op.kind = op_kind::search;
      // Mostly reachable targets, sometimes past the total.
      op.arg = rng() % 16 == 0 ? total + 1 + draw(rng, 0, o.n)
                               : draw(rng, 1, total + 1);
    } else {
      op.kind = op_kind::access;
      op.arg = draw(rng, 1, o.n);
    }
    t.ops.push_back(op);
    if (oracle) {
      switch (op.kind) {
        case op_kind::sum: t.expected.emplace_back(oracle->sum(op.arg)); break;
        case op_kind::search: t.expected.emplace_back(oracle->search(op.arg)); break;
        case op_kind::access: t.expected.emplace_back(oracle->access(op.arg)); break;
        case op_kind::update:
          oracle->update(op.arg, op.delta);
          t.expected.emplace_back(std::nullopt);
          break;
      }
    }
  }
  return t;
}

}  // namespace psums
