#pragma once

#include <algorithm>
#include <concepts>
#include <cstdint>
#include <exception>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "psums/op_cost.hpp"

namespace psums {

// Plain array answering every query by a linear scan. Ground truth for the
// differential tests; deliberately O(n) per operation.
class naive_array {
 public:
  naive_array(std::vector<std::uint64_t> values, unsigned k);

  std::uint64_t size() const noexcept { return values_.size(); }
  unsigned value_bits() const noexcept { return k_; }
  const std::vector<std::uint64_t>& values() const noexcept { return values_; }

  std::uint64_t sum(std::uint64_t i) const;
  void update(std::uint64_t i, std::int64_t delta);
  std::uint64_t search(std::uint64_t target) const;
  std::uint64_t access(std::uint64_t i) const;

 private:
  std::vector<std::uint64_t> values_;
  unsigned k_;
};

enum class op_kind : std::uint8_t { sum, update, search, access };

std::string_view to_string(op_kind kind) noexcept;

struct trace_op {
  op_kind kind = op_kind::sum;
  std::uint64_t arg = 0;   // index for sum/update/access, target for search
  std::int64_t delta = 0;  // update only
  friend bool operator==(const trace_op&, const trace_op&) = default;
};

std::string format_op(const trace_op& op);

// Relative weights of the four operation kinds.
struct op_mix {
  unsigned sum = 1;
  unsigned update = 1;
  unsigned search = 1;
  unsigned access = 0;

  // "s:u:q" or "s:u:q:a".
  static op_mix parse(std::string_view text);
  unsigned total() const noexcept { return sum + update + search + access; }
};

struct op_trace {
  std::uint64_t seed = 0;
  unsigned k = 1;
  std::vector<std::uint64_t> initial;
  std::vector<trace_op> ops;
  // Output of each query op under the naive oracle (nullopt for updates).
  std::vector<std::optional<std::uint64_t>> expected;
};

struct trace_options {
  std::uint64_t n = 1;
  unsigned k = 8;
  std::uint64_t ops = 0;
  op_mix mix;
  std::uint64_t seed = 0;
  // Updates satisfy |delta| < 2^delta_bits (64 = unbounded).
  unsigned delta_bits = 64;
  // Probability per initial element of being zero, to exercise ties.
  double zero_fraction = 0.25;
  // Fill op_trace::expected from a shadow naive array (O(n) per query).
  bool record_expected = false;
};

// Deterministic for a given seed on every platform: draws use only the
// raw mt19937_64 stream, never library distributions.
op_trace gen_trace(const trace_options& options);

// Initial array of a trace alone (same generator as gen_trace).
std::vector<std::uint64_t> gen_values(std::uint64_t n, unsigned k,
                                      std::uint64_t seed,
                                      double zero_fraction = 0.25);

template <class S>
concept partial_sums = requires(S s, const S cs, std::uint64_t i,
                                std::int64_t delta) {
  { cs.size() } -> std::convertible_to<std::uint64_t>;
  { cs.sum(i) } -> std::convertible_to<std::uint64_t>;
  { cs.search(i) } -> std::convertible_to<std::uint64_t>;
  { cs.access(i) } -> std::convertible_to<std::uint64_t>;
  { s.update(i, delta) };
  { cs.last_cost() } -> std::convertible_to<const op_cost&>;
};

struct divergence {
  std::uint64_t index = 0;  // 0-based op position in the trace
  trace_op op;
  std::string expected;
  std::string got;
};

struct cost_maxima {
  op_cost per_kind[4];
  op_cost& operator[](op_kind k) noexcept { return per_kind[static_cast<int>(k)]; }
  const op_cost& operator[](op_kind k) const noexcept {
    return per_kind[static_cast<int>(k)];
  }
};

struct run_report {
  bool ok = true;
  std::uint64_t ops_run = 0;
  std::optional<divergence> first_divergence;
  cost_maxima max_cost;
};

namespace detail {

inline std::string describe(const std::optional<std::uint64_t>& v,
                            const std::string& error) {
  if (!error.empty()) return "error: " + error;
  return v ? std::to_string(*v) : std::string("(no output)");
}

template <class F>
std::optional<std::uint64_t> guarded(F&& f, std::string& error) {
  try {
    return f();
  } catch (const std::exception& e) {
    error = e.what();
    return std::nullopt;
  }
}

inline void raise(op_cost& into, const op_cost& c) noexcept {
  into.entry_reads = std::max(into.entry_reads, c.entry_reads);
  into.entry_writes = std::max(into.entry_writes, c.entry_writes);
  into.word_reads = std::max(into.word_reads, c.word_reads);
  into.word_writes = std::max(into.word_writes, c.word_writes);
}

}  // namespace detail

// Replays `trace` on `s` (built from trace.initial) next to a naive array and
// reports the first op whose output or error status differs. Also records
// the largest per-op cost seen for each op kind.
template <partial_sums S>
run_report differential_run(const op_trace& trace, S& s) {
  run_report report;
  naive_array oracle(trace.initial, trace.k);
  for (std::uint64_t idx = 0; idx < trace.ops.size(); ++idx) {
    const trace_op& op = trace.ops[idx];
    std::string want_err, got_err;
    std::optional<std::uint64_t> want, got;
    switch (op.kind) {
      case op_kind::sum:
        want = detail::guarded([&] { return oracle.sum(op.arg); }, want_err);
        got = detail::guarded([&] { return s.sum(op.arg); }, got_err);
        break;
      case op_kind::search:
        want = detail::guarded([&] { return oracle.search(op.arg); }, want_err);
        got = detail::guarded([&] { return s.search(op.arg); }, got_err);
        break;
      case op_kind::access:
        want = detail::guarded([&] { return oracle.access(op.arg); }, want_err);
        got = detail::guarded([&] { return s.access(op.arg); }, got_err);
        break;
      case op_kind::update:
        detail::guarded([&] { oracle.update(op.arg, op.delta); return std::uint64_t{0}; },
                        want_err);
        detail::guarded([&] { s.update(op.arg, op.delta); return std::uint64_t{0}; },
                        got_err);
        break;
    }
    ++report.ops_run;
    if (got_err.empty()) detail::raise(report.max_cost[op.kind], s.last_cost());
    if (want != got || want_err.empty() != got_err.empty()) {
      report.ok = false;
      report.first_divergence =
          divergence{idx, op, detail::describe(want, want_err),
                     detail::describe(got, got_err)};
      return report;
    }
  }
  return report;
}

}  // namespace psums
