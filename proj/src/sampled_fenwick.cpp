#include "psums/sampled_fenwick.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "psums/detail/checks.hpp"

namespace psums {

std::uint64_t sample_rate_for(std::uint64_t n, std::uint64_t b,
                              double epsilon) {
  if (!(epsilon > 0))
    throw invalid_parameter("epsilon > 0 violated");
  if (b < 2) throw invalid_parameter("branching factor b >= 2 violated");
  if (n < 1) throw invalid_parameter("array must not be empty (n >= 1)");
  const double logb = std::log(static_cast<double>(n)) /
                      std::log(static_cast<double>(b));
  const double d = std::round(logb / epsilon);
  if (d < 1) return 1;
  if (d >= static_cast<double>(n)) return n;
  return static_cast<std::uint64_t>(d);
}

namespace {

std::vector<std::uint64_t> group_totals(const std::vector<std::uint64_t>& a,
                                        std::uint64_t d) {
  std::vector<std::uint64_t> totals(ceil_div(a.size(), d), 0);
  for (std::uint64_t i = 0; i < a.size(); ++i) totals[i / d] += a[i];
  return totals;
}

}  // namespace

sampled_fenwick::sampled_fenwick(std::vector<std::uint64_t> values, unsigned k,
                                 std::uint64_t b, std::uint64_t d)
    : n_(values.size()), k_(k), d_(d) {
  detail::check_value_width(n_, k);
  if (d < 1 || d > n_)
    throw invalid_parameter("sample rate 1 <= d <= n violated (d=" +
                            std::to_string(d) + ", n=" + std::to_string(n_) +
                            ")");
  for (std::uint64_t i = 0; i < n_; ++i) detail::check_fits(values[i], k, i + 1);

  base_ = packed_int_array(n_ - ceil_div(n_, d), k);
  for (std::uint64_t i = 1; i <= n_; ++i)
    if (!is_sampled(i)) base_.put(base_slot(i), values[i - 1]);
  std::vector<std::uint64_t> totals = group_totals(values, d);
  values.clear();
  values.shrink_to_fit();
  tree_ = layered_fenwick(std::move(totals), k + ceil_log2(d), b);
}

sampled_fenwick sampled_fenwick::with_epsilon(std::vector<std::uint64_t> values,
                                              unsigned k, std::uint64_t b,
                                              double epsilon) {
  const std::uint64_t d = sample_rate_for(std::max<std::uint64_t>(values.size(), 1), b, epsilon);
  return sampled_fenwick(std::move(values), k, b, d);
}

sampled_fenwick sampled_fenwick::from_parts(std::uint64_t n, unsigned k,
                                            std::uint64_t d,
                                            packed_int_array base,
                                            layered_fenwick tree) {
  detail::check_value_width(n, k);
  if (d < 1 || d > n) throw invalid_parameter("sample rate 1 <= d <= n violated");
  if (base.size() != n - ceil_div(n, d) || base.width() != k)
    throw invalid_parameter("base array does not match (n, k, d)");
  if (tree.size() != ceil_div(n, d) || tree.value_bits() != k + ceil_log2(d))
    throw invalid_parameter("group tree does not match (n, k, d)");
  sampled_fenwick s;
  s.n_ = n;
  s.k_ = k;
  s.d_ = d;
  s.base_ = std::move(base);
  s.tree_ = std::move(tree);
  return s;
}

void sampled_fenwick::absorb_tree_cost() const noexcept {
  const op_cost& t = tree_.last_cost();
  cost_.entry_reads += t.entry_reads;
  cost_.entry_writes += t.entry_writes;
}

std::uint64_t sampled_fenwick::prefix(std::uint64_t i) const {
  if (i == 0) return 0;
  const std::uint64_t g = ceil_div(i, d_);
  if (is_sampled(i)) {
    const std::uint64_t s = tree_.sum(g);
    absorb_tree_cost();
    return s;
  }
  std::uint64_t s = tree_.sum(g - 1);
  absorb_tree_cost();
  for (std::uint64_t slot = (g - 1) * (d_ - 1); slot <= base_slot(i); ++slot) {
    s += base_[slot];
    ++cost_.entry_reads;
  }
  return s;
}

std::uint64_t sampled_fenwick::sum(std::uint64_t i) const {
  cost_ = {};
  detail::check_index(i, 0, n_);
  return prefix(i);
}

std::uint64_t sampled_fenwick::access(std::uint64_t i) const {
  cost_ = {};
  detail::check_index(i, 1, n_);
  if (!is_sampled(i)) {
    ++cost_.entry_reads;
    return base_[base_slot(i)];
  }
  return prefix(i) - prefix(i - 1);
}

void sampled_fenwick::update(std::uint64_t i, std::int64_t delta) {
  detail::check_index(i, 1, n_);
  const std::uint64_t next = detail::shifted_value(access(i), delta, k_, i);
  cost_ = {};
  tree_.add(ceil_div(i, d_), delta);
  absorb_tree_cost();
  if (!is_sampled(i)) {
    base_.put(base_slot(i), next);
    ++cost_.entry_writes;
  }
}

std::uint64_t sampled_fenwick::search(std::uint64_t target) const {
  cost_ = {};
  detail::check_target(target);
  const auto [g, before] = tree_.locate(target);
  absorb_tree_cost();
  if (g > groups()) return n_ + 1;
  // Scan the kept members of group g; the sampled last member closes it.
  std::uint64_t acc = before;
  const std::uint64_t last = group_end(g);
  for (std::uint64_t i = (g - 1) * d_ + 1; i < last; ++i) {
    acc += base_[base_slot(i)];
    ++cost_.entry_reads;
    if (acc >= target) return i;
  }
  return last;
}

space_report sampled_fenwick::space() const {
  space_report r;
  const std::uint64_t tree_bits = tree_.geometry().payload_bits();
  r.components = {{"base", base_.payload_bits()}, {"group tree", tree_bits}};
  r.payload_bits = base_.payload_bits() + tree_bits;
  r.metadata_bits = tree_.metadata_bits() + 3 * word_bits;
  // n*k + n*(ceil(log2 d) + 2*ceil(log2 b))/d, rounded down: the payload is
  // an integer, so comparing against the floor is exact.
  const std::uint64_t extra =
      n_ * (ceil_log2(d_) + 2 * ceil_log2(tree_.geometry().b())) / d_;
  r.bound_bits = n_ * k_ + extra;
  r.bound_formula = "n*k + n*(ceil(log2 d) + 2*ceil(log2 b))/d";
  return r;
}

}  // namespace psums
