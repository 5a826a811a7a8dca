#include "psums/classic_fenwick.hpp"

#include <bit>
#include <utility>

#include "psums/detail/checks.hpp"

namespace psums {

namespace {

constexpr std::uint64_t lowbit(std::uint64_t i) noexcept { return i & (~i + 1); }

}  // namespace

classic_fenwick::classic_fenwick(std::vector<std::uint64_t> values, unsigned k)
    : tree_(std::move(values)), k_(k) {
  detail::check_value_width(tree_.size(), k);
  for (std::uint64_t i = 0; i < tree_.size(); ++i)
    detail::check_fits(tree_[i], k, i + 1);
  build_inplace(tree_);
}

void classic_fenwick::build_inplace(std::span<std::uint64_t> a) noexcept {
  const std::uint64_t n = a.size();
  for (std::uint64_t i = 1; i <= n; ++i) {
    const std::uint64_t parent = i + lowbit(i);
    if (parent <= n) a[parent - 1] += a[i - 1];
  }
}

classic_fenwick classic_fenwick::from_layout(std::vector<std::uint64_t> tree,
                                             unsigned k) {
  detail::check_value_width(tree.size(), k);
  classic_fenwick f;
  f.tree_ = std::move(tree);
  f.k_ = k;
  return f;
}

std::uint64_t classic_fenwick::prefix(std::uint64_t i) const noexcept {
  std::uint64_t s = 0;
  for (; i > 0; i -= lowbit(i)) {
    s += tree_[i - 1];
    ++cost_.entry_reads;
  }
  return s;
}

std::uint64_t classic_fenwick::sum(std::uint64_t i) const {
  cost_ = {};
  detail::check_index(i, 0, size());
  return prefix(i);
}

std::uint64_t classic_fenwick::access(std::uint64_t i) const {
  cost_ = {};
  detail::check_index(i, 1, size());
  return prefix(i) - prefix(i - 1);
}

void classic_fenwick::update(std::uint64_t i, std::int64_t delta) {
  detail::check_index(i, 1, size());
  detail::shifted_value(access(i), delta, k_, i);
  cost_.entry_writes = 0;
  const std::uint64_t n = size();
  for (; i <= n; i += lowbit(i)) {
    tree_[i - 1] += static_cast<std::uint64_t>(delta);
    ++cost_.entry_writes;
  }
}

std::uint64_t classic_fenwick::search(std::uint64_t target) const {
  cost_ = {};
  detail::check_target(target);
  const std::uint64_t n = size();
  std::uint64_t pos = 0;
  std::uint64_t rest = target;
  for (std::uint64_t step = std::bit_floor(n); step > 0; step >>= 1) {
    const std::uint64_t next = pos + step;
    if (next > n) continue;
    ++cost_.entry_reads;
    if (tree_[next - 1] < rest) {
      pos = next;
      rest -= tree_[next - 1];
    }
  }
  return pos + 1;
}

space_report classic_fenwick::space() const {
  const std::uint64_t n = size();
  space_report r;
  r.components = {{"entries", n * word_bits}};
  r.payload_bits = n * word_bits;
  r.metadata_bits = 2 * word_bits;
  r.bound_bits = n * k_ + n * ceil_log2(n);
  r.bound_formula = "n*k + n*ceil(log2 n)";
  r.bound_applies = false;
  return r;
}

}  // namespace psums
