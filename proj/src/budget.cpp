#include "psums/budget.hpp"

#include <bit>
#include <type_traits>

namespace psums {

namespace {

std::uint64_t reads(const op_cost& c) { return c.entry_reads; }
std::uint64_t writes(const op_cost& c) { return c.entry_writes; }
std::uint64_t word_reads(const op_cost& c) { return c.word_reads; }
std::uint64_t word_writes(const op_cost& c) { return c.word_writes; }

struct tree_budget {
  std::uint64_t levels, sum, update, search;
};

tree_budget layered_budget(const layered_geometry& g) {
  const std::uint64_t levels = g.levels();
  return {levels, levels, (g.b() - 1) * levels, levels * ceil_log2(g.b())};
}

}  // namespace

std::vector<budget_line> check_budgets(const any_structure& s,
                                       const cost_maxima& seen) {
  std::vector<budget_line> out;
  const auto line = [&](op_kind op, std::string metric, std::string formula,
                        std::uint64_t (*pick)(const op_cost&), std::uint64_t budget) {
    out.push_back({op, std::move(metric), std::move(formula), pick(seen[op]), budget});
  };
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, classic_fenwick>) {
          const std::uint64_t h = std::bit_width(x.size());
          line(op_kind::sum, "entry reads", "floor(log2 n)+1", reads, h);
          line(op_kind::update, "entry writes", "floor(log2 n)+1", writes, h);
          line(op_kind::search, "entry reads", "floor(log2 n)+1", reads, h);
        } else if constexpr (std::is_same_v<T, layered_fenwick>) {
          const tree_budget t = layered_budget(x.geometry());
          line(op_kind::sum, "entry reads", "l+1", reads, t.sum);
          line(op_kind::update, "entry writes", "(b-1)(l+1)", writes, t.update);
          line(op_kind::search, "entry reads", "(l+1)*ceil(log2 b)", reads, t.search);
        } else if constexpr (std::is_same_v<T, sampled_fenwick>) {
          const tree_budget t = layered_budget(x.tree().geometry());
          const std::uint64_t scan = x.sample_rate() - 1;
          line(op_kind::sum, "entry reads", "l'+1 + d-1", reads, t.sum + scan);
          line(op_kind::update, "entry writes", "(b-1)(l'+1) + 1", writes, t.update + 1);
          line(op_kind::search, "entry reads", "(l'+1)*ceil(log2 b) + d-1", reads,
               t.search + scan);
        } else {
          const packed_params& p = x.params();
          const std::uint64_t levels = x.geometry().levels();
          const std::uint64_t kept = p.d - 1;
          const std::uint64_t per = word_bits / x.value_bits();
          const std::uint64_t base = kept == 0 ? 0 : ceil_div(kept, per) + 1;
          const std::uint64_t base_writes = kept == 0 ? 0 : 1;
          line(op_kind::sum, "word reads", "2 per level + base words", word_reads,
               2 * levels + base);
          line(op_kind::update, "word writes", "2 per level + 1 base word", word_writes,
               2 * levels + base_writes);
          line(op_kind::search, "word reads",
               "2*ceil(log2 b) per level + base words", word_reads,
               2 * levels * ceil_log2(p.b) + base);
        }
      },
      s);
  return out;
}

}  // namespace psums
