#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "psums/oracle.hpp"
#include "psums/serialize.hpp"

namespace psums {

// Worst-case memory traffic allowed for one operation, next to what a run
// actually observed.
struct budget_line {
  op_kind op;
  std::string metric;  // e.g. "entry reads"
  std::string formula;
  std::uint64_t observed = 0;
  std::uint64_t budget = 0;

  bool ok() const noexcept { return observed <= budget; }
};

// Per-op budgets for the structure's shape:
//   classic   floor(log2 n)+1 entries for sum, update and search
//   layered   sum l+1 reads, update (b-1)(l+1) writes,
//             search (l+1)*ceil(log2 b) reads, l = ceil(log_b n)
//   sampled   the layered budgets of the group tree plus the d-1 base
//             entries of one group (one base write for update)
//   packed    2 words per tree level for sum/update, 2*ceil(log2 b) per
//             level for search, plus the base words spanned by one group
std::vector<budget_line> check_budgets(const any_structure& s,
                                       const cost_maxima& observed);

}  // namespace psums
