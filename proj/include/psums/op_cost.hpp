#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace psums {

// Memory traffic of the most recent public operation. Entry counts are in
// stored partial sums; word counts are in machine words actually loaded or
// stored (used by the word-packed structure).
struct op_cost {
  std::uint64_t entry_reads = 0;
  std::uint64_t entry_writes = 0;
  std::uint64_t word_reads = 0;
  std::uint64_t word_writes = 0;
};

// Itemized space usage. `bound_bits` is the analytic budget the structure
// is measured against; payload excludes metadata.
struct space_report {
  std::vector<std::pair<std::string, std::uint64_t>> components;
  std::uint64_t payload_bits = 0;
  std::uint64_t metadata_bits = 0;
  std::uint64_t bound_bits = 0;
  std::string bound_formula;
  // False when the bound is reported for reference only (word-aligned
  // baseline storage).
  bool bound_applies = true;

  bool within_bound() const noexcept { return payload_bits <= bound_bits; }
};

}  // namespace psums
