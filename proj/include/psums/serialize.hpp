#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "psums/classic_fenwick.hpp"
#include "psums/layered_fenwick.hpp"
#include "psums/oracle.hpp"
#include "psums/packed_fenwick.hpp"
#include "psums/sampled_fenwick.hpp"

namespace psums {

using bytes = std::vector<std::uint8_t>;

// Array file: "PSAR", version 1, n (u64 LE), k (u16 LE), then n k-bit values
// packed lsb-first into ceil(n*k/64) little-endian words.
struct array_file {
  unsigned k = 1;
  std::vector<std::uint64_t> values;
};

bytes encode_array(const array_file& a);
array_file decode_array(std::span<const std::uint8_t> data);

enum class structure_kind : std::uint8_t { classic, layered, sampled, packed };

std::string_view to_string(structure_kind kind) noexcept;
std::optional<structure_kind> parse_structure_kind(std::string_view name) noexcept;

using any_structure =
    std::variant<classic_fenwick, layered_fenwick, sampled_fenwick, packed_fenwick>;

structure_kind kind_of(const any_structure& s) noexcept;

struct build_options {
  structure_kind kind = structure_kind::layered;
  std::uint64_t b = 2;
  std::optional<double> epsilon;    // sampled: d from epsilon (default 1)
  std::optional<std::uint64_t> d;   // sampled/packed: explicit sample rate
  unsigned delta_bits = 8;          // packed
};

any_structure build_structure(std::vector<std::uint64_t> values, unsigned k,
                              const build_options& options);

// Structure file: the array header with magic "PSST", a kind tag byte, the
// structure parameters and its raw word buffers (each prefixed by a u64
// word count).
bytes encode_structure(const any_structure& s);
any_structure decode_structure(std::span<const std::uint8_t> data);

// Text traces: one op per line (`sum I`, `update I D`, `search J`,
// `access I`), `#` starts a comment, blank lines are skipped.
struct trace_line {
  trace_op op;
  std::uint64_t line = 0;  // 1-based source line
};

std::vector<trace_line> parse_trace_text(std::string_view text);
std::string format_trace_text(const std::vector<trace_op>& ops);

bytes read_file(const std::string& path);
void write_file(const std::string& path, std::span<const std::uint8_t> data);

}  // namespace psums
