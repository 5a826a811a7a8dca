#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace psums {

// A parameter combination (width, branching, sample rate, ...) is not allowed.
class invalid_parameter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class index_error : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// An element would leave [0, 2^k) or a value does not fit its field.
class value_range_error : public std::range_error {
 public:
  using std::range_error::range_error;
};

// A SWAR field add/sub carried or borrowed across a field boundary.
class field_overflow : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

class delta_too_large : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class parse_error : public std::runtime_error {
 public:
  parse_error(std::uint64_t offset, const std::string& what)
      : std::runtime_error("byte " + std::to_string(offset) + ": " + what),
        offset_(offset) {}

  std::uint64_t offset() const noexcept { return offset_; }

 private:
  std::uint64_t offset_;
};

}  // namespace psums
