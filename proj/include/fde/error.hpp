#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fde {

/// A well-formed request that has no valid mathematical answer: Gamma poles,
/// series budgets, defective matrices, non-finite solver states.
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed text input. `offset` is the byte position of the problem.
class ParseError : public std::invalid_argument {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : std::invalid_argument(what + " (at offset " + std::to_string(offset) + ")"),
        offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

}  // namespace fde
