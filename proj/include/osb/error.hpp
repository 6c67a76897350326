#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace osb {

/// Invalid caller input: bad literal, violated precondition, wrong number kind.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Literal parse failure; `position()` is the 0-based offset of the offending character.
class ParseError : public DomainError {
 public:
  ParseError(const std::string& what, std::size_t position)
      : DomainError(what + " at position " + std::to_string(position)),
        position_(position) {}
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// Two computation routes that must coincide did not. Always a bug.
class ConsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A configured size budget would be exceeded; no partial answer is returned.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace osb
