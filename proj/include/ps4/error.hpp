#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ps4 {

// Base for every error the library raises on bad input or failed checks.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

// Argument outside the documented domain (zero denominator, empty range, c outside (1,2), ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// A numerical procedure could not reach its stated accuracy or capacity.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace ps4
