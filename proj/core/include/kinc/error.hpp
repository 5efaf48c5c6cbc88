#pragma once

#include <stdexcept>
#include <string>

namespace kinc {

// Root of every error the library raises.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input text: wrong column count, unparsable number, bad header.
class ParseError : public Error {
 public:
  using Error::Error;
};

// Well-formed input that breaks a domain invariant (ordering, positivity,
// duplicate keys).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Argument outside the mathematical domain of a function.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Input for which the requested quantity is undefined (zero total income,
// empty rank range, zero K coefficient).
class DegenerateInput : public Error {
 public:
  using Error::Error;
};

}  // namespace kinc
