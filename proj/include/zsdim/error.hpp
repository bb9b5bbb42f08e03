#pragma once

#include <stdexcept>
#include <string>

namespace zsdim {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input: mismatched dimensions, fields, widths,
// ill-formed trees, violated preconditions.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// A desk-scale bound (ground set, family size, lattice size, search budget)
// was exceeded.
class ResourceLimit : public Error {
 public:
  using Error::Error;
};

}  // namespace zsdim
