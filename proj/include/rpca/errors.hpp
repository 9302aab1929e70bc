#pragma once

#include <stdexcept>
#include <string>

namespace rpca {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Bad parameter values (gamma out of range, rank < 1, empty grid, ...).
class InvalidParameter : public Error {
public:
  using Error::Error;
};

// Malformed caller data: dimension mismatches, non-finite entries,
// rank-deficient span bases, empty frame sets.
class InputError : public Error {
public:
  using Error::Error;
};

// File problems: missing files, bad magic, truncated payloads.
class IoError : public Error {
public:
  using Error::Error;
};

// Numerical failure: rank collapse, singular retraction system,
// diverging iterates.
class NumericalError : public Error {
public:
  using Error::Error;
};

}  // namespace rpca
