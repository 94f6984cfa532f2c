#pragma once

#include <stdexcept>
#include <string>

namespace nwb {

// Base for every failure raised by the library. The CLI maps IoError and
// FormatError to exit code 2 and everything else to exit code 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DegenerateWhitePointError : public Error {
 public:
  using Error::Error;
};

class DegenerateRegionError : public Error {
 public:
  using Error::Error;
};

class InvalidPartitionError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class InvalidSpecError : public Error {
 public:
  using Error::Error;
};

class EmptyTableError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace nwb
