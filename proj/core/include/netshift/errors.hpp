#pragma once

#include <stdexcept>
#include <string>

namespace netshift {

// Malformed or inconsistent input data (edge lists, sidecars, report files).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when message passing or estimation hits a degenerate numeric state,
// e.g. a normalizer underflowing to zero.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace netshift
