#pragma once

#include <stdexcept>
#include <string>

namespace texens {

/// Bad input data: missing files, undecodable images, mismatched score files.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An iterative numerical routine failed (no convergence, singular system).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace texens
