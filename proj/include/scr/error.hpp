#pragma once

#include <stdexcept>
#include <string>

namespace scr {

/// Malformed or inconsistent input data (bad files, mismatched dimensions
/// across sources, constant columns). The CLI maps these to exit code 1.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical procedure could not produce a result: singular systems,
/// non-PD covariance, solver failure. The CLI maps these to exit code 2.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace scr
