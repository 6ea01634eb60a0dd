#pragma once

#include <stdexcept>
#include <string>

namespace qfem {

// Error categories; the CLI maps them to exit codes
// (config -> 2, data -> 3, numerical -> 4).
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : Error {
  using Error::Error;
};

struct DataError : Error {
  using Error::Error;
};

struct NumericalError : Error {
  using Error::Error;
};

}  // namespace qfem
