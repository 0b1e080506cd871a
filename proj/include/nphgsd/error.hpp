#pragma once
#include <stdexcept>
#include <string>

namespace nphgsd {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// invalid model or configuration input
struct ModelError : Error {
  using Error::Error;
};

// iterative solver or integrator failed to reach its tolerance
struct ConvergenceError : Error {
  using Error::Error;
};

// requested power cannot be reached (e.g. no treatment benefit)
struct UnattainableError : Error {
  using Error::Error;
};

}  // namespace nphgsd
