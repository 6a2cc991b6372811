#pragma once

#include <stdexcept>
#include <string>

namespace costar {

// Error taxonomy shared by every module. Callers that need to distinguish
// config problems (exit code 2 in the CLI) from runtime failures (exit 1)
// catch these types.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidInput : Error {
  using Error::Error;
};

struct InvalidConfig : Error {
  using Error::Error;
};

struct ShapeMismatch : Error {
  using Error::Error;
};

}  // namespace costar
