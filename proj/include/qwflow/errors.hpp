#pragma once

#include <stdexcept>
#include <string>

namespace qwflow {

// Invalid model or command parameters.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A truncated-tail simulation was stepped past the horizon it was built for.
class HorizonError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Singular solves, degenerate spectra, ill-conditioned fits.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qwflow
