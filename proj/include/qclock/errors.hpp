#pragma once

#include <stdexcept>

namespace qclock {

// Invalid-argument family: the CLI maps these to exit code 2.
class InvalidParam : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class InvalidQuery : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DimensionTooLarge : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class IndexOutOfRange : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Numeric-failure family: the CLI maps these to exit code 1.
class NonConvergent : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DegenerateDensity : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NormalizationDrift : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class QuadratureFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qclock
